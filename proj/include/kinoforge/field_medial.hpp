#pragma once

#include <vector>

#include "kinoforge/field.hpp"
#include "kinoforge/geom_env.hpp"

namespace kinoforge {

struct MedialAxis {
    Grid<std::uint8_t> flags;  // 1 on axis cells
    std::vector<int> cells;    // linear indices, ascending

    bool contains(int x, int y) const { return flags(y, x) != 0; }
    std::size_t size() const { return cells.size(); }
};

/// Ridge cells of the exact distance transform. A 4-neighbour pair whose
/// nearest obstacle cells lie on different obstacle components, or are
/// farther apart than the larger of the two clearances, straddles the axis;
/// the cell of the pair closer to the bisector of the two features is kept.
/// Free cells pinched between two opposite obstacle neighbours are axis cells too.
MedialAxis compute_medial_axis(const Workspace& ws);

/// Single-source Dijkstra from the goal cell over 8-connected free cells whose
/// centre clearance exceeds `clearance`. Diagonal moves need both orthogonal
/// neighbours passable. Unreachable cells hold +inf.
GridD compute_cost_to_go(const Workspace& ws, const Point& goal, double clearance);

/// Samples ab at most half a cell apart; true iff every sample has clearance > rho.
bool line_of_sight(const Workspace& ws, const Point& a, const Point& b, double rho);

struct MedialFieldParams {
    double clearance = 0.5;       // rho for line of sight and cost-to-go
    double goal_tolerance = 1.5;  // local_goal returns the goal inside this radius
    double d_max = -1.0;          // <= 0 selects 0.25 * max(width, height) cells
    double march_step = 0.25;     // cells
};

class GoalField final : public GuidanceField {
public:
    GoalField() = default;

    const FieldGrid& grid() const override { return grid_; }
    std::optional<Point> local_goal(const Point& p) const override;

    Eigen::Vector2d u(int x, int y) const { return grid_.endpoint(x, y) - cell_center(x, y); }
    Point cell_center(int x, int y) const { return {(x + 0.5) * grid_.cell_size, (y + 0.5) * grid_.cell_size}; }
    const MedialFieldParams& params() const { return params_; }
    /// Cells other than the goal cell with finite cost-to-go whose endpoint does not lower it.
    int progress_violations() const { return progress_violations_; }

    friend GoalField build_goal_field(const Workspace&, const MedialAxis&, const Point&, const MedialFieldParams&);
    friend GoalField goal_field_from_grid(FieldGrid, const MedialFieldParams&);

private:
    FieldGrid grid_;
    MedialFieldParams params_;
    int progress_violations_ = 0;
};

/// Repulsive and attractive components blended by w = |Urep| / (|Urep| + |Uatt|),
/// then rescaled so the endpoint sits on the first axis cell along the blended
/// direction (capped at d_max). Throws InvalidInput when the goal is in collision.
GoalField build_goal_field(const Workspace& ws, const MedialAxis& axis, const Point& goal,
                           const MedialFieldParams& params = {});

/// Rewraps a deserialized grid.
GoalField goal_field_from_grid(FieldGrid grid, const MedialFieldParams& params = {});

/// Blend used by build_goal_field before rescaling.
Eigen::Vector2d blend_field_vectors(const Eigen::Vector2d& u_rep, const Eigen::Vector2d& u_att);

}  // namespace kinoforge
