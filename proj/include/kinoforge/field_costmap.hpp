#pragma once

#include "kinoforge/field.hpp"
#include "kinoforge/geom_env.hpp"

namespace kinoforge {

struct CostFieldParams {
    double K = 4.68;
    double epsilon_c = 0.05;  // allowed rise per sample on a decreasing-cost line
    double min_length = 3.0;  // L_min, cells
};

/// True iff |ab| >= min_length and c_tv sampled from a to b at half-cell
/// spacing never rises by more than epsilon_c between samples and never hits 1.
bool decreasing_cost_line(const CostMap& costs, const Point& a, const Point& b, double epsilon_c, double min_length);

/// length(ab) * exp(K * mean c_tv) with c_tv sampled at half-cell spacing,
/// endpoints included; +inf if any sample is non-traversable.
double segment_cost(const CostMap& costs, const Point& a, const Point& b, double K);

class CostField final : public GuidanceField {
public:
    CostField() = default;

    const FieldGrid& grid() const override { return grid_; }
    /// Stored next waypoint (cell centre) of p's cell; the goal point inside the goal cell.
    std::optional<Point> local_goal(const Point& p) const override;

    /// Linear index of the next waypoint cell, -1 when unreachable.
    int waypoint(int x, int y) const { return parent_(y, x); }
    const GridI& waypoints() const { return parent_; }
    const CostFieldParams& params() const { return params_; }

    friend CostField build_cost_field(const CostMap&, const Point&, const CostFieldParams&);
    friend CostField cost_field_from_grid(FieldGrid, const CostFieldParams&);

private:
    FieldGrid grid_;
    GridI parent_;
    CostFieldParams params_;
};

/// Reverse any-angle sweep from the goal. Cells relax over 8-connected
/// traversable neighbours with segment_cost; a cell whose parent chain admits
/// a decreasing-cost line to an ancestor at least min_length away, at no extra
/// cost, takes that ancestor as its waypoint.
CostField build_cost_field(const CostMap& costs, const Point& goal, const CostFieldParams& params = {});

CostField cost_field_from_grid(FieldGrid grid, const CostFieldParams& params = {});

}  // namespace kinoforge
