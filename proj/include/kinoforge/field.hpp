#pragma once

#include <cstdint>
#include <optional>

#include "kinoforge/geom_env.hpp"

namespace kinoforge {

/// Per-cell guidance data shared by both field builders and by the binary
/// field format: cost-to-go, local-goal endpoint and a validity flag.
struct FieldGrid {
    enum class Kind : std::uint32_t { medial = 0, costmap = 1 };

    Kind kind = Kind::medial;
    int width = 0;
    int height = 0;
    double cell_size = 1.0;
    Point goal = Point::Zero();
    Cell goal_cell = Cell::Zero();
    GridD cost_to_go;
    GridD end_x;
    GridD end_y;
    Grid<std::uint8_t> valid;

    void resize(int w, int h);
    std::optional<Cell> cell_of(const Point& p) const;
    double cost_at(const Point& p) const;
    /// Bilinear blend of the four surrounding cell values; the containing
    /// cell's value when any of them is unreachable.
    double interpolated_cost(const Point& p) const;
    Point endpoint(int x, int y) const { return {end_x(y, x), end_y(y, x)}; }
    bool operator==(const FieldGrid& other) const;
};

/// What node expansion needs from a precomputed goal field.
class GuidanceField {
public:
    virtual ~GuidanceField() = default;

    virtual const FieldGrid& grid() const = 0;
    /// Cost-to-go of the cell containing p; +inf when unreachable or outside.
    virtual double cost_to_go(const Point& p) const { return grid().cost_at(p); }
    /// Local goal for a robot at p, or nullopt when the field has none there.
    virtual std::optional<Point> local_goal(const Point& p) const = 0;
    const Point& goal() const { return grid().goal; }
};

}  // namespace kinoforge
