#include "kinoforge/field_costmap.hpp"

#include <cmath>
#include <queue>

#include <fmt/format.h>

namespace kinoforge {

namespace {

int sample_count(double len, double cell_size) {
    return std::max(1, static_cast<int>(std::ceil(len / (0.5 * cell_size))));
}

}  // namespace

bool decreasing_cost_line(const CostMap& costs, const Point& a, const Point& b, double epsilon_c, double min_length) {
    const double len = (b - a).norm();
    if (len < min_length * costs.cell_size()) return false;
    const int n = sample_count(len, costs.cell_size());
    double prev = kInf;
    for (int i = 0; i <= n; ++i) {
        const double c = costs.at(Point(a + (b - a) * (static_cast<double>(i) / n)));
        if (c >= 1.0) return false;
        if (c > prev + epsilon_c) return false;
        prev = c;
    }
    return true;
}

double segment_cost(const CostMap& costs, const Point& a, const Point& b, double K) {
    const double len = (b - a).norm();
    const int n = sample_count(len, costs.cell_size());
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double c = costs.at(Point(a + (b - a) * (static_cast<double>(i) / n)));
        if (c >= 1.0) return kInf;
        sum += c;
    }
    return len * std::exp(K * sum / (n + 1));
}

CostField build_cost_field(const CostMap& costs, const Point& goal, const CostFieldParams& params) {
    const auto gc = costs.cell_of(goal);
    if (!gc || !costs.traversable(gc->x(), gc->y())) throw InvalidInput("goal cell is not traversable");

    const int w = costs.width();
    const int h = costs.height();
    CostField field;
    field.params_ = params;
    FieldGrid& grid = field.grid_;
    grid.kind = FieldGrid::Kind::costmap;
    grid.resize(w, h);
    grid.cell_size = costs.cell_size();
    grid.goal = goal;
    grid.goal_cell = *gc;
    GridD& g = grid.cost_to_go;
    field.parent_ = GridI::Constant(h, w, -1);
    GridI& parent = field.parent_;
    Grid<std::uint8_t> closed = Grid<std::uint8_t>::Zero(h, w);

    auto center = [&](int idx) {
        const Cell c = costs.cell_from_index(idx);
        return costs.cell_center(c.x(), c.y());
    };
    auto g_of = [&](int idx) { return g.data()[idx]; };
    auto parent_of = [&](int idx) { return parent.data()[idx]; };

    const int goal_idx = costs.index(gc->x(), gc->y());
    g(gc->y(), gc->x()) = 0.0;
    parent(gc->y(), gc->x()) = goal_idx;

    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    open.emplace(0.0, goal_idx);
    while (!open.empty()) {
        const auto [gs, s] = open.top();
        open.pop();
        const Cell sc = costs.cell_from_index(s);
        if (closed(sc.y(), sc.x()) || gs > g_of(s)) continue;
        closed(sc.y(), sc.x()) = 1;
        const Point ps = center(s);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = sc.x() + dx, ny = sc.y() + dy;
                if (!costs.traversable(nx, ny) || closed(ny, nx)) continue;
                const int n = costs.index(nx, ny);
                const Point pn = costs.cell_center(nx, ny);

                double best = gs + segment_cost(costs, pn, ps, params.K);
                int best_parent = s;
                // Shortcut to the nearest ancestor past the minimum line length.
                for (int a = parent_of(s); a >= 0; a = parent_of(a)) {
                    const Point pa = center(a);
                    if ((pa - pn).norm() >= params.min_length * costs.cell_size()) {
                        if (decreasing_cost_line(costs, pn, pa, params.epsilon_c, params.min_length)) {
                            const double c2 = g_of(a) + segment_cost(costs, pn, pa, params.K);
                            if (c2 <= best) {
                                best = c2;
                                best_parent = a;
                            }
                        }
                        break;
                    }
                    if (a == goal_idx) break;
                }
                if (best < g(ny, nx)) {
                    g(ny, nx) = best;
                    parent(ny, nx) = best_parent;
                    open.emplace(best, n);
                }
            }
    }

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int p = parent(y, x);
            if (p < 0) continue;
            const Point e = costs.index(x, y) == goal_idx ? goal : center(p);
            grid.end_x(y, x) = e.x();
            grid.end_y(y, x) = e.y();
            grid.valid(y, x) = 1;
        }
    return field;
}

CostField cost_field_from_grid(FieldGrid grid, const CostFieldParams& params) {
    CostField f;
    f.params_ = params;
    f.parent_ = GridI::Constant(grid.height, grid.width, -1);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            if (!grid.valid(y, x)) continue;
            const auto c = grid.cell_of(grid.endpoint(x, y));
            if (c) f.parent_(y, x) = c->y() * grid.width + c->x();
        }
    f.grid_ = std::move(grid);
    return f;
}

std::optional<Point> CostField::local_goal(const Point& p) const {
    const auto c = grid_.cell_of(p);
    if (!c || !grid_.valid(c->y(), c->x()) || !std::isfinite(grid_.cost_to_go(c->y(), c->x()))) return std::nullopt;
    if (*c == grid_.goal_cell) return grid_.goal;
    return grid_.endpoint(c->x(), c->y());
}

}  // namespace kinoforge
