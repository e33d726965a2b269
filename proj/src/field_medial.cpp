#include "kinoforge/field_medial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include <fmt/format.h>

namespace kinoforge {

MedialAxis compute_medial_axis(const Workspace& ws) {
    const GridMap& map = ws.map();
    const int w = map.width();
    const int h = map.height();
    if (map.free_count() == 0) throw InvalidInput("map has no free cells");

    const GridI comp = label_obstacle_components(map);
    const GridI& feature = ws.edt().feature;
    const GridD& dist = ws.edt().distance;
    const double cs = map.cell_size();

    MedialAxis axis;
    axis.flags = Grid<std::uint8_t>::Zero(h, w);

    auto compare = [&](int px, int py, int qx, int qy) {
        const int fp = feature(py, px);
        const int fq = feature(qy, qx);
        if (fp < 0 || fq < 0 || fp == fq) return;
        const Cell a = map.cell_from_index(fp);
        const Cell b = map.cell_from_index(fq);
        const Eigen::Vector2d fa = a.cast<double>();
        const Eigen::Vector2d fb = b.cast<double>();
        const bool different_component = comp(a.y(), a.x()) != comp(b.y(), b.x());
        const double separation = (fa - fb).norm();
        const double reach = std::max(dist(py, px), dist(qy, qx)) / cs;
        if (!different_component && !(separation > reach)) return;
        // Sign tells which cell of the pair lies closer to the bisector of fa, fb.
        const Eigen::Vector2d p(px, py), q(qx, qy);
        const double crit = (fa - fb).dot(fa + fb - p - q);
        if (crit >= 0) axis.flags(py, px) = 1;
        if (crit <= 0) axis.flags(qy, qx) = 1;
    };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (map.is_obstacle(x, y)) continue;
            if (map.is_free(x + 1, y)) compare(x, y, x + 1, y);
            if (map.is_free(x, y + 1)) compare(x, y, x, y + 1);
            const bool pinched_x = map.is_obstacle(x - 1, y) && map.is_obstacle(x + 1, y);
            const bool pinched_y = map.is_obstacle(x, y - 1) && map.is_obstacle(x, y + 1);
            if (pinched_x || pinched_y) axis.flags(y, x) = 1;
        }

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (axis.flags(y, x)) axis.cells.push_back(map.index(x, y));
    return axis;
}

GridD compute_cost_to_go(const Workspace& ws, const Point& goal, double clearance) {
    const GridMap& map = ws.map();
    const auto gc = map.cell_of(goal);
    if (!gc) throw InvalidInput("goal outside the map");
    auto passable = [&](int x, int y) {
        return map.in_grid(x, y) && map.is_free(x, y) && ws.cell_clearance(x, y) > clearance;
    };
    if (!passable(gc->x(), gc->y()))
        throw InvalidInput(fmt::format("goal cell ({}, {}) is in collision", gc->x(), gc->y()));

    const int w = map.width();
    const int h = map.height();
    const double cs = map.cell_size();
    GridD cost = GridD::Constant(h, w, kInf);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    cost(gc->y(), gc->x()) = 0.0;
    open.emplace(0.0, map.index(gc->x(), gc->y()));
    while (!open.empty()) {
        const auto [g, idx] = open.top();
        open.pop();
        const Cell c = map.cell_from_index(idx);
        if (g > cost(c.y(), c.x())) continue;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = c.x() + dx, ny = c.y() + dy;
                if (!passable(nx, ny)) continue;
                if (dx != 0 && dy != 0 && !(passable(c.x() + dx, c.y()) && passable(c.x(), c.y() + dy))) continue;
                const double step = (dx != 0 && dy != 0) ? std::numbers::sqrt2 * cs : cs;
                if (g + step < cost(ny, nx)) {
                    cost(ny, nx) = g + step;
                    open.emplace(g + step, map.index(nx, ny));
                }
            }
    }
    return cost;
}

bool line_of_sight(const Workspace& ws, const Point& a, const Point& b, double rho) {
    const double spacing = 0.5 * ws.map().cell_size();
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int i = 0; i <= n; ++i) {
        const Point p = a + (b - a) * (static_cast<double>(i) / n);
        if (!ws.contains(p) || !(ws.clearance(p) > rho)) return false;
    }
    return true;
}

Eigen::Vector2d blend_field_vectors(const Eigen::Vector2d& u_rep, const Eigen::Vector2d& u_att) {
    const double r = u_rep.norm();
    const double a = u_att.norm();
    if (r + a == 0.0) return Eigen::Vector2d::Zero();
    const double w = r / (r + a);
    return w * u_rep + (1.0 - w) * u_att;
}

namespace {

struct Candidate {
    double h;
    int index;
    Point at;
};

}  // namespace

GoalField build_goal_field(const Workspace& ws, const MedialAxis& axis, const Point& goal,
                           const MedialFieldParams& params) {
    const GridMap& map = ws.map();
    const int w = map.width();
    const int h = map.height();
    const double cs = map.cell_size();
    const double rho = params.clearance;

    GoalField field;
    field.params_ = params;
    if (field.params_.d_max <= 0.0) field.params_.d_max = 0.25 * std::max(w, h) * cs;
    const double d_max = field.params_.d_max;
    const double step = params.march_step * cs;

    FieldGrid& grid = field.grid_;
    grid.kind = FieldGrid::Kind::medial;
    grid.resize(w, h);
    grid.cell_size = cs;
    grid.goal = goal;
    grid.cost_to_go = compute_cost_to_go(ws, goal, rho);
    grid.goal_cell = *map.cell_of(goal);
    const GridD& cost = grid.cost_to_go;
    const int goal_index = map.index(grid.goal_cell.x(), grid.goal_cell.y());

    auto cost_at = [&](const Point& p) {
        const auto c = map.cell_of(p);
        return c ? cost(c->y(), c->x()) : kInf;
    };
    auto usable = [&](const Point& p) { return ws.contains(p) && ws.clearance(p) > rho; };

    const int window = static_cast<int>(std::ceil(d_max / cs));
    std::vector<Candidate> candidates;

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double hc = cost(y, x);
            if (!std::isfinite(hc)) continue;
            if (map.index(x, y) == goal_index) {
                grid.end_x(y, x) = goal.x();
                grid.end_y(y, x) = goal.y();
                grid.valid(y, x) = 1;
                continue;
            }
            const Point p = map.cell_center(x, y);
            const bool on_axis = axis.contains(x, y);

            Eigen::Vector2d u_rep = Eigen::Vector2d::Zero();
            if (!on_axis) {
                const int f = ws.edt().feature(y, x);
                if (f >= 0) {
                    const Eigen::Vector2d away = p - map.cell_center(map.cell_from_index(f));
                    const Eigen::Vector2d dir = away.normalized();
                    for (double t = step; t <= d_max + 1e-12; t += step) {
                        const Point q = p + t * dir;
                        if (!usable(q)) break;
                        const Cell qc = *map.cell_of(q);
                        if (axis.contains(qc.x(), qc.y())) {
                            u_rep = q - p;
                            break;
                        }
                    }
                }
            }

            // Attractor: visible axis cell within d_max (or the goal) with least cost-to-go.
            candidates.clear();
            candidates.push_back({0.0, goal_index, goal});
            for (int cy = std::max(0, y - window); cy <= std::min(h - 1, y + window); ++cy)
                for (int cx = std::max(0, x - window); cx <= std::min(w - 1, x + window); ++cx) {
                    if (!axis.contains(cx, cy) || !std::isfinite(cost(cy, cx))) continue;
                    const Point c = map.cell_center(cx, cy);
                    if ((c - p).norm() > d_max) continue;
                    candidates.push_back({cost(cy, cx), map.index(cx, cy), c});
                }
            std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
                return a.h != b.h ? a.h < b.h : a.index < b.index;
            });
            std::optional<Candidate> best;
            for (const auto& c : candidates)
                if (line_of_sight(ws, p, c.at, rho)) {
                    best = c;
                    break;
                }
            const Eigen::Vector2d u_att = best ? Eigen::Vector2d(best->at - p) : Eigen::Vector2d::Zero();

            auto toward_attractor = [&]() {
                const Eigen::Vector2d d = best->at - p;
                return d.norm() > d_max ? Point(p + d.normalized() * d_max) : best->at;
            };

            const Eigen::Vector2d u = best ? blend_field_vectors(u_rep, u_att) : u_rep;
            std::optional<Point> end;
            if (u.norm() > 1e-12) {
                if (on_axis && best) {
                    end = toward_attractor();
                } else {
                    const Eigen::Vector2d dir = u.normalized();
                    Point last = p;
                    bool moved = false;
                    for (double t = step; t <= d_max + 1e-12; t += step) {
                        const Point q = p + t * dir;
                        if (!usable(q)) break;
                        last = q;
                        moved = true;
                        const Cell qc = *map.cell_of(q);
                        if (map.index(qc.x(), qc.y()) == goal_index) {
                            last = goal;
                            break;
                        }
                        if (axis.contains(qc.x(), qc.y())) break;
                    }
                    if (moved) end = last;
                }
            }
            // Fall back to the attractor when the blended endpoint makes no progress.
            if (best && best->h < hc && (!end || !(cost_at(*end) < hc))) end = toward_attractor();

            if (end) {
                grid.end_x(y, x) = end->x();
                grid.end_y(y, x) = end->y();
                grid.valid(y, x) = 1;
                if (!(cost_at(*end) < hc)) ++field.progress_violations_;
            } else {
                ++field.progress_violations_;
            }
        }
    return field;
}

GoalField goal_field_from_grid(FieldGrid grid, const MedialFieldParams& params) {
    GoalField f;
    f.grid_ = std::move(grid);
    f.params_ = params;
    return f;
}

std::optional<Point> GoalField::local_goal(const Point& p) const {
    const auto c = grid_.cell_of(p);
    if (!c) return std::nullopt;
    if (!std::isfinite(grid_.cost_to_go(c->y(), c->x()))) return std::nullopt;
    if ((p - grid_.goal).norm() <= params_.goal_tolerance) return grid_.goal;
    if (!grid_.valid(c->y(), c->x())) return std::nullopt;
    return Point(p + u(c->x(), c->y()));
}

}  // namespace kinoforge
