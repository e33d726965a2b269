#include "kinoforge/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "kinoforge/svg.hpp"

namespace kinoforge {

std::string_view to_string(ExpansionStrategy s) {
    switch (s) {
        case ExpansionStrategy::random: return "random";
        case ExpansionStrategy::slc: return "slc";
        default: return "rlc";
    }
}

ExpansionStrategy parse_expansion_strategy(std::string_view name) {
    if (name == "random") return ExpansionStrategy::random;
    if (name == "slc") return ExpansionStrategy::slc;
    if (name == "rlc") return ExpansionStrategy::rlc;
    throw InvalidInput(fmt::format("unknown expansion strategy '{}' (expected random, slc or rlc)", name));
}

void PlannerConfig::validate() const {
    if (blossom < 1) throw InvalidInput("blossom must be >= 1");
    if (max_iterations < 0 || time_budget < 0) throw InvalidInput("budgets must be non-negative");
    if (max_iterations == 0 && time_budget == 0) throw InvalidInput("either an iteration or a time budget is required");
    if (!(goal_tolerance > 0)) throw InvalidInput("goal tolerance must be positive");
    if (!(goal_bias >= 0 && goal_bias <= 1)) throw InvalidInput("goal bias must lie in [0, 1]");
    if (!(edge_duration > 0)) throw InvalidInput("edge duration must be positive");
    if (!(dominance_radius >= 0) || !(selection_radius > 0) || !(explore_radius > 0))
        throw InvalidInput("radii must be positive");
    if (!(robot_radius >= 0)) throw InvalidInput("robot radius must be non-negative");
    if (strategy == ExpansionStrategy::slc && (!slc_table || slc_table->entries.empty()))
        throw InvalidInput("the slc strategy needs a non-empty SLC table");
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Planner::Planner(const PlanningContext& ctx, const PlannerConfig& config, const StateVec& start)
    : ctx_(ctx), config_(config), random_controller_(config.edge_duration, config.edge_duration) {
    config_.validate();
    if (!ctx_.spec || !ctx_.workspace || !ctx_.field) throw InvalidInput("planning context is incomplete");
    if (config_.strategy != ExpansionStrategy::random && !ctx_.controller)
        throw InvalidInput("informed strategies need a controller");
    if (config_.cost_mode == CostMode::costmap && !ctx_.costs) throw InvalidInput("cost-map mode needs a cost map");
    ctx_.spec->validate();
    if (start.size() != ctx_.spec->state_dim || !start.allFinite())
        throw InvalidInput("start state has the wrong dimension or is not finite");

    const Point p = project(start);
    const Workspace& ws = *ctx_.workspace;
    if (!ws.contains(p) || !(ws.clearance(p) > config_.robot_radius))
        throw InvalidInput(fmt::format("start ({}, {}) is in collision", p.x(), p.y()));
    if (ctx_.costs && config_.cost_mode == CostMode::costmap && !ctx_.costs->traversable(p))
        throw InvalidInput("start lies on a non-traversable cell");

    v_max_ = ctx_.spec->max_speed();
    bucket_size_ = std::max(config_.selection_radius, 1.0);
    const double cs = ws.map().cell_size();
    buckets_x_ = std::max(1, static_cast<int>(std::ceil(ws.map().width() * cs / bucket_size_)));
    buckets_y_ = std::max(1, static_cast<int>(std::ceil(ws.map().height() * cs / bucket_size_)));
    buckets_.resize(static_cast<std::size_t>(buckets_x_) * buckets_y_);

    TreeNode root;
    root.state = start;
    root.state[2] = wrap_angle(root.state[2]);
    root.h = heuristic(root.state);
    root.in_goal = (p - ctx_.field->goal()).norm() <= config_.goal_tolerance;
    tree_.nodes.push_back(std::move(root));
    if (!tree_.nodes[0].in_goal) index_insert(0);
}

double Planner::heuristic(const StateVec& s) const { return ctx_.field->grid().interpolated_cost(project(s)) / v_max_; }

bool Planner::selectable(int id) const {
    const TreeNode& n = tree_.nodes[id];
    if (n.dominated || n.in_goal) return false;
    return !(n.g + n.h >= best_cost_);
}

int Planner::bucket_of(const Point& p) const {
    const int bx = std::clamp(static_cast<int>(std::floor(p.x() / bucket_size_)), 0, buckets_x_ - 1);
    const int by = std::clamp(static_cast<int>(std::floor(p.y() / bucket_size_)), 0, buckets_y_ - 1);
    return by * buckets_x_ + bx;
}

void Planner::index_insert(int id) { buckets_[bucket_of(project(tree_.nodes[id].state))].ids.push_back(id); }

void Planner::index_erase(int id) {
    auto& ids = buckets_[bucket_of(project(tree_.nodes[id].state))].ids;
    ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
}

template <typename Fn>
void Planner::for_each_near(const Point& p, double radius, Fn&& fn) const {
    const int bx0 = std::clamp(static_cast<int>(std::floor((p.x() - radius) / bucket_size_)), 0, buckets_x_ - 1);
    const int bx1 = std::clamp(static_cast<int>(std::floor((p.x() + radius) / bucket_size_)), 0, buckets_x_ - 1);
    const int by0 = std::clamp(static_cast<int>(std::floor((p.y() - radius) / bucket_size_)), 0, buckets_y_ - 1);
    const int by1 = std::clamp(static_cast<int>(std::floor((p.y() + radius) / bucket_size_)), 0, buckets_y_ - 1);
    for (int by = by0; by <= by1; ++by)
        for (int bx = bx0; bx <= bx1; ++bx)
            for (int id : buckets_[by * buckets_x_ + bx].ids)
                if ((project(tree_.nodes[id].state) - p).norm() <= radius) fn(id);
}

int Planner::select_near(const Point& q) const {
    int best = -1;
    double best_f = kInf;
    auto consider = [&](int id) {
        if (!selectable(id)) return;
        const double f = tree_.nodes[id].g + tree_.nodes[id].h;
        if (best < 0 || f < best_f || (f == best_f && id > best)) {
            best = id;
            best_f = f;
        }
    };
    for_each_near(q, config_.selection_radius, consider);
    if (best >= 0) return best;

    // Nothing in range: nearest selectable node, searching rings of buckets outwards.
    const int cb = bucket_of(q);
    const int cx = cb % buckets_x_, cy = cb / buckets_x_;
    double best_d = kInf;
    const int max_ring = std::max(buckets_x_, buckets_y_);
    for (int ring = 0; ring <= max_ring; ++ring) {
        if (best >= 0 && best_d <= (ring - 1) * bucket_size_) break;
        for (int by = cy - ring; by <= cy + ring; ++by)
            for (int bx = cx - ring; bx <= cx + ring; ++bx) {
                if (std::max(std::abs(bx - cx), std::abs(by - cy)) != ring) continue;
                if (bx < 0 || by < 0 || bx >= buckets_x_ || by >= buckets_y_) continue;
                for (int id : buckets_[by * buckets_x_ + bx].ids) {
                    if (!selectable(id)) continue;
                    const double d = (project(tree_.nodes[id].state) - q).norm();
                    if (d < best_d || (d == best_d && id > best)) {
                        best_d = d;
                        best = id;
                    }
                }
            }
    }
    return best >= 0 ? best : 0;
}

int Planner::select_node(Rng& rng) {
    Point q = ctx_.field->goal();
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= config_.goal_bias) {
        const GridMap& map = ctx_.workspace->map();
        const WorkspaceBox box = ctx_.workspace->box();
        std::uniform_real_distribution<double> ux(box.x_lo, box.x_hi), uy(box.y_lo, box.y_hi);
        for (int attempt = 0; attempt < 1000; ++attempt) {
            q = Point(ux(rng), uy(rng));
            const auto c = map.cell_of(q);
            if (c && map.is_free(c->x(), c->y())) break;
        }
    }
    return select_near(q);
}

ControllerQuery Planner::exploratory_query(const TreeNode& n, Rng& rng) const {
    ControllerQuery q;
    q.state = n.state;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (config_.strategy == ExpansionStrategy::slc) {
        const auto& entries = config_.slc_table->entries;
        const auto& e = entries[std::uniform_int_distribution<std::size_t>(0, entries.size() - 1)(rng)];
        const double th = n.state[2];
        const double c = std::cos(th), s = std::sin(th);
        q.goal = project(n.state) + Point(c * e.end[0] - s * e.end[1], s * e.end[0] + c * e.end[1]);
        q.goal_heading = wrap_angle(th + e.end[2]);
        return q;
    }
    const double r = config_.explore_radius * std::sqrt(unit(rng));
    const double a = 2.0 * M_PI * unit(rng);
    q.goal = project(n.state) + r * Point(std::cos(a), std::sin(a));
    q.goal_heading = wrap_angle(2.0 * M_PI * unit(rng));
    return q;
}

Candidate Planner::make_candidate(int node, const ControllerQuery& query, const Controller& controller, Rng& rng) {
    Candidate c;
    c.plan = controller.plan(*ctx_.spec, query, rng);
    c.trajectory = propagate_plan(*ctx_.spec, tree_.nodes[node].state, c.plan);
    c.h = heuristic(c.trajectory.end());
    return c;
}

Candidate Planner::expand_node(int node, Rng& rng) {
    {
        TreeNode& n = tree_.nodes[node];
        if (!n.pending.empty()) {
            Candidate c = std::move(n.pending.back());
            n.pending.pop_back();
            return c;
        }
    }
    std::vector<Candidate> cands;
    cands.reserve(config_.blossom);
    for (int i = 0; i < config_.blossom; ++i) {
        const TreeNode& n = tree_.nodes[node];
        if (config_.strategy == ExpansionStrategy::random) {
            cands.push_back(make_candidate(node, ControllerQuery{n.state, ctx_.field->goal(), std::nullopt},
                                           random_controller_, rng));
            continue;
        }
        std::optional<ControllerQuery> q;
        if (i == 0 && n.expansion_count == 0 && config_.informed_first_goal) {
            if (const auto lg = ctx_.field->local_goal(project(n.state))) {
                q = ControllerQuery{n.state, *lg, std::nullopt};
                ++stats_.informed_goals;
            }
        }
        if (!q) q = exploratory_query(n, rng);
        cands.push_back(make_candidate(node, *q, *ctx_.controller, rng));
    }
    stats_.iterations += config_.blossom;
    ++stats_.blossoms;
    TreeNode& n = tree_.nodes[node];
    ++n.expansion_count;
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.h < b.h; });
    // Pending queue keeps the best candidate at the back.
    for (std::size_t i = cands.size(); i-- > 1;) n.pending.push_back(std::move(cands[i]));
    return std::move(cands.front());
}

int Planner::extend_tree(int node, const Candidate& cand) {
    if (!collision_free_trajectory(*ctx_.workspace, cand.trajectory, config_.robot_radius)) {
        ++stats_.rejected;
        return -1;
    }
    const double edge_cost = config_.cost_mode == CostMode::duration
                                 ? cand.trajectory.duration()
                                 : trajectory_cost(cand.trajectory, CostMode::costmap, ctx_.costs, config_.K);
    if (!std::isfinite(edge_cost)) {
        ++stats_.rejected;
        return -1;
    }
    TreeNode child;
    child.state = cand.trajectory.end();
    child.parent = node;
    child.edge = cand.plan;
    child.g = tree_.nodes[node].g + edge_cost;
    child.h = cand.h;
    const Point p = project(child.state);
    child.in_goal = (p - ctx_.field->goal()).norm() <= config_.goal_tolerance;
    if (child.in_goal ? child.g >= best_cost_ : child.g + child.h >= best_cost_) {
        ++stats_.pruned;
        return -1;
    }

    const int id = static_cast<int>(tree_.nodes.size());
    std::vector<int> beaten;
    bool dominated = false;
    for_each_near(p, config_.dominance_radius, [&](int other) {
        const TreeNode& o = tree_.nodes[other];
        if (std::abs(wrap_angle(o.state[2] - child.state[2])) > config_.dominance_heading) return;
        if (o.g > child.g && o.h > child.h)
            beaten.push_back(other);
        else if (o.g <= child.g && o.h < child.h)
            dominated = true;
    });
    for (int other : beaten) {
        tree_.nodes[other].dominated = true;
        index_erase(other);
        ++stats_.dominated;
    }
    child.dominated = dominated;
    if (dominated) ++stats_.dominated;
    tree_.nodes.push_back(std::move(child));
    if (!dominated && !tree_.nodes[id].in_goal) index_insert(id);
    ++stats_.extended;
    return id;
}

Trajectory Planner::path_to(int node) const {
    std::vector<int> chain;
    for (int id = node; id > 0; id = tree_.nodes[id].parent) chain.push_back(id);
    PiecewisePlan plan;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        plan.insert(plan.end(), tree_.nodes[*it].edge.begin(), tree_.nodes[*it].edge.end());
    if (plan.empty()) {
        Trajectory t;
        t.times = {0.0};
        t.states = {tree_.root().state};
        return t;
    }
    return propagate_plan(*ctx_.spec, tree_.root().state, plan);
}

PlanResult plan(const PlanningContext& ctx, const PlannerConfig& config, const StateVec& start) {
    const auto t0 = std::chrono::steady_clock::now();
    Planner p(ctx, config, start);
    Rng rng(config.seed);
    PlanResult res;
    auto trace = [&](TraceEvent ev, int node, int parent, double cost) {
        if (config.record_trace) res.trace.push_back({p.stats_.iterations, elapsed_ms(t0), ev, node, parent, cost});
    };
    auto record = [&](int node) {
        const double g = p.tree_.nodes[node].g;
        p.best_cost_ = g;
        res.history.push_back({g, p.stats_.iterations, elapsed_ms(t0), node});
        trace(TraceEvent::solution, node, p.tree_.nodes[node].parent, g);
    };
    if (p.tree_.nodes[0].in_goal) record(0);

    int next = -1;
    while (p.best_cost_ > 0.0) {
        if (config.max_iterations > 0 && p.stats_.iterations >= config.max_iterations) break;
        if (config.time_budget > 0 && elapsed_ms(t0) >= config.time_budget * 1000.0) break;
        const int sel = next >= 0 && p.selectable(next) ? next : p.select_node(rng);
        next = -1;
        const Candidate cand = p.expand_node(sel, rng);
        const int id = p.extend_tree(sel, cand);
        ++p.stats_.loops;
        if (id < 0) {
            trace(TraceEvent::reject, -1, sel, kInf);
            continue;
        }
        const TreeNode& child = p.tree_.nodes[id];
        trace(TraceEvent::extend, id, sel, child.g);
        if (child.in_goal && child.g < p.best_cost_)
            record(id);
        else if (config.greedy_continuation && child.h < p.tree_.nodes[sel].h)
            next = id;
    }

    p.stats_.wall_ms = elapsed_ms(t0);
    if (!res.history.empty()) {
        const SolutionRecord& last = res.history.back();
        res.best = Solution{p.path_to(last.node), last.cost, last.iteration, last.wall_ms};
    }
    res.stats = p.stats_;
    res.tree = std::move(p.tree_);
    return res;
}

namespace {

std::string_view event_name(TraceEvent e) {
    switch (e) {
        case TraceEvent::extend: return "extend";
        case TraceEvent::reject: return "reject";
        default: return "solution";
    }
}

std::string cost_text(double c) { return std::isfinite(c) ? fmt::format("{:.12g}", c) : "-"; }

}  // namespace

void write_trace(std::ostream& os, const PlanResult& result, bool wall_time) {
    os << "# iteration wall_ms event node parent cost\n";
    for (const auto& r : result.trace)
        os << fmt::format("{} {} {} {} {} {}\n", r.iteration, wall_time ? fmt::format("{:.3f}", r.wall_ms) : "-",
                          event_name(r.event), r.node, r.parent, cost_text(r.cost));
}

void write_solution(std::ostream& os, const PlanResult& result, const SystemSpec& spec) {
    const auto& s = result.stats;
    os << fmt::format("# iterations={} loops={} nodes={} extended={} rejected={} pruned={} dominated={}\n",
                      s.iterations, s.loops,
                      result.tree.size(), s.extended, s.rejected, s.pruned, s.dominated);
    if (!result.best) {
        os << "# no solution\n";
        return;
    }
    os << fmt::format("# cost={:.12g} iteration={} improvements={}\n", result.best->cost, result.best->iteration,
                      result.history.size());
    write_golden_trajectory(os, spec, result.best->trajectory);
}

std::string tree_svg(const Workspace& ws, const PlanResult& result, const SystemSpec& spec, const Point& goal,
                     double goal_tolerance, const CostMap* costs) {
    const GridMap& map = ws.map();
    const double cs = map.cell_size();
    svg::Document doc(map.width() * cs, map.height() * cs, 8.0 / cs);
    doc.rect(0, 0, map.width() * cs, map.height() * cs, "white");
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x) {
            if (costs && costs->at(x, y) < 1.0) {
                if (costs->at(x, y) > 0.0) {
                    const int shade = static_cast<int>(std::lround(255.0 * (1.0 - 0.6 * costs->at(x, y))));
                    doc.rect(x * cs, y * cs, cs, cs, fmt::format("rgb({0},{0},{0})", shade));
                }
                if (!map.is_obstacle(x, y)) continue;
            }
            if (map.is_obstacle(x, y)) doc.rect(x * cs, y * cs, cs, cs, "#222222");
        }
    const auto& nodes = result.tree.nodes;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const Trajectory t = propagate_plan(spec, nodes[nodes[i].parent].state, nodes[i].edge);
        std::vector<Point> pts;
        pts.reserve(t.size());
        for (const auto& s : t.states) pts.push_back(project(s));
        doc.polyline(pts, "#9a9a9a", 0.06 * cs);
    }
    if (result.best) {
        std::vector<Point> pts;
        for (const auto& s : result.best->trajectory.states) pts.push_back(project(s));
        doc.polyline(pts, "#d02020", 0.18 * cs);
    }
    const Point s = project(nodes.front().state);
    doc.circle(s.x(), s.y(), 0.6 * cs, "#2050d0");
    doc.raw(fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{:.3f}\" fill=\"none\" stroke=\"#20a040\" "
                        "stroke-width=\"{:.3f}\"/>\n",
                        goal.x(), goal.y(), goal_tolerance, 0.12 * cs));
    return doc.str();
}

}  // namespace kinoforge
