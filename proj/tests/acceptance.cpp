// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "kinoforge/bench.hpp"
#include "kinoforge/cli.hpp"
#include "kinoforge/controllers.hpp"
#include "kinoforge/dynamics.hpp"
#include "kinoforge/field_costmap.hpp"
#include "kinoforge/field_medial.hpp"
#include "kinoforge/geom_env.hpp"
#include "kinoforge/planner.hpp"

using namespace kinoforge;
namespace fs = std::filesystem;

namespace {

constexpr double kArcTol = 1e-6;
constexpr double kArcSeconds = 1.0;
constexpr double kEq1RelTol = 1e-3;
constexpr double kMedialPassFraction = 0.95;
constexpr double kMedialPairTol = 1.0;
constexpr double kMedialSeconds = 10.0;
constexpr double kProgressFraction = 0.99;
constexpr double kSlcAuditTol = 1e-9;
constexpr int kBaselineSeeds = 30;
constexpr int kBaselineRequired = 29;
constexpr double kBaselineSeconds = 60.0;
constexpr double kQualityRatio = 0.8;
constexpr std::int64_t kQualityIterations = 10000;
constexpr int kQualityInstances = 5;
constexpr int kQualitySeeds = 30;
constexpr double kQualitySeconds = 1800.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::pair<std::string, GridMap>> desk_maps() {
    std::vector<std::pair<std::string, GridMap>> maps;
    Rng a(3), b(7), c(5);
    maps.emplace_back("city_a", city_map(64, 64, a));
    maps.emplace_back("city_b", city_map(64, 64, b));
    maps.emplace_back("blocks", random_rect_map(64, 64, 0.2, c));
    return maps;
}

// --- independent oracles ---------------------------------------------------

bool obstacle(const GridMap& m, int x, int y) {
    return x <= 0 || y <= 0 || x >= m.width() - 1 || y >= m.height() - 1 || m.occupied(x, y);
}

// 8-connected obstacle components by breadth-first search.
std::vector<int> components(const GridMap& m) {
    const int w = m.width(), h = m.height();
    std::vector<int> comp(w * h, -1);
    int next = 0;
    for (int s = 0; s < w * h; ++s) {
        if (comp[s] >= 0 || !obstacle(m, s % w, s / w)) continue;
        std::queue<int> q;
        q.push(s);
        comp[s] = next;
        while (!q.empty()) {
            const int c = q.front();
            q.pop();
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int x = c % w + dx, y = c / w + dy;
                    if (x < 0 || y < 0 || x >= w || y >= h) continue;
                    const int n = y * w + x;
                    if (comp[n] < 0 && obstacle(m, x, y)) {
                        comp[n] = next;
                        q.push(n);
                    }
                }
        }
        ++next;
    }
    return comp;
}

// Nearest obstacle distance d1 and the nearest obstacle on a distinct surface
// d2: another component, or the same component but farther from the first
// feature than d1 (the other side of a wrapped obstacle).
std::pair<double, double> two_nearest(const GridMap& m, const std::vector<int>& comp, const std::vector<int>& obs,
                                      int x, int y) {
    const int w = m.width();
    double d1 = kInf;
    int f1 = -1;
    for (int o : obs) {
        const double d = std::hypot(o % w - x, o / w - y);
        if (d < d1) d1 = d, f1 = o;
    }
    double d2 = kInf;
    for (int o : obs) {
        const bool distinct = comp[o] != comp[f1] || std::hypot(o % w - f1 % w, o / w - f1 / w) > d1;
        if (distinct) d2 = std::min(d2, std::hypot(o % w - x, o / w - y));
    }
    return {d1, d2};
}

std::vector<double> brute_clearance(const GridMap& m) {
    const int w = m.width(), h = m.height();
    std::vector<int> obs;
    for (int i = 0; i < w * h; ++i)
        if (obstacle(m, i % w, i / w)) obs.push_back(i);
    std::vector<double> c(w * h, 0.0);
    for (int i = 0; i < w * h; ++i) {
        if (obstacle(m, i % w, i / w)) continue;
        double d = kInf;
        for (int o : obs) d = std::min(d, std::hypot(o % w - i % w, o / w - i / w));
        c[i] = d;
    }
    return c;
}

std::vector<double> oracle_cost_to_go(const GridMap& m, int goal, double rho) {
    const int w = m.width(), h = m.height();
    const auto clear = brute_clearance(m);
    auto ok = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && clear[y * w + x] > rho; };
    std::vector<double> d(w * h, kInf);
    using E = std::pair<double, int>;
    std::priority_queue<E, std::vector<E>, std::greater<>> pq;
    d[goal] = 0;
    pq.emplace(0.0, goal);
    while (!pq.empty()) {
        auto [dc, c] = pq.top();
        pq.pop();
        if (dc > d[c]) continue;
        const int cx = c % w, cy = c / w;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (!dx && !dy) continue;
                if (!ok(cx + dx, cy + dy)) continue;
                if (dx && dy && (!ok(cx + dx, cy) || !ok(cx, cy + dy))) continue;
                const int n = (cy + dy) * w + cx + dx;
                const double nd = dc + ((dx && dy) ? std::sqrt(2.0) : 1.0);
                if (nd < d[n]) d[n] = nd, pq.emplace(nd, n);
            }
    }
    return d;
}

// Edge weight of the cost-map criterion: length * exp(K * mean c_tv) with c_tv
// sampled at half-cell spacing, endpoints included.
double oracle_edge(const CostMap& cm, double ax, double ay, double bx, double by, double K) {
    const double len = std::hypot(bx - ax, by - ay);
    const int n = std::max(1, static_cast<int>(std::ceil(len / 0.5)));
    double sum = 0;
    for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        const int cx = static_cast<int>(std::floor(ax + (bx - ax) * t));
        const int cy = static_cast<int>(std::floor(ay + (by - ay) * t));
        const double c = cm.at(cx, cy);
        if (c >= 1.0) return kInf;
        sum += c;
    }
    return len * std::exp(K * sum / (n + 1));
}

// --- criteria --------------------------------------------------------------

Outcome dynamics_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemSpec spec = SystemSpec::first_order();
    Rng rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0), dur(0.05, 10.0), pos(-5, 5), ang(-M_PI, M_PI);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double v = u(rng), w = u(rng), d = dur(rng);
        const double x0 = pos(rng), y0 = pos(rng), th0 = ang(rng);
        StateVec s(3);
        s << x0, y0, th0;
        const StateVec e = propagate_end(spec, s, Control(v, w), d);
        double ex, ey;
        if (std::abs(w) < 1e-12) {
            ex = x0 + v * d * std::cos(th0);
            ey = y0 + v * d * std::sin(th0);
        } else {
            ex = x0 + v / w * (std::sin(th0 + w * d) - std::sin(th0));
            ey = y0 - v / w * (std::cos(th0 + w * d) - std::cos(th0));
        }
        const double eth = std::remainder(th0 + w * d, 2 * M_PI);
        worst = std::max({worst, std::abs(e[0] - ex), std::abs(e[1] - ey),
                          std::abs(std::remainder(e[2] - eth, 2 * M_PI))});
    }
    const double secs = seconds_since(t0);
    return {worst <= kArcTol && secs < kArcSeconds,
            fmt::format("max endpoint error {:.2e} (tol {:.0e}), {:.3f}s (limit {}s)", worst, kArcTol, secs,
                        kArcSeconds)};
}

Outcome eq1_cost() {
    const double K = 4.68;
    CostMap cm(8, 8, 1.0, 0.5);
    Trajectory t;
    for (int i = 0; i <= 40; ++i) {
        t.times.push_back(0.05 * i);
        StateVec s(3);
        s << 1.5 + 0.1 * i, 4.0, 0.0;
        t.states.push_back(s);
    }
    const double got = trajectory_cost(t, CostMode::costmap, &cm, K);
    const double want = 2.0 * std::exp(K * 0.5);
    const double rel = std::abs(got - want) / want;
    return {rel <= kEq1RelTol, fmt::format("cost {:.5f} vs 2e^2.34 = {:.5f}, rel err {:.1e} (tol {:.0e})", got, want,
                                           rel, kEq1RelTol)};
}

Outcome medial_axis_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t total = 0, passed = 0, not_free = 0;
    double detect_secs = 0;
    for (int k = 0; k < 10; ++k) {
        Rng rng(100 + k);
        const GridMap m = random_rect_map(64, 64, 0.15 + 0.02 * k, rng);
        const auto td = std::chrono::steady_clock::now();
        const Workspace ws(m);
        const MedialAxis axis = compute_medial_axis(ws);
        detect_secs += seconds_since(td);
        const auto comp = components(m);
        std::vector<int> obs;
        for (int i = 0; i < m.cell_count(); ++i)
            if (obstacle(m, i % m.width(), i / m.width())) obs.push_back(i);
        for (int c : axis.cells) {
            const int x = c % m.width(), y = c / m.width();
            ++total;
            if (obstacle(m, x, y)) {
                ++not_free;
                continue;
            }
            const auto [d1, d2] = two_nearest(m, comp, obs, x, y);
            if (std::abs(d1 - d2) <= kMedialPairTol) ++passed;
        }
    }
    const double frac = total ? static_cast<double>(passed) / total : 0.0;
    const double secs = seconds_since(t0);
    return {total > 0 && frac >= kMedialPassFraction && not_free == 0 && detect_secs < kMedialSeconds,
            fmt::format("{}/{} axis cells pass ({:.2f}%, need {:.0f}%), {} not free, detection {:.2f}s "
                        "(limit {}s), with oracle {:.1f}s",
                        passed, total, 100 * frac, 100 * kMedialPassFraction, not_free, detect_secs, kMedialSeconds,
                        secs)};
}

Outcome progress_invariant() {
    std::size_t total = 0, ok = 0;
    std::string per_map;
    for (const auto& [name, m] : desk_maps()) {
        const Workspace ws(m);
        Rng rng(9);
        InstanceOptions io;
        const auto inst = generate_instances(ws, SystemSpec::first_order(), name, 1, io, rng).front();
        const MedialAxis axis = compute_medial_axis(ws);
        const GoalField field = build_goal_field(ws, axis, inst.goal);
        const Cell gc = *m.cell_of(inst.goal);
        const auto h = oracle_cost_to_go(m, m.index(gc.x(), gc.y()), field.params().clearance);
        std::size_t mt = 0, mo = 0;
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x) {
                const double hc = h[m.index(x, y)];
                if (!std::isfinite(hc) || hc <= 0.0) continue;
                ++mt;
                if (!field.grid().valid(y, x)) continue;
                const auto ec = m.cell_of(field.grid().endpoint(x, y));
                if (ec && h[m.index(ec->x(), ec->y())] < hc) ++mo;
            }
        total += mt;
        ok += mo;
        per_map += fmt::format(" {}={}/{}", name, mo, mt);
    }
    const double frac = total ? static_cast<double>(ok) / total : 0.0;
    return {frac >= kProgressFraction,
            fmt::format("h* decreases at {:.3f}% of cells (need {:.0f}%):{}", 100 * frac, 100 * kProgressFraction,
                        per_map)};
}

Outcome costmap_field() {
    const double K = 4.68;
    std::size_t chains = 0, reached = 0, cycles = 0, cells = 0, above = 0;
    double worst_excess = 0;
    for (int k = 0; k < 3; ++k) {
        Rng rng(40 + k);
        const CostMap cm = random_cost_map(64, 64, 12, rng);
        const int w = cm.width(), h = cm.height();
        std::vector<int> trav;
        for (int i = 0; i < w * h; ++i)
            if (cm.traversable(i % w, i / w)) trav.push_back(i);
        std::uniform_int_distribution<std::size_t> pick(0, trav.size() - 1);
        const int goal = trav[pick(rng)];
        const Point gp = cm.cell_center(goal % w, goal / w);
        const CostField field = build_cost_field(cm, gp);

        // Dijkstra over the same 8-connected edge weights.
        std::vector<double> d(w * h, kInf);
        using E = std::pair<double, int>;
        std::priority_queue<E, std::vector<E>, std::greater<>> pq;
        d[goal] = 0;
        pq.emplace(0.0, goal);
        while (!pq.empty()) {
            auto [dc, c] = pq.top();
            pq.pop();
            if (dc > d[c]) continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int x = c % w + dx, y = c / w + dy;
                    if ((!dx && !dy) || !cm.traversable(x, y)) continue;
                    const double wgt = oracle_edge(cm, x + 0.5, y + 0.5, c % w + 0.5, c / w + 0.5, K);
                    if (dc + wgt < d[y * w + x]) d[y * w + x] = dc + wgt, pq.emplace(dc + wgt, y * w + x);
                }
        }
        for (int i = 0; i < w * h; ++i) {
            if (!std::isfinite(d[i])) continue;
            ++cells;
            const double t = field.grid().cost_to_go(i / w, i % w);
            if (!(t <= d[i] * (1 + 1e-12))) {
                ++above;
                worst_excess = std::max(worst_excess, t - d[i]);
            }
        }
        // Waypoint chains from random reachable cells.
        std::vector<int> reach;
        for (int i = 0; i < w * h; ++i)
            if (std::isfinite(d[i])) reach.push_back(i);
        std::uniform_int_distribution<std::size_t> pr(0, reach.size() - 1);
        for (int s = 0; s < 100; ++s) {
            int c = reach[pr(rng)];
            ++chains;
            std::vector<char> seen(w * h, 0);
            bool cyc = false;
            while (c != goal && c >= 0) {
                if (seen[c]) {
                    cyc = true;
                    break;
                }
                seen[c] = 1;
                c = field.waypoint(c % w, c / w);
            }
            cycles += cyc;
            reached += (c == goal);
        }
    }
    return {reached == chains && cycles == 0 && above == 0,
            fmt::format("{}/{} chains reach the goal, {} cycles, cost-to-go above Dijkstra on {}/{} cells "
                        "(worst excess {:.2e})",
                        reached, chains, cycles, above, cells, worst_excess)};
}

Outcome slc_audit() {
    std::string detail;
    bool pass = true;
    for (SystemId id : {SystemId::first_order, SystemId::second_order}) {
        const SystemSpec spec = SystemSpec::make(id);
        Rng rng(17);
        const SlcTable table = build_slc_table(spec, SlcGridSpec{}, 16, 0.05, rng);
        const double audit = audit_slc_table(table);
        std::size_t own = 0;
        for (const auto& e : table.entries) {
            const PiecewisePlan p = slc_query(table, table.key(e));
            if (p.size() == 1 && p[0].control == e.plan.control && p[0].duration == e.plan.duration) ++own;
        }
        pass = pass && audit <= kSlcAuditTol && own == table.entries.size();
        detail += fmt::format("{}: {} entries, audit {:.1e} (tol {:.0e}), {}/{} own-plan hits; ", to_string(id),
                              table.entries.size(), audit, kSlcAuditTol, own, table.entries.size());
    }
    return {pass, detail};
}

Outcome planner_baseline() {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemSpec spec = SystemSpec::first_order();
    const Workspace ws(empty_map(64, 64));
    const MedialAxis axis = compute_medial_axis(ws);
    const Point goal(55.5, 55.5);
    const GoalField field = build_goal_field(ws, axis, goal);
    const StateVec start = make_state(spec, 8.5, 8.5, 0.0);
    int solved = 0;
    for (int s = 0; s < kBaselineSeeds; ++s) {
        PlannerConfig cfg;
        cfg.strategy = ExpansionStrategy::random;
        cfg.blossom = 5;
        cfg.max_iterations = 5000;
        cfg.seed = s;
        cfg.record_trace = false;
        const PlanningContext ctx{&spec, &ws, nullptr, &field, nullptr};
        solved += plan(ctx, cfg, start).solved();
    }
    const double secs = seconds_since(t0);
    return {solved >= kBaselineRequired && secs < kBaselineSeconds,
            fmt::format("{}/{} seeds solved (need {}), {:.1f}s (limit {}s)", solved, kBaselineSeeds,
                        kBaselineRequired, secs, kBaselineSeconds)};
}

// Shared sweep for the relative-quality and ablation criteria.
struct Sweep {
    std::vector<BenchRecord> records;
    std::vector<SummaryRow> rows;
    double seconds = 0;
};

const Sweep& quality_sweep() {
    static const Sweep sweep = [] {
        const auto t0 = std::chrono::steady_clock::now();
        const SystemSpec spec = SystemSpec::first_order();
        std::vector<BenchProblem> problems;
        Rng inst_rng(1);
        for (const auto& [name, m] : desk_maps()) {
            const MapSource src = make_map_source(name, m);
            for (auto& inst : generate_instances(*src.workspace, spec, name, kQualityInstances, {}, inst_rng)) {
                BenchProblem p;
                p.field = build_field_for(src, inst.goal, 0.5, 4.68);
                p.instance = std::move(inst);
                p.workspace = src.workspace;
                problems.push_back(std::move(p));
            }
        }
        auto greedy = std::make_shared<GreedyOracle>(0.5);
        PlannerConfig base;
        base.max_iterations = kQualityIterations;
        base.record_trace = false;
        std::vector<PlannerVariant> variants;
        auto add = [&](std::string name, ExpansionStrategy st, int blossom, bool informed) {
            PlannerVariant v{std::move(name), base, greedy};
            v.config.strategy = st;
            v.config.blossom = blossom;
            v.config.informed_first_goal = informed;
            variants.push_back(std::move(v));
        };
        add("rlc", ExpansionStrategy::rlc, 5, true);
        add("random", ExpansionStrategy::random, 5, true);
        add("rlc_random_first", ExpansionStrategy::rlc, 5, false);
        add("rlc_b1", ExpansionStrategy::rlc, 1, true);
        BenchOptions opt;
        for (int s = 0; s < kQualitySeeds; ++s) opt.seeds.push_back(s);
        opt.threads = resolve_threads(1);
        Sweep out;
        out.records = run_benchmark(spec, variants, problems, opt);
        out.rows = aggregate(out.records, log_budget_grid(static_cast<double>(kQualityIterations), 1.0, 50));
        out.seconds = seconds_since(t0);
        return out;
    }();
    return sweep;
}

const SummaryRow* final_row(const std::vector<SummaryRow>& rows, const std::string& planner) {
    const SummaryRow* r = nullptr;
    for (const auto& row : rows)
        if (row.planner == planner && row.budget_type == "iterations") r = &row;
    return r;
}

std::string med(const SummaryRow* r) {
    return r && r->median_norm_cost ? fmt::format("{:.3f}", *r->median_norm_cost) : "n/a";
}

Outcome relative_quality() {
    const Sweep& s = quality_sweep();
    const SummaryRow* rlc = final_row(s.rows, "rlc");
    const SummaryRow* rnd = final_row(s.rows, "random");
    const bool a = rlc && rnd && rlc->median_norm_cost && rnd->median_norm_cost &&
                   *rlc->median_norm_cost <= kQualityRatio * *rnd->median_norm_cost;
    // Success curves on the iteration axis from the first point where either planner has solved.
    std::vector<const SummaryRow*> cr, rr;
    for (const auto& row : s.rows) {
        if (row.budget_type != "iterations") continue;
        if (row.planner == "rlc") cr.push_back(&row);
        if (row.planner == "random") rr.push_back(&row);
    }
    bool b = cr.size() == rr.size() && !cr.empty();
    bool started = false;
    int worse = 0;
    for (std::size_t i = 0; b && i < cr.size(); ++i) {
        started = started || cr[i]->success_ratio > 0 || rr[i]->success_ratio > 0;
        if (started && cr[i]->success_ratio < rr[i]->success_ratio) ++worse;
    }
    b = b && worse == 0;
    return {a && b && s.seconds < kQualitySeconds,
            fmt::format("(a) median norm cost rlc {} vs random {} (need <= {}x); (b) success rlc {:.3f} vs random "
                        "{:.3f} at N={}, {} budget points below random; sweep {:.0f}s (limit {:.0f}s)",
                        med(rlc), med(rnd), kQualityRatio, rlc ? rlc->success_ratio : 0.0,
                        rnd ? rnd->success_ratio : 0.0, kQualityIterations, worse, s.seconds, kQualitySeconds)};
}

double map_median(const Sweep& s, const std::string& planner, const std::string& map) {
    const auto best = instance_best_costs(s.records);
    std::vector<double> v;
    for (const auto& r : s.records) {
        if (r.planner != planner || r.instance.rfind(map + "#", 0) != 0) continue;
        if (const auto c = cost_at_budget(r, false, static_cast<double>(kQualityIterations)))
            v.push_back(*c / best.at(r.instance));
    }
    if (v.empty()) return kInf;
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

Outcome first_goal_ablation() {
    const Sweep& s = quality_sweep();
    int wins = 0;
    std::string detail;
    for (const auto& [name, m] : desk_maps()) {
        const double inf = map_median(s, "rlc", name), rnd = map_median(s, "rlc_random_first", name);
        wins += inf < rnd;
        detail += fmt::format(" {}: {:.3f} vs {:.3f};", name, inf, rnd);
    }
    return {wins >= 2, fmt::format("informed beats random first goal on {}/3 maps (need 2):{}", wins, detail)};
}

Outcome blossom_ablation() {
    const Sweep& s = quality_sweep();
    auto mean_first = [&](const std::string& planner) {
        double sum = 0;
        int n = 0;
        for (const auto& r : s.records)
            if (r.planner == planner && !r.history.empty()) sum += r.history.front().iteration, ++n;
        return n ? sum / n : kInf;
    };
    const double f1 = mean_first("rlc_b1"), f5 = mean_first("rlc");
    const SummaryRow* b1 = final_row(s.rows, "rlc_b1");
    const SummaryRow* b5 = final_row(s.rows, "rlc");
    const bool cost_ok = b1 && b5 && b1->median_norm_cost && b5->median_norm_cost &&
                         *b5->median_norm_cost < *b1->median_norm_cost;
    return {f1 < f5 && cost_ok,
            fmt::format("mean first-solution iteration B=1 {:.0f} vs B=5 {:.0f}; final median norm cost B=5 {} vs "
                        "B=1 {}",
                        f1, f5, med(b5), med(b1))};
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "kinoforge_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto maps = desk_maps();
    {
        std::ofstream(dir / "city_a.map") << render_movingai(maps[0].second);
        Rng rng(41);
        std::ofstream(dir / "cost.pgm", std::ios::binary) << render_pgm(random_cost_map(64, 64, 12, rng));
    }
    const std::string table_dir = (dir / "slc").string();
    std::ostringstream sink;
    if (cli::run({"build-slc", "--out", table_dir}, sink, sink) != 0) return {false, "build-slc failed"};
    // Instance on the city map from the same generator as the benchmark.
    Rng rng(1);
    const auto inst = generate_instances(Workspace(maps[0].second), SystemSpec::first_order(), "city_a", 1, {}, rng)[0];
    const std::string start = fmt::format("{},{},{}", inst.start[0], inst.start[1], inst.start[2]);
    const std::string goal = fmt::format("{},{}", inst.goal.x(), inst.goal.y());

    struct Case {
        std::string name;
        std::vector<std::string> args;
    };
    const std::vector<Case> cases = {
        {"rlc", {"--map", (dir / "city_a.map").string(), "--expansion", "rlc"}},
        {"random", {"--map", (dir / "city_a.map").string(), "--expansion", "random"}},
        {"slc", {"--map", (dir / "city_a.map").string(), "--expansion", "slc", "--controller",
                 "table:" + table_dir + "/table.bin"}},
        {"costmap", {"--costmap", (dir / "cost.pgm").string(), "--expansion", "rlc"}},
    };
    int identical = 0;
    std::string detail;
    for (const auto& c : cases) {
        std::string digests[2];
        for (int rep = 0; rep < 2; ++rep) {
            const std::string out = (dir / fmt::format("{}_{}", c.name, rep)).string();
            std::vector<std::string> args = {"plan", "--seed", "7", "--iters", "3000", "--out", out};
            args.insert(args.end(), c.args.begin(), c.args.end());
            if (c.name == "costmap")
                args.insert(args.end(), {"--start", "5.5,5.5", "--goal", "58.5,58.5"});
            else
                args.insert(args.end(), {"--start", start, "--goal", goal});
            const int code = cli::run(args, sink, sink);
            if (code != 0 && code != 3) return {false, fmt::format("{} run exited {}: {}", c.name, code, sink.str())};
            digests[rep] = cli::file_digest(out + "/trace.txt");
        }
        identical += digests[0] == digests[1];
        detail += fmt::format(" {}={}", c.name, digests[0] == digests[1] ? "identical" : "DIFFERENT");
    }
    fs::remove_all(dir);
    return {identical == static_cast<int>(cases.size()),
            fmt::format("{}/{} repeated plan runs byte-identical:{}", identical, cases.size(), detail)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"dynamics-arc-oracle", dynamics_oracle},
        {"integral-cost-check", eq1_cost},
        {"medial-axis-vs-brute-force", medial_axis_oracle},
        {"local-goal-progress", progress_invariant},
        {"cost-map-field", costmap_field},
        {"slc-audit", slc_audit},
        {"planner-baseline", planner_baseline},
        {"relative-quality", relative_quality},
        {"first-goal-ablation", first_goal_ablation},
        {"blossom-ablation", blossom_ablation},
        {"plan-determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        failed += !o.pass;
        std::cout << fmt::format("{} {:<28} {} [{:.1f}s]", o.pass ? "PASS" : "FAIL", name, o.detail,
                                 seconds_since(t0))
                  << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
    return failed == 0 ? 0 : 1;
}
