#include "kinoforge/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "kinoforge/bench.hpp"
#include "kinoforge/controllers.hpp"
#include "kinoforge/dynamics.hpp"
#include "kinoforge/field_costmap.hpp"
#include "kinoforge/field_io.hpp"
#include "kinoforge/field_medial.hpp"
#include "kinoforge/geom_env.hpp"
#include "kinoforge/planner.hpp"

#ifndef KINOFORGE_VERSION
#define KINOFORGE_VERSION "0.0.0"
#endif

namespace kinoforge::cli {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string file_digest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << is.rdbuf();
    return fmt::format("{:016x}", fnv1a64(ss.str()));
}

namespace {

class Manifest {
public:
    explicit Manifest(std::string command) { add("command", std::move(command)); }

    template <typename T>
    void add(const std::string& key, const T& value) {
        entries_.emplace_back(key, fmt::format("{}", value));
    }
    void add_input(const std::string& key, const std::string& path) {
        add("input." + key, path);
        add("input." + key + ".fnv1a64", file_digest(path));
    }
    void write(const fs::path& dir) const {
        std::ofstream os(dir / "manifest.txt");
        os << "tool=kinoforge\nversion=" << KINOFORGE_VERSION << "\n";
        for (const auto& [k, v] : entries_) os << k << "=" << v << "\n";
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::vector<double> parse_numbers(const std::string& text, char sep = ',') {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw InvalidInput(fmt::format("'{}' is not a number list", text));
        v.push_back(x);
    }
    return v;
}

Point parse_point(const std::string& text) {
    const auto v = parse_numbers(text);
    if (v.size() != 2) throw InvalidInput(fmt::format("expected X,Y but got '{}'", text));
    return {v[0], v[1]};
}

fs::path prepare_out(const std::string& dir) {
    fs::create_directories(dir);
    return fs::path(dir);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw InvalidInput(fmt::format("cannot write '{}'", p.string()));
    os << text;
}

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

MapSource load_map_source(const std::string& map_file, const std::string& costmap_file) {
    if (map_file.empty() == costmap_file.empty()) throw InvalidInput("give exactly one of --map or --costmap");
    if (!map_file.empty()) return make_map_source(fs::path(map_file).stem().string(), read_movingai_file(map_file));
    return make_map_source(fs::path(costmap_file).stem().string(), read_pgm_file(costmap_file));
}

std::shared_ptr<const Controller> make_controller(const std::string& name, const SystemSpec& spec, double edge,
                                                  std::shared_ptr<const SlcTable>* table_out) {
    if (name == "greedy") return std::make_shared<GreedyOracle>(edge);
    if (name == "random") return std::make_shared<RandomController>(edge, edge);
    if (name.rfind("policy:", 0) == 0) {
        MlpPolicy p = load_policy(name.substr(7));
        if (p.system != spec.id) throw InvalidInput("policy was trained for a different system");
        return std::make_shared<PolicyController>(std::move(p), edge);
    }
    if (name.rfind("table:", 0) == 0) {
        auto table = std::make_shared<const SlcTable>(load_slc_table(name.substr(6)));
        if (table->spec.id != spec.id) throw InvalidInput("SLC table was built for a different system");
        if (table_out) *table_out = table;
        return std::make_shared<SlcController>(table);
    }
    throw InvalidInput(fmt::format("unknown controller '{}' (greedy, random, policy:FILE, table:FILE)", name));
}

// ---------------------------------------------------------------------------

struct FieldArgs {
    std::string map, costmap, goal, out;
    double clearance = 0.5, K = 4.68, goal_tolerance = 1.5;
    int stride = 2;
};

int cmd_build_field(const FieldArgs& a, std::ostream& out) {
    const MapSource src = load_map_source(a.map, a.costmap);
    const Point goal = parse_point(a.goal);
    const fs::path dir = prepare_out(a.out);
    Manifest m("build-field");
    if (src.costs) {
        CostFieldParams params;
        params.K = a.K;
        const CostField field = build_cost_field(*src.costs, goal, params);
        save_field((dir / "field.bin").string(), field.grid());
        write_file(dir / "figure.svg", cost_field_svg(*src.costs, field.grid(), a.stride));
        m.add_input("costmap", a.costmap);
        int reachable = 0;
        for (int y = 0; y < field.grid().height; ++y)
            for (int x = 0; x < field.grid().width; ++x) reachable += field.grid().valid(y, x) != 0;
        out << fmt::format("cost field {}x{} goal=({}, {}) reachable_cells={}\n", field.grid().width,
                           field.grid().height, goal.x(), goal.y(), reachable);
    } else {
        MedialFieldParams params;
        params.clearance = a.clearance;
        params.goal_tolerance = a.goal_tolerance;
        const GoalField field = build_goal_field(*src.workspace, *src.axis, goal, params);
        save_field((dir / "field.bin").string(), field.grid());
        write_file(dir / "figure.svg", medial_field_svg(*src.workspace, *src.axis, field, a.stride));
        m.add_input("map", a.map);
        int reachable = 0;
        for (int y = 0; y < field.grid().height; ++y)
            for (int x = 0; x < field.grid().width; ++x) reachable += std::isfinite(field.grid().cost_to_go(y, x));
        out << fmt::format("medial field {}x{} goal=({}, {}) axis_cells={} reachable_cells={} progress_violations={}\n",
                           field.grid().width, field.grid().height, goal.x(), goal.y(), src.axis->size(), reachable,
                           field.progress_violations());
    }
    m.add("goal", a.goal);
    m.add("clearance", a.clearance);
    m.add("K", a.K);
    m.add("goal_tolerance", a.goal_tolerance);
    m.add("outputs", "field.bin figure.svg");
    m.write(dir);
    return ok;
}

struct SlcArgs {
    std::string system = "first_order", durations = "0.5,1,1.5,2", out;
    int grid = 5, initial_samples = 16;
    double r_nn = 0.05;
    std::uint64_t seed = 0;
};

int cmd_build_slc(const SlcArgs& a, std::ostream& out) {
    const SystemSpec spec = SystemSpec::make(parse_system_id(a.system));
    SlcGridSpec grid;
    grid.values_per_dimension = a.grid;
    grid.durations = parse_numbers(a.durations);
    Rng rng(a.seed);
    const SlcTable table = build_slc_table(spec, grid, a.initial_samples, a.r_nn, rng);
    const double audit = audit_slc_table(table);
    const fs::path dir = prepare_out(a.out);
    save_slc_table((dir / "table.bin").string(), table);
    Manifest m("build-slc");
    m.add("system", a.system);
    m.add("grid", a.grid);
    m.add("durations", a.durations);
    m.add("initial_samples", spec.has_velocity_state() ? a.initial_samples : 1);
    m.add("r_nn", a.r_nn);
    m.add("seed", a.seed);
    m.add("plan_set_size", table.plans.size());
    m.add("entries", table.entries.size());
    m.add("audit_max_error", fmt::format("{:.3e}", audit));
    m.add("outputs", "table.bin");
    m.write(dir);
    out << fmt::format("slc table system={} plans={} initial_samples={} entries={} audit_max_error={:.3e}\n", a.system,
                       table.plans.size(), table.initial_samples.size(), table.entries.size(), audit);
    return ok;
}

struct PlanArgs {
    std::string map, costmap, system = "first_order", expansion = "rlc", controller = "greedy", start, goal, out,
                                      field, table;
    int blossom = 5;
    std::int64_t iters = 5000;
    double time = 0.0;
    std::uint64_t seed = 0;
    double clearance = 0.5, K = 4.68, goal_tolerance = 1.5, robot_radius = 0.5, edge_duration = 0.5;
    double goal_bias = 0.05, selection_radius = 5.0, explore_radius = 5.0, dominance_radius = 0.5;
    bool random_first_goal = false, trace_wall_time = false;
};

int cmd_plan(const PlanArgs& a, std::ostream& out) {
    const SystemSpec spec = SystemSpec::make(parse_system_id(a.system));
    const MapSource src = load_map_source(a.map, a.costmap);
    const Point goal = parse_point(a.goal);
    const auto sv = parse_numbers(a.start);
    const bool full = static_cast<int>(sv.size()) == spec.state_dim && spec.has_velocity_state();
    if (sv.size() != 2 && sv.size() != 3 && !full)
        throw InvalidInput(spec.has_velocity_state() ? "--start expects X,Y[,THETA[,V,OMEGA]]"
                                                     : "--start expects X,Y or X,Y,THETA");
    StateVec start = make_state(spec, sv[0], sv[1], sv.size() >= 3 ? sv[2] : 0.0);
    if (full) {
        if (sv[3] != spec.velocity_bounds[0].clamp(sv[3]) || sv[4] != spec.velocity_bounds[1].clamp(sv[4]))
            throw InvalidInput("start velocities are out of bounds");
        start.tail(2) << sv[3], sv[4];
    }

    std::shared_ptr<const GuidanceField> field;
    if (!a.field.empty()) {
        FieldGrid g = load_field(a.field);
        if ((g.kind == FieldGrid::Kind::costmap) != static_cast<bool>(src.costs))
            throw InvalidInput("field kind does not match the map type");
        if ((g.goal - goal).norm() > 1e-9) throw InvalidInput("field was built for a different goal");
        if (g.width != src.workspace->map().width() || g.height != src.workspace->map().height())
            throw InvalidInput("field size does not match the map");
        if (src.costs) {
            CostFieldParams params;
            params.K = a.K;
            field = std::make_shared<CostField>(cost_field_from_grid(std::move(g), params));
        } else {
            MedialFieldParams params;
            params.clearance = a.clearance;
            params.goal_tolerance = a.goal_tolerance;
            field = std::make_shared<GoalField>(goal_field_from_grid(std::move(g), params));
        }
    } else {
        field = build_field_for(src, goal, a.clearance, a.K);
    }

    PlannerConfig cfg;
    cfg.strategy = parse_expansion_strategy(a.expansion);
    cfg.blossom = a.blossom;
    cfg.max_iterations = a.iters;
    cfg.time_budget = a.time;
    cfg.seed = a.seed;
    cfg.goal_tolerance = a.goal_tolerance;
    cfg.goal_bias = a.goal_bias;
    cfg.edge_duration = a.edge_duration;
    cfg.dominance_radius = a.dominance_radius;
    cfg.selection_radius = a.selection_radius;
    cfg.explore_radius = a.explore_radius;
    cfg.robot_radius = a.robot_radius;
    cfg.informed_first_goal = !a.random_first_goal;
    cfg.cost_mode = src.costs ? CostMode::costmap : CostMode::duration;
    cfg.K = a.K;
    cfg.trace_wall_time = a.trace_wall_time;

    std::shared_ptr<const SlcTable> table;
    std::shared_ptr<const Controller> controller = make_controller(a.controller, spec, a.edge_duration, &table);
    if (!a.table.empty()) {
        table = std::make_shared<const SlcTable>(load_slc_table(a.table));
        if (table->spec.id != spec.id) throw InvalidInput("SLC table was built for a different system");
    }
    if (cfg.strategy == ExpansionStrategy::slc && !table) {
        Rng table_rng(a.seed);
        table = std::make_shared<const SlcTable>(build_slc_table(spec, SlcGridSpec{}, 16, 0.05, table_rng));
    }
    cfg.slc_table = table;

    const PlanningContext ctx{&spec, src.workspace.get(), src.costs.get(), field.get(), controller.get()};
    const PlanResult res = plan(ctx, cfg, start);

    const fs::path dir = prepare_out(a.out);
    {
        std::ofstream os(dir / "trace.txt");
        write_trace(os, res, a.trace_wall_time);
    }
    {
        std::ofstream os(dir / "solution.txt");
        write_solution(os, res, spec);
    }
    write_file(dir / "figure.svg", tree_svg(*src.workspace, res, spec, goal, a.goal_tolerance, src.costs.get()));

    Manifest m("plan");
    if (src.costs)
        m.add_input("costmap", a.costmap);
    else
        m.add_input("map", a.map);
    if (!a.field.empty()) m.add_input("field", a.field);
    if (!a.table.empty()) m.add_input("table", a.table);
    m.add("system", a.system);
    m.add("expansion", a.expansion);
    m.add("controller", a.controller);
    m.add("start", a.start);
    m.add("goal", a.goal);
    m.add("blossom", a.blossom);
    m.add("iters", a.iters);
    m.add("time", a.time);
    m.add("seed", a.seed);
    m.add("clearance", a.clearance);
    m.add("K", a.K);
    m.add("goal_tolerance", a.goal_tolerance);
    m.add("robot_radius", a.robot_radius);
    m.add("edge_duration", a.edge_duration);
    m.add("goal_bias", a.goal_bias);
    m.add("selection_radius", a.selection_radius);
    m.add("explore_radius", a.explore_radius);
    m.add("dominance_radius", a.dominance_radius);
    m.add("informed_first_goal", cfg.informed_first_goal);
    m.add("trace_digest", file_digest((dir / "trace.txt").string()));
    m.add("outputs", "trace.txt solution.txt figure.svg");
    m.write(dir);

    if (!res.best) {
        out << fmt::format("no solution: iterations={} nodes={} rejected={}\n", res.stats.iterations, res.tree.size(),
                           res.stats.rejected);
        return no_solution;
    }
    out << fmt::format("solution cost={:.6g} iteration={} improvements={} nodes={}\n", res.best->cost,
                       res.best->iteration, res.history.size(), res.tree.size());
    return ok;
}

// ---------------------------------------------------------------------------
// Bench configuration (JSON):
// {
//   "system": "first_order", "max_iterations": 10000, "time_budget": 0,
//   "seeds": 30 | [..], "instances_per_map": 5, "instance_seed": 1, "min_separation": -1,
//   "clearance": 0.5, "goal_tolerance": 1.5, "robot_radius": 0.5, "K": 4.68, "threads": 1,
//   "budget_points": 50,
//   "maps": [{"id": "a", "map": "a.map"} | {"id": "c", "costmap": "c.pgm"}
//            | {"id": "g", "generate": "city|rect|empty|cost", "size": 64, "seed": 3}],
//   "planners": [{"name": "rlc", "strategy": "rlc", "controller": "greedy", "blossom": 5,
//                 "informed_first_goal": true}]
// }

struct BenchSetup {
    SystemSpec spec;
    std::vector<PlannerVariant> variants;
    std::vector<BenchProblem> problems;
    BenchOptions options;
    double max_iterations = 0;
    int budget_points = 50;
};

MapSource map_from_config(const nlohmann::json& j, const fs::path& base) {
    const std::string id = j.at("id").get<std::string>();
    if (j.contains("map")) return make_map_source(id, read_movingai_file((base / j.at("map").get<std::string>()).string()));
    if (j.contains("costmap"))
        return make_map_source(id, read_pgm_file((base / j.at("costmap").get<std::string>()).string()));
    const std::string kind = j.value("generate", "");
    const int size = j.value("size", 64);
    Rng rng(j.value("seed", 1ull));
    if (kind == "empty") return make_map_source(id, empty_map(size, size));
    if (kind == "city") return make_map_source(id, city_map(size, size, rng));
    if (kind == "rect") return make_map_source(id, random_rect_map(size, size, j.value("fill", 0.2), rng));
    if (kind == "cost") return make_map_source(id, random_cost_map(size, size, j.value("bumps", 12), rng));
    throw InvalidInput(fmt::format("map '{}' needs map, costmap or generate", id));
}

BenchSetup load_bench_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("bench config is not valid JSON: {}", e.what()));
    }
    const fs::path base = fs::path(path).parent_path();
    BenchSetup s;
    try {
        s.spec = SystemSpec::make(parse_system_id(j.value("system", std::string("first_order"))));
        const double clearance = j.value("clearance", 0.5);
        const double K = j.value("K", 4.68);
        s.max_iterations = j.value("max_iterations", 10000.0);
        s.budget_points = j.value("budget_points", 50);

        PlannerConfig base_cfg;
        base_cfg.max_iterations = static_cast<std::int64_t>(s.max_iterations);
        base_cfg.time_budget = j.value("time_budget", 0.0);
        base_cfg.goal_tolerance = j.value("goal_tolerance", 1.5);
        base_cfg.robot_radius = j.value("robot_radius", 0.5);
        base_cfg.edge_duration = j.value("edge_duration", 0.5);
        base_cfg.K = K;
        base_cfg.record_trace = false;

        if (j.contains("seeds") && j.at("seeds").is_array())
            s.options.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        else
            for (std::uint64_t k = 0; k < j.value("seeds", 30ull); ++k) s.options.seeds.push_back(k);
        s.options.threads = j.value("threads", 1);

        const int per_map = j.value("instances_per_map", 10);
        Rng inst_rng(j.value("instance_seed", 1ull));
        InstanceOptions iopt;
        iopt.min_separation = j.value("min_separation", -1.0);
        iopt.clearance = std::max(clearance, base_cfg.robot_radius);
        bool any_costmap = false;
        for (const auto& mj : j.at("maps")) {
            const MapSource src = map_from_config(mj, base);
            any_costmap = any_costmap || static_cast<bool>(src.costs);
            for (auto& inst : generate_instances(*src.workspace, s.spec, src.id, per_map, iopt, inst_rng)) {
                BenchProblem p;
                p.field = build_field_for(src, inst.goal, clearance, K);
                p.instance = std::move(inst);
                p.workspace = src.workspace;
                p.costs = src.costs;
                s.problems.push_back(std::move(p));
            }
        }
        if (any_costmap && !std::all_of(s.problems.begin(), s.problems.end(), [](const BenchProblem& p) {
                return static_cast<bool>(p.costs);
            }))
            throw InvalidInput("a bench config may not mix obstacle maps and cost maps");
        base_cfg.cost_mode = any_costmap ? CostMode::costmap : CostMode::duration;

        for (const auto& pj : j.at("planners")) {
            PlannerVariant v;
            v.name = pj.at("name").get<std::string>();
            v.config = base_cfg;
            v.config.strategy = parse_expansion_strategy(pj.value("strategy", std::string("rlc")));
            v.config.blossom = pj.value("blossom", 5);
            v.config.informed_first_goal = pj.value("informed_first_goal", true);
            v.config.greedy_continuation = pj.value("greedy_continuation", true);
            std::shared_ptr<const SlcTable> table;
            v.controller = make_controller(pj.value("controller", std::string("greedy")), s.spec,
                                           base_cfg.edge_duration, &table);
            if (v.config.strategy == ExpansionStrategy::slc && !table) {
                Rng table_rng(0);
                table = std::make_shared<const SlcTable>(build_slc_table(s.spec, SlcGridSpec{}, 16, 0.05, table_rng));
            }
            v.config.slc_table = table;
            v.config.validate();
            s.variants.push_back(std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("bench config: {}", e.what()));
    }
    if (s.variants.empty() || s.problems.empty()) throw InvalidInput("bench config lists no planners or no maps");
    return s;
}

int cmd_bench(const std::string& config, const std::string& out_dir, int threads, std::ostream& out) {
    BenchSetup s = load_bench_config(config);
    if (threads > 0) s.options.threads = threads;
    const fs::path dir = prepare_out(out_dir);
    s.options.records_path = (dir / "records.tsv").string();
    const auto records = run_benchmark(s.spec, s.variants, s.problems, s.options);
    double max_ms = 1.0;
    for (const auto& r : records)
        for (const auto& h : r.history) max_ms = std::max(max_ms, h.wall_ms);
    const auto rows = aggregate(records, log_budget_grid(s.max_iterations, max_ms, s.budget_points));
    emit_figures(rows, dir.string());
    Manifest m("bench");
    m.add_input("config", config);
    m.add("records", records.size());
    m.add("outputs", "records.tsv summary.csv *_vs_*.csv *_vs_*.svg");
    m.write(dir);
    int solved = 0, failed = 0;
    for (const auto& r : records) solved += r.success, failed += !r.error.empty();
    out << fmt::format("bench records={} solved={} errors={}\n", records.size(), solved, failed);
    return ok;
}

int cmd_report(const std::string& records_path, const std::string& out_dir, double max_iterations, int points,
               std::ostream& out) {
    const auto records = read_records(records_path);
    if (records.empty()) throw InvalidInput("records file is empty");
    BudgetGrid grid = budget_grid_for(records, points);
    if (max_iterations > 0) grid.iterations = log_budget_grid(max_iterations, 1.0, points).iterations;
    const auto rows = aggregate(records, grid);
    const fs::path dir = prepare_out(out_dir);
    emit_figures(rows, dir.string());
    Manifest m("report");
    m.add_input("records", records_path);
    m.add("budget_points", points);
    m.add("outputs", "summary.csv *_vs_*.csv *_vs_*.svg");
    m.write(dir);
    out << fmt::format("report rows={}\n", rows.size());
    return ok;
}

struct GoldenArgs {
    std::string system = "first_order", start = "0,0,0", controls, out;
    double substep = 0.05;
};

int cmd_export_golden(const GoldenArgs& a, std::ostream& out) {
    SystemSpec spec = SystemSpec::make(parse_system_id(a.system));
    spec.integration_substep = a.substep;
    spec.validate();
    const auto sv = parse_numbers(a.start);
    if (static_cast<int>(sv.size()) != spec.state_dim)
        throw InvalidInput(fmt::format("--start needs {} components for {}", spec.state_dim, a.system));
    StateVec s(spec.state_dim);
    for (int i = 0; i < spec.state_dim; ++i) s[i] = sv[i];
    PiecewisePlan plan;
    std::stringstream ss(a.controls);
    std::string seg;
    while (std::getline(ss, seg, ';')) {
        const auto v = parse_numbers(seg);
        if (v.size() != 3) throw InvalidInput("--controls expects U0,U1,DURATION segments separated by ';'");
        if (!(v[2] > 0)) throw InvalidInput("segment durations must be positive");
        const Control u(v[0], v[1]);
        if (!spec.control_in_bounds(u)) throw InvalidInput(fmt::format("control ({}, {}) is out of bounds", v[0], v[1]));
        plan.push_back({u, v[2]});
    }
    const Trajectory t = propagate_plan(spec, s, plan);
    std::ofstream os(a.out);
    if (!os) throw InvalidInput(fmt::format("cannot write '{}'", a.out));
    write_golden_trajectory(os, spec, t);
    out << fmt::format("golden trajectory samples={} duration={:.6g}\n", t.size(), t.duration());
    return ok;
}

struct GenArgs {
    std::string kind = "city", out;
    int width = 64, height = 64, bumps = 12;
    double fill = 0.2;
    std::uint64_t seed = 1;
};

int cmd_gen_map(const GenArgs& a, std::ostream& out) {
    if (a.width < 3 || a.height < 3) throw InvalidInput("maps need at least 3x3 cells");
    Rng rng(a.seed);
    if (a.kind == "cost") {
        write_file(a.out, render_pgm(random_cost_map(a.width, a.height, a.bumps, rng)));
    } else {
        GridMap map;
        if (a.kind == "empty")
            map = empty_map(a.width, a.height);
        else if (a.kind == "city")
            map = city_map(a.width, a.height, rng);
        else if (a.kind == "rect")
            map = random_rect_map(a.width, a.height, a.fill, rng);
        else
            throw InvalidInput(fmt::format("unknown map kind '{}' (empty, city, rect, cost)", a.kind));
        write_file(a.out, render_movingai(map));
    }
    out << fmt::format("wrote {}\n", a.out);
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kinodynamic tree planning with guidance fields and goal-conditioned controllers", "kinoforge"};
    app.set_version_flag("--version", KINOFORGE_VERSION);
    app.require_subcommand(1);

    FieldArgs fa;
    auto* bf = app.add_subcommand("build-field", "Build the guidance field for a goal");
    auto* bf_map = bf->add_option("--map", fa.map, "movingai obstacle map");
    bf->add_option("--costmap", fa.costmap, "PGM traversability map")->excludes(bf_map);
    bf->add_option("--goal", fa.goal, "goal X,Y")->required();
    bf->add_option("--clearance", fa.clearance, "line-of-sight clearance");
    bf->add_option("--K", fa.K, "cost exponent gain");
    bf->add_option("--goal-tol", fa.goal_tolerance, "goal tolerance");
    bf->add_option("--stride", fa.stride, "arrow stride in the figure")->check(CLI::PositiveNumber);
    bf->add_option("--out", fa.out, "output directory")->required();

    SlcArgs sa;
    auto* bs = app.add_subcommand("build-slc", "Build the lookup-table inverse-dynamics controller");
    bs->add_option("--system", sa.system, "first_order or second_order");
    bs->add_option("--grid", sa.grid, "values per control dimension");
    bs->add_option("--durations", sa.durations, "comma-separated durations");
    bs->add_option("--initial-samples", sa.initial_samples, "velocity samples (second order)");
    bs->add_option("--r-nn", sa.r_nn, "neighbourhood radius");
    bs->add_option("--seed", sa.seed, "rng seed");
    bs->add_option("--out", sa.out, "output directory")->required();

    PlanArgs pa;
    auto* pl = app.add_subcommand("plan", "Run one planning query");
    auto* pl_map = pl->add_option("--map", pa.map, "movingai obstacle map");
    pl->add_option("--costmap", pa.costmap, "PGM traversability map")->excludes(pl_map);
    pl->add_option("--system", pa.system, "first_order or second_order");
    pl->add_option("--expansion", pa.expansion, "random, slc or rlc");
    pl->add_option("--controller", pa.controller, "greedy, random, policy:FILE or table:FILE");
    pl->add_option("--start", pa.start, "start X,Y[,THETA] (second order: optionally V,OMEGA)")->required();
    pl->add_option("--goal", pa.goal, "goal X,Y")->required();
    pl->add_option("--blossom", pa.blossom, "candidates per expansion");
    pl->add_option("--iters", pa.iters, "iteration budget (0 = none)");
    pl->add_option("--time", pa.time, "time budget in seconds (0 = none)");
    pl->add_option("--seed", pa.seed, "rng seed");
    pl->add_option("--field", pa.field, "prebuilt field.bin");
    pl->add_option("--table", pa.table, "SLC table for slc expansion goals");
    pl->add_option("--clearance", pa.clearance, "field clearance");
    pl->add_option("--K", pa.K, "cost exponent gain");
    pl->add_option("--goal-tol", pa.goal_tolerance, "goal tolerance");
    pl->add_option("--robot-radius", pa.robot_radius, "disc radius for collision checks");
    pl->add_option("--edge-duration", pa.edge_duration, "duration of controller edges");
    pl->add_option("--goal-bias", pa.goal_bias, "probability of sampling the goal");
    pl->add_option("--selection-radius", pa.selection_radius, "node selection radius");
    pl->add_option("--explore-radius", pa.explore_radius, "radius of exploratory goals");
    pl->add_option("--dominance-radius", pa.dominance_radius, "dominance radius");
    pl->add_flag("--random-first-goal", pa.random_first_goal, "do not use the field for the first goal");
    pl->add_flag("--trace-wall-time", pa.trace_wall_time, "write wall-clock times into the trace");
    pl->add_option("--out", pa.out, "output directory")->required();

    std::string bench_config, bench_out;
    int bench_threads = 0;
    auto* be = app.add_subcommand("bench", "Run a benchmark sweep");
    be->add_option("--config", bench_config, "JSON bench configuration")->required();
    be->add_option("--threads", bench_threads, "worker threads");
    be->add_option("--out", bench_out, "output directory")->required();

    std::string rep_records, rep_out;
    double rep_max_iter = 0;
    int rep_points = 50;
    auto* re = app.add_subcommand("report", "Aggregate a records file into curves");
    re->add_option("--records", rep_records, "records.tsv")->required();
    re->add_option("--max-iterations", rep_max_iter, "iteration axis extent");
    re->add_option("--points", rep_points, "budget points per axis")->check(CLI::PositiveNumber);
    re->add_option("--out", rep_out, "output directory")->required();

    GoldenArgs ga;
    auto* eg = app.add_subcommand("export-golden", "Write a reference trajectory");
    eg->add_option("--system", ga.system, "first_order or second_order");
    eg->add_option("--start", ga.start, "start state components");
    eg->add_option("--controls", ga.controls, "U0,U1,DURATION;...")->required();
    eg->add_option("--substep", ga.substep, "integration substep");
    eg->add_option("--out", ga.out, "output file")->required();

    GenArgs gm;
    auto* gen = app.add_subcommand("gen-map", "Generate a desk-scale map");
    gen->add_option("--kind", gm.kind, "empty, city, rect or cost");
    gen->add_option("--width", gm.width, "cells");
    gen->add_option("--height", gm.height, "cells");
    gen->add_option("--fill", gm.fill, "obstacle fraction for rect maps");
    gen->add_option("--bumps", gm.bumps, "cost bumps for cost maps");
    gen->add_option("--seed", gm.seed, "rng seed");
    gen->add_option("--out", gm.out, "output file")->required();

    std::vector<const char*> argv{"kinoforge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return invalid_input;
    }

    try {
        if (bf->parsed()) return cmd_build_field(fa, out);
        if (bs->parsed()) return cmd_build_slc(sa, out);
        if (pl->parsed()) return cmd_plan(pa, out);
        if (be->parsed()) return cmd_bench(bench_config, bench_out, bench_threads, out);
        if (re->parsed()) return cmd_report(rep_records, rep_out, rep_max_iter, rep_points, out);
        if (eg->parsed()) return cmd_export_golden(ga, out);
        if (gen->parsed()) return cmd_gen_map(gm, out);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    } catch (const OutOfBounds& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return internal_error;
    }
    return invalid_input;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace kinoforge::cli
