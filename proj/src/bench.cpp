#include "kinoforge/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "kinoforge/field_medial.hpp"
#include "kinoforge/svg.hpp"

namespace kinoforge {

std::string ProblemInstance::name() const { return fmt::format("{}#{}", map_id, id); }

std::vector<ProblemInstance> generate_instances(const Workspace& ws, const SystemSpec& spec, const std::string& map_id,
                                                int count, const InstanceOptions& options, Rng& rng) {
    const GridMap& map = ws.map();
    const double cs = map.cell_size();
    const double diagonal = std::hypot(map.width(), map.height()) * cs;
    const double M = options.min_separation < 0 ? 0.25 * diagonal : options.min_separation;
    if (M > diagonal) throw InvalidInput(fmt::format("minimum separation {} exceeds the map diagonal {}", M, diagonal));
    if (count < 0) throw InvalidInput("instance count must be non-negative");

    std::vector<int> cells;
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            if (map.is_free(x, y) && ws.cell_clearance(x, y) > options.clearance) cells.push_back(map.index(x, y));
    if (cells.empty()) throw InvalidInput("map has no cell with enough clearance for a start or goal");

    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::uniform_real_distribution<double> heading(-M_PI, M_PI);
    std::vector<ProblemInstance> out;
    for (int i = 0; i < count; ++i) {
        int rejections = 0;
        while (true) {
            const Point s = map.cell_center(map.cell_from_index(cells[pick(rng)]));
            const Point g = map.cell_center(map.cell_from_index(cells[pick(rng)]));
            const double th = heading(rng);
            bool ok = (s - g).norm() >= M;
            if (ok && options.require_reachable) {
                const GridD h = compute_cost_to_go(ws, g, options.clearance);
                const Cell c = *map.cell_of(s);
                ok = std::isfinite(h(c.y(), c.x()));
            }
            if (ok) {
                ProblemInstance inst;
                inst.map_id = map_id;
                inst.id = i;
                inst.start = make_state(spec, s.x(), s.y(), th);
                inst.goal = g;
                inst.min_separation = M;
                out.push_back(std::move(inst));
                break;
            }
            if (++rejections >= 100000)
                throw InvalidInput(fmt::format("no start/goal pair with separation >= {} after 1e5 attempts", M));
        }
    }
    return out;
}

MapSource make_map_source(std::string id, const GridMap& map) {
    MapSource src;
    src.id = std::move(id);
    auto ws = std::make_shared<Workspace>(map);
    src.axis = std::make_shared<MedialAxis>(compute_medial_axis(*ws));
    src.workspace = std::move(ws);
    return src;
}

MapSource make_map_source(std::string id, const CostMap& costs) {
    MapSource src;
    src.id = std::move(id);
    src.costs = std::make_shared<CostMap>(costs);
    src.workspace = std::make_shared<Workspace>(costs.to_grid_map());
    return src;
}

std::shared_ptr<const GuidanceField> build_field_for(const MapSource& src, const Point& goal, double clearance,
                                                     double K) {
    if (src.costs) {
        CostFieldParams params;
        params.K = K;
        return std::make_shared<CostField>(build_cost_field(*src.costs, goal, params));
    }
    MedialFieldParams params;
    params.clearance = clearance;
    return std::make_shared<GoalField>(build_goal_field(*src.workspace, *src.axis, goal, params));
}

// ---------------------------------------------------------------------------
// Records

std::string format_record(const BenchRecord& r) {
    std::string hist;
    for (std::size_t i = 0; i < r.history.size(); ++i) {
        const auto& h = r.history[i];
        hist += fmt::format("{}({:.17g},{},{:.3f})", i ? ";" : "", h.cost, h.iteration, h.wall_ms);
    }
    std::string line = fmt::format("{}\t{}\t{}\t{}\t{}", r.planner, r.instance, r.seed, r.success ? 1 : 0, hist);
    if (!r.error.empty()) {
        std::string msg = r.error;
        std::replace_if(msg.begin(), msg.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
        line += "\t" + msg;
    }
    return line;
}

BenchRecord parse_record(const std::string& line) {
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
        const auto tab = line.find('\t', pos);
        f.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
        if (tab == std::string::npos) break;
        pos = tab + 1;
    }
    if (f.size() != 5 && f.size() != 6) throw ParseError(fmt::format("record has {} fields, expected 5", f.size()));
    BenchRecord r;
    r.planner = f[0];
    r.instance = f[1];
    try {
        std::size_t used = 0;
        r.seed = std::stoull(f[2], &used);
        if (used != f[2].size()) throw ParseError("bad seed");
    } catch (const std::exception&) {
        throw ParseError(fmt::format("bad seed '{}'", f[2]));
    }
    if (f[3] != "0" && f[3] != "1") throw ParseError(fmt::format("bad success flag '{}'", f[3]));
    r.success = f[3] == "1";
    if (f.size() == 6) r.error = f[5];
    std::size_t p = 0;
    const std::string& h = f[4];
    while (p < h.size()) {
        const auto close = h.find(')', p);
        if (h[p] != '(' || close == std::string::npos) throw ParseError("malformed history triple");
        SolutionRecord s;
        double iter = 0;
        if (std::sscanf(h.substr(p + 1, close - p - 1).c_str(), "%lf,%lf,%lf", &s.cost, &iter, &s.wall_ms) != 3)
            throw ParseError("malformed history triple");
        s.iteration = static_cast<std::int64_t>(iter);
        r.history.push_back(s);
        p = close + 1;
        if (p < h.size()) {
            if (h[p] != ';') throw ParseError("history triples must be ';'-separated");
            ++p;
        }
    }
    if (r.success == r.history.empty()) throw ParseError("success flag disagrees with the history");
    return r;
}

std::vector<BenchRecord> read_records(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput(fmt::format("cannot open records '{}'", path));
    std::vector<BenchRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(parse_record(line));
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("{}:{}: {}", path, lineno, e.what()));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

int resolve_threads(int fallback) {
    if (const char* env = std::getenv("KINOFORGE_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
    }
    return std::max(1, fallback);
}

namespace {

using RunKey = std::tuple<std::string, std::string, std::uint64_t>;

// Keeps only the parseable lines of an interrupted records file.
std::map<RunKey, BenchRecord> salvage_records(const std::string& path) {
    std::map<RunKey, BenchRecord> done;
    std::ifstream is(path);
    if (!is) return done;
    std::string line;
    std::vector<std::string> good;
    while (std::getline(is, line)) {
        try {
            BenchRecord r = parse_record(line);
            RunKey key{r.planner, r.instance, r.seed};
            if (done.emplace(key, std::move(r)).second) good.push_back(line);
        } catch (const ParseError&) {
        }
    }
    is.close();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        for (const auto& l : good) os << l << '\n';
    }
    std::filesystem::rename(tmp, path);
    return done;
}

}  // namespace

std::vector<BenchRecord> run_benchmark(const SystemSpec& spec, const std::vector<PlannerVariant>& variants,
                                       const std::vector<BenchProblem>& problems, const BenchOptions& options) {
    struct Task {
        std::size_t variant, problem;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t v = 0; v < variants.size(); ++v)
        for (std::size_t p = 0; p < problems.size(); ++p)
            for (auto seed : options.seeds) tasks.push_back({v, p, seed});

    std::map<RunKey, BenchRecord> done;
    if (!options.records_path.empty()) {
        if (options.resume)
            done = salvage_records(options.records_path);
        else
            std::ofstream(options.records_path, std::ios::trunc);
    }

    std::vector<BenchRecord> results(tasks.size());
    std::vector<char> pending(tasks.size(), 1);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        auto it = done.find({variants[t.variant].name, problems[t.problem].instance.name(), t.seed});
        if (it != done.end()) {
            results[i] = it->second;
            pending[i] = 0;
        }
    }

    std::ofstream out;
    if (!options.records_path.empty()) out.open(options.records_path, std::ios::app);
    std::mutex write_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            if (!pending[i]) continue;
            const Task& t = tasks[i];
            const PlannerVariant& var = variants[t.variant];
            const BenchProblem& prob = problems[t.problem];
            BenchRecord rec;
            rec.planner = var.name;
            rec.instance = prob.instance.name();
            rec.seed = t.seed;
            try {
                PlannerConfig cfg = var.config;
                cfg.seed = t.seed;
                cfg.record_trace = false;
                const PlanningContext ctx{&spec, prob.workspace.get(), prob.costs.get(), prob.field.get(),
                                          var.controller.get()};
                PlanResult res = plan(ctx, cfg, prob.instance.start);
                rec.history = std::move(res.history);
                rec.success = !rec.history.empty();
            } catch (const std::exception& e) {
                rec.error = e.what();
                rec.success = false;
                rec.history.clear();
            }
            if (out.is_open()) {
                const std::string line = format_record(rec);
                std::lock_guard<std::mutex> lock(write_mutex);
                out << line << '\n';
                out.flush();
            }
            results[i] = std::move(rec);
        }
    };

    const int threads = std::min<int>(resolve_threads(options.threads), std::max<std::size_t>(1, tasks.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

std::vector<double> log_space(double max_value, int points) {
    std::vector<double> v(points);
    const double top = std::log(std::max(1.0, max_value));
    for (int k = 0; k < points; ++k) v[k] = points == 1 ? std::exp(top) : std::exp(top * k / (points - 1));
    v.back() = std::max(1.0, max_value);
    return v;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BudgetGrid log_budget_grid(double max_iterations, double max_ms, int points) {
    if (points < 1) throw InvalidInput("budget grid needs at least one point");
    return {log_space(max_iterations, points), log_space(max_ms, points)};
}

BudgetGrid budget_grid_for(const std::vector<BenchRecord>& records, int points) {
    double it = 1.0, ms = 1.0;
    for (const auto& r : records)
        for (const auto& h : r.history) {
            it = std::max(it, static_cast<double>(h.iteration));
            ms = std::max(ms, h.wall_ms);
        }
    return log_budget_grid(it, ms, points);
}

std::map<std::string, double> instance_best_costs(const std::vector<BenchRecord>& records) {
    std::map<std::string, double> best;
    for (const auto& r : records) {
        auto [it, inserted] = best.emplace(r.instance, kInf);
        for (const auto& h : r.history) it->second = std::min(it->second, h.cost);
    }
    return best;
}

std::optional<double> cost_at_budget(const BenchRecord& r, bool time_axis, double budget) {
    std::optional<double> c;
    for (const auto& h : r.history) {
        const double at = time_axis ? h.wall_ms : static_cast<double>(h.iteration);
        if (at <= budget) c = c ? std::min(*c, h.cost) : h.cost;
    }
    return c;
}

std::vector<SummaryRow> aggregate(const std::vector<BenchRecord>& records, const BudgetGrid& grid) {
    const auto best = instance_best_costs(records);
    std::vector<std::string> planners;
    for (const auto& r : records)
        if (std::find(planners.begin(), planners.end(), r.planner) == planners.end()) planners.push_back(r.planner);

    std::vector<SummaryRow> rows;
    for (const auto& name : planners) {
        std::vector<const BenchRecord*> runs;
        for (const auto& r : records)
            if (r.planner == name) runs.push_back(&r);
        for (int axis = 0; axis < 2; ++axis) {
            const bool time_axis = axis == 1;
            for (double b : time_axis ? grid.time_ms : grid.iterations) {
                std::vector<double> norm;
                for (const auto* r : runs) {
                    const auto c = cost_at_budget(*r, time_axis, b);
                    if (!c) continue;
                    const double div = best.at(r->instance);
                    norm.push_back(div > 0 ? *c / div : 1.0);
                }
                SummaryRow row;
                row.planner = name;
                row.budget_type = time_axis ? "time_ms" : "iterations";
                row.budget = b;
                row.n = static_cast<int>(runs.size());
                row.success_ratio = runs.empty() ? 0.0 : static_cast<double>(norm.size()) / runs.size();
                if (!norm.empty()) {
                    row.mean_norm_cost = std::accumulate(norm.begin(), norm.end(), 0.0) / norm.size();
                    row.median_norm_cost = median_of(norm);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

namespace {

std::string opt_text(const std::optional<double>& v) { return v ? fmt::format("{:.6g}", *v) : ""; }

struct Curve {
    std::string planner;
    std::vector<double> x;
    std::vector<std::optional<double>> y;
};

std::vector<Curve> curves_of(const std::vector<SummaryRow>& rows, const std::string& type, bool cost) {
    std::vector<Curve> out;
    for (const auto& r : rows) {
        if (r.budget_type != type) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const Curve& c) { return c.planner == r.planner; });
        if (it == out.end()) {
            out.push_back({r.planner, {}, {}});
            it = std::prev(out.end());
        }
        it->x.push_back(r.budget);
        it->y.push_back(cost ? r.median_norm_cost : std::optional<double>(r.success_ratio));
    }
    return out;
}

std::string curve_csv(const std::vector<Curve>& curves) {
    if (curves.empty()) return "budget\n";
    std::string s = "budget";
    for (const auto& c : curves) s += "," + c.planner;
    s += "\n";
    for (std::size_t i = 0; i < curves.front().x.size(); ++i) {
        s += fmt::format("{:.6g}", curves.front().x[i]);
        for (const auto& c : curves) s += "," + (i < c.y.size() ? opt_text(c.y[i]) : std::string());
        s += "\n";
    }
    return s;
}

std::string curve_svg(const std::vector<Curve>& curves, const std::string& xlabel, const std::string& ylabel) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
    const double W = 480, H = 320, L = 60, R = 20, T = 20, B = 45;
    double xmax = 1.0, ymin = kInf, ymax = -kInf;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            xmax = std::max(xmax, c.x[i]);
            if (c.y[i]) ymin = std::min(ymin, *c.y[i]), ymax = std::max(ymax, *c.y[i]);
        }
    if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
    if (ymax - ymin < 1e-9) ymin -= 0.5, ymax += 0.5;
    const double lx = std::log10(std::max(xmax, 1.0 + 1e-9));
    auto px = [&](double x) { return L + (W - L - R) * std::log10(std::max(x, 1.0)) / lx; };
    auto py = [&](double y) { return H - B - (H - T - B) * (y - ymin) / (ymax - ymin); };

    svg::Document doc(W, H);
    doc.rect(0, 0, W, H, "white");
    doc.line(L, H - B, W - R, H - B, "black", 1);
    doc.line(L, T, L, H - B, "black", 1);
    for (int k = 0; k <= 4; ++k) {
        const double y = ymin + (ymax - ymin) * k / 4.0;
        doc.line(L - 4, py(y), L, py(y), "black", 1);
        doc.text(L - 6, py(y) + 3, fmt::format("{:.3g}", y), 9, "end");
    }
    for (int e = 0; std::pow(10.0, e) <= xmax * 1.0001; ++e) {
        const double x = std::pow(10.0, e);
        doc.line(px(x), H - B, px(x), H - B + 4, "black", 1);
        doc.text(px(x), H - B + 15, fmt::format("{:g}", x), 9, "middle");
    }
    doc.text((L + W - R) / 2, H - 8, xlabel, 11, "middle");
    doc.raw(fmt::format("<text x=\"12\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"middle\" "
                        "transform=\"rotate(-90 12 {:.1f})\">{}</text>\n",
                        (T + H - B) / 2, (T + H - B) / 2, svg::escape(ylabel)));
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const char* color = palette[k % std::size(palette)];
        std::vector<Point> pts;
        auto flush = [&] {
            if (pts.size() > 1) doc.polyline(pts, color, 1.5);
            pts.clear();
        };
        for (std::size_t i = 0; i < curves[k].x.size(); ++i) {
            if (!curves[k].y[i]) {
                flush();
                continue;
            }
            pts.emplace_back(px(curves[k].x[i]), py(*curves[k].y[i]));
        }
        flush();
        doc.line(W - R - 110, T + 10 + 14 * k, W - R - 90, T + 10 + 14 * k, color, 2);
        doc.text(W - R - 86, T + 14 + 14 * k, curves[k].planner, 10);
    }
    return doc.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p);
    if (!os) throw InvalidInput(fmt::format("cannot write '{}'", p.string()));
    os << text;
}

}  // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string s = "planner,budget_type,budget,success_ratio,mean_norm_cost,median_norm_cost,n\n";
    for (const auto& r : rows)
        s += fmt::format("{},{},{:.6g},{:.6g},{},{},{}\n", r.planner, r.budget_type, r.budget, r.success_ratio,
                         opt_text(r.mean_norm_cost), opt_text(r.median_norm_cost), r.n);
    return s;
}

std::vector<std::string> emit_figures(const std::vector<SummaryRow>& rows, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    write_text(fs::path(dir) / "summary.csv", summary_csv(rows));
    written.push_back("summary.csv");
    for (const auto& [type, xlabel] : {std::pair<std::string, std::string>{"iterations", "iterations"},
                                       std::pair<std::string, std::string>{"time_ms", "wall time (ms)"}})
        for (bool cost : {false, true}) {
            const auto curves = curves_of(rows, type, cost);
            const std::string stem = fmt::format("{}_vs_{}", cost ? "cost" : "success", type);
            write_text(fs::path(dir) / (stem + ".csv"), curve_csv(curves));
            write_text(fs::path(dir) / (stem + ".svg"),
                       curve_svg(curves, xlabel, cost ? "median normalized cost" : "success ratio"));
            written.push_back(stem + ".csv");
            written.push_back(stem + ".svg");
        }
    return written;
}

// ---------------------------------------------------------------------------
// Desk maps

GridMap empty_map(int width, int height) { return GridMap(width, height); }

GridMap city_map(int width, int height, Rng& rng) {
    GridMap map(width, height);
    auto bands = [&](int extent) {
        std::vector<char> street(extent, 0);  // 1 = street
        int pos = 1;
        bool is_street = true;
        while (pos < extent - 1) {
            const int len = is_street ? std::uniform_int_distribution<int>(2, 4)(rng)
                                      : std::uniform_int_distribution<int>(5, 10)(rng);
            const int end = std::min(extent - 1, pos + len);
            for (int i = pos; i < end; ++i) street[i] = is_street;
            pos = end;
            is_street = !is_street;
        }
        // Always leave a street along the far edge.
        for (int i = std::max(1, extent - 3); i < extent - 1; ++i) street[i] = 1;
        return street;
    };
    const auto col_street = bands(width);
    const auto row_street = bands(height);

    // Collect blocks as maximal runs of non-street rows x columns.
    auto runs = [](const std::vector<char>& street) {
        std::vector<std::pair<int, int>> r;
        for (int i = 1; i < static_cast<int>(street.size()) - 1;) {
            if (street[i]) {
                ++i;
                continue;
            }
            int j = i;
            while (j < static_cast<int>(street.size()) - 1 && !street[j]) ++j;
            r.emplace_back(i, j);
            i = j;
        }
        return r;
    };
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto [y0, y1] : runs(row_street))
        for (auto [x0, x1] : runs(col_street)) {
            if (unit(rng) < 0.15) continue;  // open plaza
            int bx0 = x0, bx1 = x1, by0 = y0, by1 = y1;
            if (unit(rng) < 0.4) {
                switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
                    case 0: bx0 += 1; break;
                    case 1: bx1 -= 1; break;
                    case 2: by0 += 1; break;
                    default: by1 -= 1; break;
                }
            }
            for (int y = by0; y < by1; ++y)
                for (int x = bx0; x < bx1; ++x) map.set_occupied(x, y);
            // Occasional alley through the block.
            if (unit(rng) < 0.3 && bx1 - bx0 >= 6) {
                const int ax = std::uniform_int_distribution<int>(bx0 + 2, bx1 - 3)(rng);
                for (int y = by0; y < by1; ++y) map.set_occupied(ax, y, false), map.set_occupied(ax + 1, y, false);
            }
        }
    return map;
}

GridMap random_rect_map(int width, int height, double fill, Rng& rng) {
    GridMap map(width, height);
    const int interior = std::max(1, (width - 2) * (height - 2));
    std::uniform_int_distribution<int> size(2, 8);
    int guard = 0;
    while (static_cast<double>(map.occupied_count()) / interior < fill && ++guard < 10000) {
        const int w = size(rng), h = size(rng);
        if (w >= width - 2 || h >= height - 2) continue;
        const int x0 = std::uniform_int_distribution<int>(1, width - 1 - w)(rng);
        const int y0 = std::uniform_int_distribution<int>(1, height - 1 - h)(rng);
        for (int y = y0; y < y0 + h; ++y)
            for (int x = x0; x < x0 + w; ++x) map.set_occupied(x, y);
    }
    return map;
}

CostMap random_cost_map(int width, int height, int bumps, Rng& rng) {
    CostMap costs(width, height);
    GridD acc = GridD::Zero(height, width);
    std::uniform_real_distribution<double> ux(0, width), uy(0, height), amp(0.2, 0.6), sig(3.0, 10.0);
    for (int b = 0; b < bumps; ++b) {
        const double cx = ux(rng), cy = uy(rng), a = amp(rng), s = sig(rng);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                acc(y, x) += a * std::exp(-(dx * dx + dy * dy) / (2 * s * s));
            }
    }
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) costs.set(x, y, std::min(acc(y, x), 0.95));
    const int blobs = std::max(1, bumps / 4);
    std::uniform_real_distribution<double> rad(1.5, 3.5);
    for (int b = 0; b < blobs; ++b) {
        const double cx = ux(rng), cy = uy(rng), r = rad(rng);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                if (std::hypot(x + 0.5 - cx, y + 0.5 - cy) <= r) costs.set(x, y, 1.0);
    }
    return costs;
}

}  // namespace kinoforge
