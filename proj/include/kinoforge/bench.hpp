#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kinoforge/controllers.hpp"
#include "kinoforge/field.hpp"
#include "kinoforge/field_costmap.hpp"
#include "kinoforge/field_medial.hpp"
#include "kinoforge/geom_env.hpp"
#include "kinoforge/planner.hpp"

namespace kinoforge {

struct ProblemInstance {
    std::string map_id;
    int id = 0;
    StateVec start;
    Point goal = Point::Zero();
    double min_separation = 0.0;

    std::string name() const;  // "<map_id>#<id>"
};

struct InstanceOptions {
    double min_separation = -1.0;  // < 0 selects 25% of the map diagonal
    double clearance = 0.5;        // start and goal need clearance above this
    bool require_reachable = true;  // start must have finite cost-to-go towards the goal
};

/// Rejection-samples start/goal pairs; throws InvalidInput when M exceeds the
/// map diagonal or after 1e5 consecutive rejections.
std::vector<ProblemInstance> generate_instances(const Workspace& ws, const SystemSpec& spec, const std::string& map_id,
                                                int count, const InstanceOptions& options, Rng& rng);

struct BenchRecord {
    std::string planner;
    std::string instance;
    std::uint64_t seed = 0;
    bool success = false;
    std::string error;  // non-empty when the run threw
    std::vector<SolutionRecord> history;
};

std::string format_record(const BenchRecord& r);
BenchRecord parse_record(const std::string& line);
std::vector<BenchRecord> read_records(const std::string& path);

/// A benchmark map with what field construction needs precomputed.
struct MapSource {
    std::string id;
    std::shared_ptr<const Workspace> workspace;
    std::shared_ptr<const CostMap> costs;     // set for cost maps
    std::shared_ptr<const MedialAxis> axis;   // set for obstacle maps
};

MapSource make_map_source(std::string id, const GridMap& map);
/// Cost maps plan on the obstacle grid of their c_tv == 1 cells.
MapSource make_map_source(std::string id, const CostMap& costs);

/// Medial-axis goal field for obstacle maps, any-angle cost field for cost maps.
std::shared_ptr<const GuidanceField> build_field_for(const MapSource& src, const Point& goal, double clearance,
                                                     double K);

struct PlannerVariant {
    std::string name;
    PlannerConfig config;
    std::shared_ptr<const Controller> controller;
};

struct BenchProblem {
    ProblemInstance instance;
    std::shared_ptr<const Workspace> workspace;
    std::shared_ptr<const CostMap> costs;
    std::shared_ptr<const GuidanceField> field;
};

struct BenchOptions {
    std::vector<std::uint64_t> seeds;
    int threads = 1;            // KINOFORGE_THREADS overrides when set
    std::string records_path;   // empty: keep records in memory only
    bool resume = true;         // skip runs already present in records_path
};

/// Worker count from KINOFORGE_THREADS, else `fallback`.
int resolve_threads(int fallback);

/// Full cross product of variants x problems x seeds. Records are appended to
/// the records file as runs finish; a failing run is recorded, never fatal.
/// Returned records are in task order regardless of completion order.
std::vector<BenchRecord> run_benchmark(const SystemSpec& spec, const std::vector<PlannerVariant>& variants,
                                       const std::vector<BenchProblem>& problems, const BenchOptions& options);

struct BudgetGrid {
    std::vector<double> iterations;
    std::vector<double> time_ms;
};

/// `points` log-spaced budgets from 1 to each maximum.
BudgetGrid log_budget_grid(double max_iterations, double max_ms, int points = 50);
/// Grid reaching the largest iteration count and wall time seen in the records.
BudgetGrid budget_grid_for(const std::vector<BenchRecord>& records, int points = 50);

struct SummaryRow {
    std::string planner;
    std::string budget_type;  // "iterations" or "time_ms"
    double budget = 0.0;
    double success_ratio = 0.0;
    std::optional<double> mean_norm_cost;
    std::optional<double> median_norm_cost;
    int n = 0;  // runs of this planner
};

/// Best solution cost per instance over all planners and seeds.
std::map<std::string, double> instance_best_costs(const std::vector<BenchRecord>& records);
/// Cost a run holds once `budget` is spent on the given axis, or nullopt.
std::optional<double> cost_at_budget(const BenchRecord& r, bool time_axis, double budget);

std::vector<SummaryRow> aggregate(const std::vector<BenchRecord>& records, const BudgetGrid& grid);

std::string summary_csv(const std::vector<SummaryRow>& rows);
/// summary.csv, one CSV and one SVG chart per curve into `dir`; returns written file names.
std::vector<std::string> emit_figures(const std::vector<SummaryRow>& rows, const std::string& dir);

// ---------------------------------------------------------------------------
// Desk-scale maps

GridMap empty_map(int width, int height);
/// Street grid with irregular building blocks, loosely like the city benchmarks.
GridMap city_map(int width, int height, Rng& rng);
/// Scattered rectangular obstacles covering roughly `fill` of the interior.
GridMap random_rect_map(int width, int height, double fill, Rng& rng);
/// Smooth traversability field built from Gaussian bumps plus a few blocked blobs.
CostMap random_cost_map(int width, int height, int bumps, Rng& rng);

}  // namespace kinoforge
