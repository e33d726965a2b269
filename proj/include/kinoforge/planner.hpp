#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kinoforge/controllers.hpp"
#include "kinoforge/field.hpp"
#include "kinoforge/geom_env.hpp"

namespace kinoforge {

enum class ExpansionStrategy { random, slc, rlc };

std::string_view to_string(ExpansionStrategy s);
ExpansionStrategy parse_expansion_strategy(std::string_view name);

struct PlannerConfig {
    ExpansionStrategy strategy = ExpansionStrategy::rlc;
    int blossom = 5;
    std::int64_t max_iterations = 5000;  // 0 = unlimited
    double time_budget = 0.0;            // seconds, 0 = unlimited
    double goal_tolerance = 1.5;
    double goal_bias = 0.05;
    std::uint64_t seed = 0;
    double edge_duration = 0.5;
    double dominance_radius = 0.5;
    // Nodes only dominate each other when their headings differ by at most this.
    double dominance_heading = M_PI / 4;
    double selection_radius = 5.0;
    double explore_radius = 5.0;
    double robot_radius = 0.5;
    // Candidate 1 of a node's first blossom heads for the field's local goal.
    bool informed_first_goal = true;
    // A child that lowers the heuristic is expanded next without sampling.
    bool greedy_continuation = true;
    CostMode cost_mode = CostMode::duration;
    double K = 4.68;
    bool record_trace = true;
    // Trace lines carry wall-clock milliseconds; off keeps traces byte-stable.
    bool trace_wall_time = false;
    // Plans drawn from for exploratory goals under the slc strategy.
    std::shared_ptr<const SlcTable> slc_table;

    void validate() const;
};

struct Candidate {
    PiecewisePlan plan;
    Trajectory trajectory;
    double h = kInf;
};

struct TreeNode {
    StateVec state;
    int parent = -1;
    PiecewisePlan edge;  // plan from the parent
    double g = 0.0;
    double h = kInf;
    int expansion_count = 0;
    std::vector<Candidate> pending;  // best first
    bool dominated = false;
    bool in_goal = false;
};

struct Tree {
    std::vector<TreeNode> nodes;

    const TreeNode& root() const { return nodes.front(); }
    std::size_t size() const { return nodes.size(); }
};

struct SolutionRecord {
    double cost = kInf;
    std::int64_t iteration = 0;
    double wall_ms = 0.0;
    int node = -1;
};

struct Solution {
    Trajectory trajectory;
    double cost = kInf;
    std::int64_t iteration = 0;
    double wall_ms = 0.0;
};

enum class TraceEvent { extend, reject, solution };

struct TraceRecord {
    std::int64_t iteration = 0;
    double wall_ms = 0.0;
    TraceEvent event = TraceEvent::extend;
    int node = -1;
    int parent = -1;
    double cost = 0.0;
};

struct PlannerStats {
    std::int64_t iterations = 0;  // forward propagations of candidate edges
    std::int64_t loops = 0;       // select/expand/extend rounds
    std::int64_t blossoms = 0;
    std::int64_t informed_goals = 0;
    std::int64_t extended = 0;
    std::int64_t rejected = 0;
    std::int64_t pruned = 0;
    std::int64_t dominated = 0;
    double wall_ms = 0.0;
};

struct PlanResult {
    Tree tree;
    std::vector<SolutionRecord> history;  // strictly decreasing costs
    std::optional<Solution> best;
    std::vector<TraceRecord> trace;
    PlannerStats stats;

    bool solved() const { return best.has_value(); }
};

/// Everything a planning run reads; all members are shared read-only.
struct PlanningContext {
    const SystemSpec* spec = nullptr;
    const Workspace* workspace = nullptr;
    const CostMap* costs = nullptr;  // required in cost-map mode
    const GuidanceField* field = nullptr;
    const Controller* controller = nullptr;
};

/// Tree search state for one run. The free functions below drive it; plan()
/// runs the full loop.
class Planner {
public:
    Planner(const PlanningContext& ctx, const PlannerConfig& config, const StateVec& start);

    /// Radius-filtered argmin of g + h around a sampled point; ties go to the
    /// most recently added node.
    int select_node(Rng& rng);
    int select_near(const Point& q) const;
    /// Pops the best pending candidate, or generates and ranks a new blossom.
    Candidate expand_node(int node, Rng& rng);
    /// Collision/traversability check, insertion and dominance pruning.
    /// Returns the new node id or -1 when rejected.
    int extend_tree(int node, const Candidate& candidate);

    double heuristic(const StateVec& s) const;
    bool selectable(int node) const;
    /// Trajectory from the root to `node`, re-propagated from the stored plans.
    Trajectory path_to(int node) const;

    const Tree& tree() const { return tree_; }
    Tree& tree() { return tree_; }
    const PlannerStats& stats() const { return stats_; }
    double best_cost() const { return best_cost_; }
    void set_best_cost(double c) { best_cost_ = c; }
    std::int64_t iterations() const { return stats_.iterations; }

private:
    friend PlanResult plan(const PlanningContext&, const PlannerConfig&, const StateVec&);

    struct Bucket {
        std::vector<int> ids;
    };

    Candidate make_candidate(int node, const ControllerQuery& query, const Controller& controller, Rng& rng);
    ControllerQuery exploratory_query(const TreeNode& n, Rng& rng) const;
    void index_insert(int id);
    void index_erase(int id);
    int bucket_of(const Point& p) const;
    template <typename Fn>
    void for_each_near(const Point& p, double radius, Fn&& fn) const;

    PlanningContext ctx_;
    PlannerConfig config_;
    RandomController random_controller_;
    Tree tree_;
    PlannerStats stats_;
    double best_cost_ = kInf;
    double v_max_ = 1.0;
    double bucket_size_ = 5.0;
    int buckets_x_ = 1;
    int buckets_y_ = 1;
    std::vector<Bucket> buckets_;  // selectable-candidate index
};

/// Runs select/expand/extend until the iteration or time budget is spent.
/// Throws InvalidInput when the start is in collision.
PlanResult plan(const PlanningContext& ctx, const PlannerConfig& config, const StateVec& start);

/// One line per record: `iteration wall_ms event node parent cost`; wall_ms is
/// `-` unless the config asked for wall-clock tracing.
void write_trace(std::ostream& os, const PlanResult& result, bool wall_time);
/// Solution header and the trajectory samples `t x y theta [v omega]`.
void write_solution(std::ostream& os, const PlanResult& result, const SystemSpec& spec);
/// Obstacles, tree edges in gray and the best solution in red.
std::string tree_svg(const Workspace& ws, const PlanResult& result, const SystemSpec& spec, const Point& goal,
                     double goal_tolerance, const CostMap* costs = nullptr);

}  // namespace kinoforge
