#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kinoforge/dynamics.hpp"

namespace kinoforge {

struct ControllerQuery {
    StateVec state;
    Point goal = Point::Zero();
    std::optional<double> goal_heading;
};

/// Goal-conditioned controller: maps (state, local goal) to a plan.
class Controller {
public:
    virtual ~Controller() = default;
    /// The returned plan is non-empty, every control within bounds, every duration > 0.
    virtual PiecewisePlan plan(const SystemSpec& spec, const ControllerQuery& query, Rng& rng) const = 0;
    virtual std::string name() const = 0;
    /// False for controllers that ignore the goal.
    virtual bool uses_goal() const { return true; }
};

RelativeObservation observe(const ControllerQuery& query);

// ---------------------------------------------------------------------------

class RandomController final : public Controller {
public:
    RandomController(double min_duration, double max_duration);
    PiecewisePlan plan(const SystemSpec& spec, const ControllerQuery& query, Rng& rng) const override;
    std::string name() const override { return "random"; }
    bool uses_goal() const override { return false; }

private:
    double min_duration_;
    double max_duration_;
};

/// Min/mid/max per control dimension, dimension 0 varying slowest.
std::vector<Control> control_grid_3(const SystemSpec& spec);

/// Enumerates the 3^2 control grid for one edge duration and keeps the control
/// whose end position is closest to the goal; ties go to the lowest grid index.
class GreedyOracle final : public Controller {
public:
    explicit GreedyOracle(double edge_duration = 0.5) : edge_duration_(edge_duration) {}
    PiecewisePlan plan(const SystemSpec& spec, const ControllerQuery& query, Rng& rng) const override;
    std::string name() const override { return "greedy"; }

private:
    double edge_duration_;
};

// ---------------------------------------------------------------------------
// Lookup-table inverse dynamics

struct SlcMetric {
    double position = 1.0;
    double angle = 0.5;
    double velocity = 0.25;
};

struct SlcEntry {
    int plan_index = 0;
    int initial_index = 0;
    PlanSegment plan;
    Eigen::Vector2d initial_velocity = Eigen::Vector2d::Zero();  // (v0, omega0); zero for first order
    StateVec end;                                                 // end state reached from the canonical origin
};

struct SlcTable {
    SystemSpec spec;
    std::vector<PlanSegment> plans;               // the discretized plan set
    std::vector<Eigen::Vector2d> initial_samples;  // non-invariant initial components
    double neighborhood_radius = 0.05;
    SlcMetric metric;
    std::vector<SlcEntry> entries;  // one best plan per occupied neighbourhood

    /// Query key (dx, dy, dtheta, v0, omega0) of an entry.
    RelativeObservation key(const SlcEntry& e) const;
    double distance(const RelativeObservation& a, const RelativeObservation& b) const;
    std::size_t nearest(const RelativeObservation& query) const;
};

struct SlcGridSpec {
    int values_per_dimension = 5;
    std::vector<double> durations{0.5, 1.0, 1.5, 2.0};
};

SlcTable build_slc_table(const SystemSpec& spec, const SlcGridSpec& grid, int initial_samples, double r_nn, Rng& rng);
/// Nearest stored end state under the weighted metric; throws on an empty table.
PiecewisePlan slc_query(const SlcTable& table, const RelativeObservation& delta);
/// Largest deviation between a stored end state and a fresh propagation of its plan.
double audit_slc_table(const SlcTable& table);

void save_slc_table(const std::string& path, const SlcTable& table);
SlcTable load_slc_table(const std::string& path);

class SlcController final : public Controller {
public:
    explicit SlcController(std::shared_ptr<const SlcTable> table) : table_(std::move(table)) {}
    PiecewisePlan plan(const SystemSpec& spec, const ControllerQuery& query, Rng& rng) const override;
    std::string name() const override { return "slc"; }
    const SlcTable& table() const { return *table_; }

private:
    std::shared_ptr<const SlcTable> table_;
};

// ---------------------------------------------------------------------------
// MLP policy inference

enum class Activation { relu, tanh, linear };

struct MlpLayer {
    Eigen::MatrixXd weight;  // rows = outputs, cols = inputs
    Eigen::VectorXd bias;
    Activation activation = Activation::linear;
};

struct MlpPolicy {
    SystemId system = SystemId::first_order;
    int obs_dim = 0;
    int act_dim = 0;
    Eigen::VectorXd obs_offset;  // normalized = (obs - offset) / scale
    Eigen::VectorXd obs_scale;
    std::vector<MlpLayer> layers;
    bool tanh_squash = true;
    Eigen::VectorXd act_low;
    Eigen::VectorXd act_high;

    /// Throws InvalidInput naming the offending layer.
    void validate() const;
};

Eigen::VectorXd mlp_forward(const MlpPolicy& policy, const Eigen::VectorXd& obs);

std::string serialize_policy(const MlpPolicy& policy);
MlpPolicy parse_policy(const std::string& text);
void save_policy(const std::string& path, const MlpPolicy& policy);
MlpPolicy load_policy(const std::string& path);

class PolicyController final : public Controller {
public:
    PolicyController(MlpPolicy policy, double edge_duration);
    PiecewisePlan plan(const SystemSpec& spec, const ControllerQuery& query, Rng& rng) const override;
    std::string name() const override { return "policy"; }

private:
    MlpPolicy policy_;
    double edge_duration_;
};

}  // namespace kinoforge
