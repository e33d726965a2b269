#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace kinoforge {

// State vectors never exceed five components, so they live on the stack.
using StateVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 5, 1>;
using Control = Eigen::Vector2d;
using Point = Eigen::Vector2d;
using Rng = std::mt19937_64;

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SystemId { first_order, second_order };

std::string_view to_string(SystemId id);
SystemId parse_system_id(std::string_view name);

struct Interval {
    double lo = -1.0;
    double hi = 1.0;

    double mid() const { return 0.5 * (lo + hi); }
    double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

struct SystemSpec {
    SystemId id = SystemId::first_order;
    int state_dim = 3;
    int control_dim = 2;
    std::array<Interval, 2> control_bounds{};
    // Only meaningful for the second-order model: bounds on (v, omega).
    std::array<Interval, 2> velocity_bounds{};
    double integration_substep = 0.05;

    static SystemSpec first_order();
    static SystemSpec second_order();
    static SystemSpec make(SystemId id);

    void validate() const;
    bool has_velocity_state() const { return id == SystemId::second_order; }
    // Largest forward speed the system can reach; used to turn path length into time.
    double max_speed() const;
    bool control_in_bounds(const Control& u, double tol = 1e-12) const;
};

struct PlanSegment {
    Control control = Control::Zero();
    double duration = 0.0;
};

using PiecewisePlan = std::vector<PlanSegment>;

double total_duration(const PiecewisePlan& plan);

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVec> states;
    PiecewisePlan plan;

    double duration() const { return times.empty() ? 0.0 : times.back(); }
    const StateVec& start() const { return states.front(); }
    const StateVec& end() const { return states.back(); }
    std::size_t size() const { return states.size(); }
};

// Goal expressed in the robot body frame, plus the velocity components that
// are not invariant under rigid motions.
struct RelativeObservation {
    double dx = 0.0;
    double dy = 0.0;
    double dtheta = 0.0;
    double v = 0.0;
    double omega = 0.0;

    // (dx, dy, dtheta) for first order, (dx, dy, dtheta, v, omega) for second order.
    Eigen::VectorXd to_vector(const SystemSpec& spec) const;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Time derivative of the unicycle model.
StateVec state_derivative(const SystemSpec& spec, const StateVec& x, const Control& u);

/// Fixed-step RK4 integration of a constant control for `duration` seconds.
/// Samples every integration substep; the last step is shortened when the
/// duration is not a multiple of the substep. Second-order velocities are
/// clamped after every step and the heading is kept in (-pi, pi].
Trajectory propagate(const SystemSpec& spec, const StateVec& x0, const Control& u, double duration);

/// Concatenation of per-segment propagations.
Trajectory propagate_plan(const SystemSpec& spec, const StateVec& x0, const PiecewisePlan& plan);

/// End state only; avoids storing the samples.
StateVec propagate_end(const SystemSpec& spec, const StateVec& x0, const Control& u, double duration);

RelativeObservation to_relative_frame(const StateVec& s, const StateVec& goal);
/// Position-only goal; the goal heading is taken as the bearing from s to the goal.
RelativeObservation to_relative_frame(const StateVec& s, const Point& goal);

/// Builds a state of the right dimension with zero velocities.
StateVec make_state(const SystemSpec& spec, double x, double y, double theta);

struct WorkspaceBox {
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;
};

StateVec sample_state(const SystemSpec& spec, const WorkspaceBox& box, Rng& rng);
Control sample_control(const SystemSpec& spec, Rng& rng);

/// Writes the golden-trajectory text format: header `system=<id> substep=<s>`
/// then one `t x y theta [v omega]` line per sample, 12 significant digits.
void write_golden_trajectory(std::ostream& os, const SystemSpec& spec, const Trajectory& traj);

}  // namespace kinoforge
