#include "kinoforge/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

namespace kinoforge {

std::string_view to_string(SystemId id) {
    return id == SystemId::first_order ? "first_order" : "second_order";
}

SystemId parse_system_id(std::string_view name) {
    if (name == "first_order") return SystemId::first_order;
    if (name == "second_order") return SystemId::second_order;
    throw InvalidInput(fmt::format("unknown system id '{}'", name));
}

SystemSpec SystemSpec::first_order() {
    SystemSpec s;
    s.id = SystemId::first_order;
    s.state_dim = 3;
    s.control_dim = 2;
    s.control_bounds = {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}};
    s.velocity_bounds = {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}};
    return s;
}

SystemSpec SystemSpec::second_order() {
    SystemSpec s;
    s.id = SystemId::second_order;
    s.state_dim = 5;
    s.control_dim = 2;
    s.control_bounds = {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}};
    s.velocity_bounds = {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}};
    return s;
}

SystemSpec SystemSpec::make(SystemId id) {
    return id == SystemId::first_order ? first_order() : second_order();
}

void SystemSpec::validate() const {
    const int want_state = id == SystemId::first_order ? 3 : 5;
    if (state_dim != want_state || control_dim != 2)
        throw InvalidInput(fmt::format("{}: expected state_dim={} control_dim=2", to_string(id), want_state));
    if (!(integration_substep > 0.0)) throw InvalidInput("integration_substep must be positive");
    for (const auto& b : control_bounds)
        if (!(b.lo < b.hi)) throw InvalidInput("control bounds need min < max");
    if (has_velocity_state())
        for (const auto& b : velocity_bounds)
            if (!(b.lo < b.hi)) throw InvalidInput("velocity bounds need min < max");
}

double SystemSpec::max_speed() const {
    const Interval& v = has_velocity_state() ? velocity_bounds[0] : control_bounds[0];
    return std::max(std::abs(v.lo), std::abs(v.hi));
}

bool SystemSpec::control_in_bounds(const Control& u, double tol) const {
    for (int i = 0; i < 2; ++i)
        if (u[i] < control_bounds[i].lo - tol || u[i] > control_bounds[i].hi + tol) return false;
    return true;
}

double total_duration(const PiecewisePlan& plan) {
    double t = 0.0;
    for (const auto& seg : plan) t += seg.duration;
    return t;
}

Eigen::VectorXd RelativeObservation::to_vector(const SystemSpec& spec) const {
    Eigen::VectorXd o(spec.state_dim);
    o[0] = dx;
    o[1] = dy;
    o[2] = dtheta;
    if (spec.has_velocity_state()) {
        o[3] = v;
        o[4] = omega;
    }
    return o;
}

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    if (a > -pi && a <= pi) return a;
    a = std::remainder(a, 2.0 * pi);  // [-pi, pi]
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

StateVec state_derivative(const SystemSpec& spec, const StateVec& x, const Control& u) {
    StateVec dx(x.size());
    const double c = std::cos(x[2]);
    const double s = std::sin(x[2]);
    if (spec.has_velocity_state()) {
        dx << x[3] * c, x[3] * s, x[4], u[0], u[1];
    } else {
        dx << u[0] * c, u[0] * s, u[1];
    }
    return dx;
}

namespace {

void check_finite(const StateVec& x, int dim) {
    if (x.size() != dim) throw InvalidInput(fmt::format("state has {} components, expected {}", x.size(), dim));
    if (!x.allFinite()) throw InvalidInput("non-finite state");
}

StateVec rk4_step(const SystemSpec& spec, const StateVec& x, const Control& u, double h) {
    const StateVec k1 = state_derivative(spec, x, u);
    const StateVec k2 = state_derivative(spec, x + 0.5 * h * k1, u);
    const StateVec k3 = state_derivative(spec, x + 0.5 * h * k2, u);
    const StateVec k4 = state_derivative(spec, x + h * k3, u);
    StateVec next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (spec.has_velocity_state()) {
        next[3] = spec.velocity_bounds[0].clamp(next[3]);
        next[4] = spec.velocity_bounds[1].clamp(next[4]);
    }
    return next;
}

// Number of steps for `duration`, tolerating round-off so that e.g. 1.0/0.05
// does not produce a spurious sliver step.
int step_count(double duration, double h) {
    const double n = duration / h;
    const double rounded = std::round(n);
    if (std::abs(n - rounded) < 1e-9 * std::max(1.0, n)) return std::max(1, static_cast<int>(rounded));
    return static_cast<int>(std::ceil(n));
}

template <typename Sink>
StateVec integrate(const SystemSpec& spec, const StateVec& x0, const Control& u, double duration, Sink&& sink) {
    const double h = spec.integration_substep;
    const int n = step_count(duration, h);
    StateVec x = x0;
    x[2] = wrap_angle(x[2]);
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        const double step = (i + 1 == n) ? duration - t : h;
        x = rk4_step(spec, x, u, step);
        x[2] = wrap_angle(x[2]);
        t = (i + 1 == n) ? duration : t + h;
        sink(t, x);
    }
    return x;
}

}  // namespace

Trajectory propagate(const SystemSpec& spec, const StateVec& x0, const Control& u, double duration) {
    check_finite(x0, spec.state_dim);
    if (!u.allFinite()) throw InvalidInput("non-finite control");
    if (!(duration > 0.0)) throw InvalidInput("propagation duration must be positive");
    Trajectory traj;
    const int n = step_count(duration, spec.integration_substep);
    traj.times.reserve(n + 1);
    traj.states.reserve(n + 1);
    StateVec start = x0;
    start[2] = wrap_angle(start[2]);
    traj.times.push_back(0.0);
    traj.states.push_back(start);
    integrate(spec, start, u, duration, [&](double t, const StateVec& x) {
        traj.times.push_back(t);
        traj.states.push_back(x);
    });
    traj.plan.push_back({u, duration});
    return traj;
}

StateVec propagate_end(const SystemSpec& spec, const StateVec& x0, const Control& u, double duration) {
    check_finite(x0, spec.state_dim);
    if (!(duration > 0.0)) throw InvalidInput("propagation duration must be positive");
    return integrate(spec, x0, u, duration, [](double, const StateVec&) {});
}

Trajectory propagate_plan(const SystemSpec& spec, const StateVec& x0, const PiecewisePlan& plan) {
    if (plan.empty()) throw InvalidInput("cannot propagate an empty plan");
    Trajectory out;
    StateVec x = x0;
    double t0 = 0.0;
    for (const auto& seg : plan) {
        Trajectory part = propagate(spec, x, seg.control, seg.duration);
        const std::size_t first = out.states.empty() ? 0 : 1;
        for (std::size_t i = first; i < part.size(); ++i) {
            out.times.push_back(t0 + part.times[i]);
            out.states.push_back(part.states[i]);
        }
        t0 += seg.duration;
        x = part.end();
        out.plan.push_back(seg);
    }
    return out;
}

RelativeObservation to_relative_frame(const StateVec& s, const StateVec& goal) {
    const double c = std::cos(s[2]);
    const double sn = std::sin(s[2]);
    const double gx = goal[0] - s[0];
    const double gy = goal[1] - s[1];
    RelativeObservation o;
    o.dx = c * gx + sn * gy;
    o.dy = -sn * gx + c * gy;
    o.dtheta = wrap_angle(goal[2] - s[2]);
    if (s.size() >= 5) {
        o.v = s[3];
        o.omega = s[4];
    }
    return o;
}

RelativeObservation to_relative_frame(const StateVec& s, const Point& goal) {
    StateVec g(3);
    const double bearing = (goal - s.head<2>()).squaredNorm() > 0.0
                               ? std::atan2(goal.y() - s[1], goal.x() - s[0])
                               : s[2];
    g << goal.x(), goal.y(), bearing;
    return to_relative_frame(s, g);
}

StateVec make_state(const SystemSpec& spec, double x, double y, double theta) {
    StateVec s = StateVec::Zero(spec.state_dim);
    s[0] = x;
    s[1] = y;
    s[2] = wrap_angle(theta);
    return s;
}

StateVec sample_state(const SystemSpec& spec, const WorkspaceBox& box, Rng& rng) {
    std::uniform_real_distribution<double> ux(box.x_lo, box.x_hi);
    std::uniform_real_distribution<double> uy(box.y_lo, box.y_hi);
    std::uniform_real_distribution<double> ut(-std::numbers::pi, std::numbers::pi);
    StateVec s = StateVec::Zero(spec.state_dim);
    s[0] = ux(rng);
    s[1] = uy(rng);
    s[2] = wrap_angle(ut(rng));
    if (spec.has_velocity_state()) {
        s[3] = std::uniform_real_distribution<double>(spec.velocity_bounds[0].lo, spec.velocity_bounds[0].hi)(rng);
        s[4] = std::uniform_real_distribution<double>(spec.velocity_bounds[1].lo, spec.velocity_bounds[1].hi)(rng);
    }
    return s;
}

Control sample_control(const SystemSpec& spec, Rng& rng) {
    Control u;
    for (int i = 0; i < 2; ++i)
        u[i] = std::uniform_real_distribution<double>(spec.control_bounds[i].lo, spec.control_bounds[i].hi)(rng);
    return u;
}

void write_golden_trajectory(std::ostream& os, const SystemSpec& spec, const Trajectory& traj) {
    os << fmt::format("system={} substep={:.12g}\n", to_string(spec.id), spec.integration_substep);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const StateVec& x = traj.states[i];
        os << fmt::format("{:.12g}", traj.times[i]);
        for (int k = 0; k < x.size(); ++k) os << fmt::format(" {:.12g}", x[k]);
        os << '\n';
    }
}

}  // namespace kinoforge
