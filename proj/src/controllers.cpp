#include "kinoforge/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "kinoforge/geom_env.hpp"

namespace kinoforge {

RelativeObservation observe(const ControllerQuery& query) {
    if (query.goal_heading) {
        StateVec g(3);
        g << query.goal.x(), query.goal.y(), *query.goal_heading;
        return to_relative_frame(query.state, g);
    }
    return to_relative_frame(query.state, query.goal);
}

RandomController::RandomController(double min_duration, double max_duration)
    : min_duration_(min_duration), max_duration_(max_duration) {
    if (!(min_duration > 0.0) || max_duration < min_duration)
        throw InvalidInput("random controller needs 0 < min_duration <= max_duration");
}

PiecewisePlan RandomController::plan(const SystemSpec& spec, const ControllerQuery&, Rng& rng) const {
    const Control u = sample_control(spec, rng);
    const double d = min_duration_ == max_duration_
                         ? min_duration_
                         : std::uniform_real_distribution<double>(min_duration_, max_duration_)(rng);
    return {PlanSegment{u, d}};
}

std::vector<Control> control_grid_3(const SystemSpec& spec) {
    std::vector<Control> grid;
    grid.reserve(9);
    const auto& b0 = spec.control_bounds[0];
    const auto& b1 = spec.control_bounds[1];
    for (double a : {b0.lo, b0.mid(), b0.hi})
        for (double b : {b1.lo, b1.mid(), b1.hi}) grid.emplace_back(a, b);
    return grid;
}

PiecewisePlan GreedyOracle::plan(const SystemSpec& spec, const ControllerQuery& query, Rng&) const {
    const auto grid = control_grid_3(spec);
    std::size_t best = 0;
    double best_dist = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const StateVec end = propagate_end(spec, query.state, grid[i], edge_duration_);
        const double d = (project(end) - query.goal).norm();
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return {PlanSegment{grid[best], edge_duration_}};
}

// ---------------------------------------------------------------------------

RelativeObservation SlcTable::key(const SlcEntry& e) const {
    RelativeObservation o;
    o.dx = e.end[0];
    o.dy = e.end[1];
    o.dtheta = e.end[2];
    o.v = e.initial_velocity[0];
    o.omega = e.initial_velocity[1];
    return o;
}

double SlcTable::distance(const RelativeObservation& a, const RelativeObservation& b) const {
    const double px = metric.position * (a.dx - b.dx);
    const double py = metric.position * (a.dy - b.dy);
    const double pa = metric.angle * wrap_angle(a.dtheta - b.dtheta);
    const double pv = metric.velocity * (a.v - b.v);
    const double pw = metric.velocity * (a.omega - b.omega);
    return std::sqrt(px * px + py * py + pa * pa + pv * pv + pw * pw);
}

std::size_t SlcTable::nearest(const RelativeObservation& query) const {
    if (entries.empty()) throw InvalidInput("SLC table is empty");
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const double d = distance(query, key(entries[i]));
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

SlcTable build_slc_table(const SystemSpec& spec, const SlcGridSpec& grid, int initial_samples, double r_nn,
                         Rng& rng) {
    spec.validate();
    if (grid.values_per_dimension < 2) throw InvalidInput("control grid needs at least 2 values per dimension");
    if (grid.durations.empty()) throw InvalidInput("duration grid is empty");
    for (double d : grid.durations)
        if (!(d > 0.0)) throw InvalidInput("durations must be positive");
    if (!(r_nn >= 0.0)) throw InvalidInput("neighbourhood radius must be non-negative");

    SlcTable table;
    table.spec = spec;
    table.neighborhood_radius = r_nn;

    const int n = grid.values_per_dimension;
    auto value = [&](int dim, int i) {
        const auto& b = spec.control_bounds[dim];
        return b.lo + (b.hi - b.lo) * static_cast<double>(i) / (n - 1);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (double d : grid.durations) table.plans.push_back({Control(value(0, i), value(1, j)), d});

    if (spec.has_velocity_state()) {
        if (initial_samples < 1) throw InvalidInput("second-order table needs at least one initial sample");
        for (int k = 0; k < initial_samples; ++k) {
            Eigen::Vector2d v;
            for (int d = 0; d < 2; ++d)
                v[d] = std::uniform_real_distribution<double>(spec.velocity_bounds[d].lo,
                                                              spec.velocity_bounds[d].hi)(rng);
            table.initial_samples.push_back(v);
        }
    } else {
        table.initial_samples.push_back(Eigen::Vector2d::Zero());
    }

    std::vector<SlcEntry> all;
    all.reserve(table.plans.size() * table.initial_samples.size());
    for (std::size_t k = 0; k < table.initial_samples.size(); ++k) {
        StateVec origin = StateVec::Zero(spec.state_dim);
        if (spec.has_velocity_state()) origin.tail<2>() = table.initial_samples[k];
        for (std::size_t p = 0; p < table.plans.size(); ++p) {
            SlcEntry e;
            e.plan_index = static_cast<int>(p);
            e.initial_index = static_cast<int>(k);
            e.plan = table.plans[p];
            e.initial_velocity = table.initial_samples[k];
            e.end = propagate_end(spec, origin, e.plan.control, e.plan.duration);
            all.push_back(std::move(e));
        }
    }

    // Best first: shortest duration, then least control effort, then index.
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = all[a];
        const auto& eb = all[b];
        if (ea.plan.duration != eb.plan.duration) return ea.plan.duration < eb.plan.duration;
        const double ma = ea.plan.control.norm(), mb = eb.plan.control.norm();
        if (ma != mb) return ma < mb;
        if (ea.plan_index != eb.plan_index) return ea.plan_index < eb.plan_index;
        return ea.initial_index < eb.initial_index;
    });
    for (std::size_t i : order) {
        const RelativeObservation k = table.key(all[i]);
        bool covered = false;
        for (const auto& kept : table.entries)
            if (table.distance(k, table.key(kept)) <= r_nn) {
                covered = true;
                break;
            }
        if (!covered) table.entries.push_back(all[i]);
    }
    return table;
}

PiecewisePlan slc_query(const SlcTable& table, const RelativeObservation& delta) {
    return {table.entries[table.nearest(delta)].plan};
}

double audit_slc_table(const SlcTable& table) {
    double worst = 0.0;
    for (const auto& e : table.entries) {
        StateVec origin = StateVec::Zero(table.spec.state_dim);
        if (table.spec.has_velocity_state()) origin.tail<2>() = e.initial_velocity;
        const Trajectory t = propagate(table.spec, origin, e.plan.control, e.plan.duration);
        StateVec diff = t.end() - e.end;
        diff[2] = wrap_angle(diff[2]);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return worst;
}

namespace {

constexpr char kSlcMagic[8] = {'K', 'F', 'S', 'L', 'C', 'T', 'B', '1'};

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ParseError("SLC table file truncated");
    return v;
}

}  // namespace

void save_slc_table(const std::string& path, const SlcTable& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput(fmt::format("cannot write '{}'", path));
    os.write(kSlcMagic, sizeof(kSlcMagic));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(t.spec.id));
    for (const auto& b : t.spec.control_bounds) put(os, b.lo), put(os, b.hi);
    for (const auto& b : t.spec.velocity_bounds) put(os, b.lo), put(os, b.hi);
    put(os, t.spec.integration_substep);
    put(os, t.neighborhood_radius);
    put(os, t.metric.position), put(os, t.metric.angle), put(os, t.metric.velocity);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(t.plans.size()));
    for (const auto& p : t.plans) put(os, p.control[0]), put(os, p.control[1]), put(os, p.duration);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(t.initial_samples.size()));
    for (const auto& v : t.initial_samples) put(os, v[0]), put(os, v[1]);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(t.entries.size()));
    for (const auto& e : t.entries) {
        put<std::int32_t>(os, e.plan_index);
        put<std::int32_t>(os, e.initial_index);
        for (int k = 0; k < e.end.size(); ++k) put(os, e.end[k]);
    }
}

SlcTable load_slc_table(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError(fmt::format("cannot open '{}'", path));
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kSlcMagic, 8) != 0) throw ParseError("not an SLC table (bad magic)");
    SlcTable t;
    const auto id = get<std::uint32_t>(is);
    if (id > 1) throw ParseError("SLC table has unknown system id");
    t.spec = SystemSpec::make(static_cast<SystemId>(id));
    for (auto& b : t.spec.control_bounds) b.lo = get<double>(is), b.hi = get<double>(is);
    for (auto& b : t.spec.velocity_bounds) b.lo = get<double>(is), b.hi = get<double>(is);
    t.spec.integration_substep = get<double>(is);
    t.neighborhood_radius = get<double>(is);
    t.metric.position = get<double>(is);
    t.metric.angle = get<double>(is);
    t.metric.velocity = get<double>(is);
    t.plans.resize(get<std::uint32_t>(is));
    for (auto& p : t.plans) {
        p.control[0] = get<double>(is);
        p.control[1] = get<double>(is);
        p.duration = get<double>(is);
    }
    t.initial_samples.resize(get<std::uint32_t>(is));
    for (auto& v : t.initial_samples) v[0] = get<double>(is), v[1] = get<double>(is);
    t.entries.resize(get<std::uint32_t>(is));
    for (auto& e : t.entries) {
        e.plan_index = get<std::int32_t>(is);
        e.initial_index = get<std::int32_t>(is);
        if (e.plan_index < 0 || e.plan_index >= static_cast<int>(t.plans.size()) || e.initial_index < 0 ||
            e.initial_index >= static_cast<int>(t.initial_samples.size()))
            throw ParseError("SLC table entry references a missing plan or initial sample");
        e.plan = t.plans[e.plan_index];
        e.initial_velocity = t.initial_samples[e.initial_index];
        e.end.resize(t.spec.state_dim);
        for (int k = 0; k < t.spec.state_dim; ++k) e.end[k] = get<double>(is);
    }
    return t;
}

PiecewisePlan SlcController::plan(const SystemSpec&, const ControllerQuery& query, Rng&) const {
    return slc_query(*table_, observe(query));
}

// ---------------------------------------------------------------------------

namespace {

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        default: return "linear";
    }
}

Activation parse_activation(const std::string& s, std::size_t layer) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "linear") return Activation::linear;
    throw InvalidInput(fmt::format("layer {}: unknown activation '{}'", layer, s));
}

}  // namespace

void MlpPolicy::validate() const {
    if (obs_dim < 1 || act_dim < 1) throw InvalidInput("policy: obs_dim and act_dim must be positive");
    if (obs_offset.size() != obs_dim || obs_scale.size() != obs_dim)
        throw InvalidInput("policy: obs_offset/obs_scale length must equal obs_dim");
    if (!obs_offset.allFinite() || !obs_scale.allFinite() || (obs_scale.array() == 0.0).any())
        throw InvalidInput("policy: normalization must be finite with non-zero scale");
    if (act_low.size() != act_dim || act_high.size() != act_dim)
        throw InvalidInput("policy: act_low/act_high length must equal act_dim");
    if (!act_low.allFinite() || !act_high.allFinite() || (act_low.array() > act_high.array()).any())
        throw InvalidInput("policy: action bounds must be finite with low <= high");
    if (layers.empty()) throw InvalidInput("policy: no layers");
    Eigen::Index in = obs_dim;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.weight.cols() != in)
            throw InvalidInput(fmt::format("layer {}: expects {} inputs, previous layer gives {}", i, l.weight.cols(), in));
        if (l.bias.size() != l.weight.rows())
            throw InvalidInput(fmt::format("layer {}: bias length {} != rows {}", i, l.bias.size(), l.weight.rows()));
        if (!l.weight.allFinite() || !l.bias.allFinite())
            throw InvalidInput(fmt::format("layer {}: non-finite weight", i));
        in = l.weight.rows();
    }
    if (in != act_dim) throw InvalidInput(fmt::format("layer {}: output size {} != act_dim {}", layers.size() - 1, in, act_dim));
}

Eigen::VectorXd mlp_forward(const MlpPolicy& policy, const Eigen::VectorXd& obs) {
    if (obs.size() != policy.obs_dim)
        throw InvalidInput(fmt::format("observation has {} components, policy expects {}", obs.size(), policy.obs_dim));
    Eigen::VectorXd x = (obs - policy.obs_offset).cwiseQuotient(policy.obs_scale);
    for (const auto& layer : policy.layers) {
        x = layer.weight * x + layer.bias;
        switch (layer.activation) {
            case Activation::relu: x = x.cwiseMax(0.0); break;
            case Activation::tanh: x = x.array().tanh().matrix(); break;
            case Activation::linear: break;
        }
    }
    if (policy.tanh_squash) {
        const Eigen::ArrayXd s = (x.array().tanh() + 1.0) * 0.5;
        return (policy.act_low.array() + s * (policy.act_high - policy.act_low).array()).matrix();
    }
    return x.cwiseMax(policy.act_low).cwiseMin(policy.act_high);
}

namespace {

std::string number_list(const double* data, Eigen::Index n) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < n; ++i) out += fmt::format("{}{:.17g}", i ? ", " : "", data[i]);
    return out + "]";
}

std::string number_list(const Eigen::VectorXd& v) { return number_list(v.data(), v.size()); }

Eigen::VectorXd read_vector(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw InvalidInput(fmt::format("policy: missing array '{}'", key));
    const auto& arr = j.at(key);
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw InvalidInput(fmt::format("policy: '{}' holds a non-number", key));
        v[i] = arr[i].get<double>();
    }
    return v;
}

}  // namespace

std::string serialize_policy(const MlpPolicy& p) {
    p.validate();
    std::string out = "{\n";
    out += "  \"format_version\": 1,\n";
    out += fmt::format("  \"system_id\": \"{}\",\n", to_string(p.system));
    out += fmt::format("  \"obs_dim\": {},\n  \"act_dim\": {},\n", p.obs_dim, p.act_dim);
    out += fmt::format("  \"obs_offset\": {},\n", number_list(p.obs_offset));
    out += fmt::format("  \"obs_scale\": {},\n", number_list(p.obs_scale));
    out += "  \"layers\": [\n";
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        const auto& l = p.layers[i];
        // Row-major flattening.
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = l.weight;
        out += fmt::format("    {{\"rows\": {}, \"cols\": {}, \"w\": {}, \"b\": {}, \"act\": \"{}\"}}{}\n",
                           l.weight.rows(), l.weight.cols(), number_list(w.data(), w.size()), number_list(l.bias),
                           activation_name(l.activation), i + 1 < p.layers.size() ? "," : "");
    }
    out += "  ],\n";
    out += fmt::format("  \"output_squash\": \"{}\",\n", p.tanh_squash ? "tanh" : "none");
    out += fmt::format("  \"act_low\": {},\n", number_list(p.act_low));
    out += fmt::format("  \"act_high\": {}\n", number_list(p.act_high));
    out += "}\n";
    return out;
}

MlpPolicy parse_policy(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("policy: not valid JSON ({})", e.what()));
    }
    try {
        if (j.at("format_version").get<int>() != 1) throw InvalidInput("policy: unsupported format_version");
        MlpPolicy p;
        p.system = parse_system_id(j.at("system_id").get<std::string>());
        p.obs_dim = j.at("obs_dim").get<int>();
        p.act_dim = j.at("act_dim").get<int>();
        p.obs_offset = read_vector(j, "obs_offset");
        p.obs_scale = read_vector(j, "obs_scale");
        const auto& layers = j.at("layers");
        if (!layers.is_array()) throw InvalidInput("policy: 'layers' must be an array");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const auto& lj = layers[i];
            const int rows = lj.at("rows").get<int>();
            const int cols = lj.at("cols").get<int>();
            if (rows < 1 || cols < 1) throw InvalidInput(fmt::format("layer {}: empty shape", i));
            const Eigen::VectorXd w = read_vector(lj, "w");
            if (w.size() != static_cast<Eigen::Index>(rows) * cols)
                throw InvalidInput(fmt::format("layer {}: w has {} values, expected {}", i, w.size(), rows * cols));
            MlpLayer layer;
            layer.weight = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                w.data(), rows, cols);
            layer.bias = read_vector(lj, "b");
            layer.activation = parse_activation(lj.at("act").get<std::string>(), i);
            p.layers.push_back(std::move(layer));
        }
        const auto squash = j.at("output_squash").get<std::string>();
        if (squash != "tanh" && squash != "none") throw InvalidInput("policy: output_squash must be tanh or none");
        p.tanh_squash = squash == "tanh";
        p.act_low = read_vector(j, "act_low");
        p.act_high = read_vector(j, "act_high");
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("policy: schema violation ({})", e.what()));
    }
}

void save_policy(const std::string& path, const MlpPolicy& policy) {
    const std::string text = serialize_policy(policy);
    std::ofstream os(path);
    if (!os) throw InvalidInput(fmt::format("cannot write '{}'", path));
    os << text;
}

MlpPolicy load_policy(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput(fmt::format("cannot open policy '{}'", path));
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_policy(ss.str());
}

PolicyController::PolicyController(MlpPolicy policy, double edge_duration)
    : policy_(std::move(policy)), edge_duration_(edge_duration) {
    policy_.validate();
    if (policy_.act_dim != 2) throw InvalidInput("policy must output two controls");
}

PiecewisePlan PolicyController::plan(const SystemSpec& spec, const ControllerQuery& query, Rng&) const {
    if (policy_.system != spec.id)
        throw InvalidInput(fmt::format("policy was trained for {}, planning uses {}", to_string(policy_.system),
                                       to_string(spec.id)));
    if (policy_.obs_dim != spec.state_dim)
        throw InvalidInput(fmt::format("policy expects {} observations, system has {}", policy_.obs_dim, spec.state_dim));
    const Eigen::VectorXd out = mlp_forward(policy_, observe(query).to_vector(spec));
    Control u(spec.control_bounds[0].clamp(out[0]), spec.control_bounds[1].clamp(out[1]));
    return {PlanSegment{u, edge_duration_}};
}

}  // namespace kinoforge
