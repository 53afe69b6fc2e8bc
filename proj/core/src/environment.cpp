#include "idris/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "idris/error.hpp"

namespace idris {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Moves index one level up or down; returns false (and leaves it) at a limit.
bool step_index(std::size_t& index, std::size_t levels, int direction) {
    if (direction > 0) {
        if (index + 1 >= levels) return false;
        ++index;
    } else {
        if (index == 0) return false;
        --index;
    }
    return true;
}

}  // namespace

bool is_blocked(Vec3 a, Vec3 b, std::span<const Box> blockers) {
    return segment_blocked(a, b, blockers);
}

Environment::Environment(ScenarioConfig config) : config_(std::move(config)) {
    validate(config_);
    bs_.position = config_.bs.position;
    bs_.pattern = channel::pattern_from_beamwidth(config_.bs.beamwidth_deg);
    for (double offset : channel::uniform_codebook(config_.bs.beam_count, config_.bs.half_span_deg))
        bs_.beam_azimuths_deg.push_back(config_.bs.boresight_deg + offset);
    rx_ = {config_.rx.position, config_.rx.gain_dbi};

    chain_.resize(config_.agents.size());
    for (std::size_t k = 0; k < config_.agents.size(); ++k)
        chain_[static_cast<std::size_t>(config_.agents[k].area.reflection_order - 1)] = k;
}

WorldState Environment::reset(std::size_t start, std::uint64_t /*seed*/) const {
    if (start >= config_.starts.size())
        throw ConfigError(ConfigErrorCode::validation, "start",
                          "start index " + std::to_string(start) + " out of range (" +
                              std::to_string(config_.starts.size()) + " configured)");
    WorldState world;
    world.blockers = config_.blockers;
    for (std::size_t k = 0; k < agent_count(); ++k)
        world.agents.push_back(snap(k, config_.starts[start].poses[k]));
    return world;
}

LatticePoint Environment::snap(std::size_t agent, const StartPose& start) const {
    const AgentConfig& a = config_.agents.at(agent);
    LatticePoint p;
    p.ix = a.area.cell_x(start.x);
    p.iy = a.area.cell_y(start.y);
    p.height = a.height.nearest(start.height);
    p.orientation = a.orientation.nearest(start.orientation_offset_deg);
    p.elevation = a.elevation.nearest(start.elevation_deg);
    p.ris = std::min(start.ris_configuration, a.panel.configuration_count() - 1);
    p.amplitude = a.amplitude.levels() - 1;
    return p;
}

ActionResult Environment::apply_action(WorldState& world, std::size_t agent,
                                       const DeploymentAction& action) const {
    const AgentConfig& a = config_.agents.at(agent);
    const Kinematics& kin = config_.kinematics;
    LatticePoint& p = world.agents.at(agent);
    ActionResult result;
    const auto move = [&](std::size_t& index, std::size_t levels, int direction, double seconds) {
        if (step_index(index, levels, direction)) result.elapsed_s += seconds;
        else result.clamped = true;
    };

    switch (action.position) {
        case PositionMove::forward:
            move(p.iy, a.area.cells_y, +1, a.area.cell_depth() / kin.speed_mps);
            break;
        case PositionMove::backward:
            move(p.iy, a.area.cells_y, -1, a.area.cell_depth() / kin.speed_mps);
            break;
        case PositionMove::left:
            move(p.ix, a.area.cells_x, -1, a.area.cell_width() / kin.speed_mps);
            break;
        case PositionMove::right:
            move(p.ix, a.area.cells_x, +1, a.area.cell_width() / kin.speed_mps);
            break;
        case PositionMove::hold: break;
    }
    if (action.height != HeightMove::hold)
        move(p.height, a.height.levels(), action.height == HeightMove::up ? +1 : -1,
             a.height.step / kin.height_rate_mps);
    if (action.orientation != OrientationMove::hold)
        move(p.orientation, a.orientation.levels(),
             action.orientation == OrientationMove::ccw ? +1 : -1,
             a.orientation.step / kin.orientation_rate_dps);
    if (action.elevation != ElevationMove::hold)
        move(p.elevation, a.elevation.levels(), action.elevation == ElevationMove::inc ? +1 : -1,
             a.elevation.step / kin.elevation_rate_dps);
    if (action.amplitude != AmplitudeMove::hold)
        move(p.amplitude, a.amplitude.levels(), action.amplitude == AmplitudeMove::up ? +1 : -1,
             kin.ris_switch_s);
    if (action.ris) {
        if (*action.ris >= a.panel.configuration_count()) {
            result.clamped = true;
        } else if (*action.ris != p.ris) {
            p.ris = *action.ris;
            result.elapsed_s += kin.ris_switch_s;
        }
    }
    world.clock_s += result.elapsed_s;
    return result;
}

JointActionResult Environment::apply_joint_action(WorldState& world,
                                                  std::span<const DeploymentAction> actions,
                                                  double extra_latency_s) const {
    if (actions.size() != agent_count())
        throw ConfigError(ConfigErrorCode::validation, "agents", "one action per agent expected");
    JointActionResult result;
    const double start = world.clock_s;
    double slowest = 0.0;
    for (std::size_t k = 0; k < actions.size(); ++k) {
        world.clock_s = start;
        const ActionResult r = apply_action(world, k, actions[k]);
        slowest = std::max(slowest, r.elapsed_s);
        result.clamped.push_back(r.clamped);
    }
    result.elapsed_s = slowest + config_.kinematics.step_latency_s + extra_latency_s;
    world.clock_s = start + result.elapsed_s;
    return result;
}

Pose Environment::pose(std::size_t agent, const LatticePoint& point) const {
    const AgentConfig& a = config_.agents.at(agent);
    return {a.area.cell_center_x(point.ix), a.area.cell_center_y(point.iy),
            a.height.value(point.height),
            wrap_deg_360(a.heading_deg + a.orientation.value(point.orientation)),
            a.elevation.value(point.elevation)};
}

channel::RisConfiguration Environment::ris_configuration(std::size_t agent,
                                                         const LatticePoint& point) const {
    const AgentConfig& a = config_.agents.at(agent);
    return {point.ris, a.amplitude.value(point.amplitude)};
}

double Environment::link_snr_db(std::span<const LatticePoint> points,
                                std::span<const Box> blockers) const {
    std::vector<channel::RisHop> hops;
    hops.reserve(chain_.size());
    for (std::size_t k : chain_) {
        const Pose p = pose(k, points[k]);
        hops.push_back({std::cref(config_.agents[k].panel), Vec3{p.x, p.y, p.height},
                        p.orientation_deg, p.elevation_deg, ris_configuration(k, points[k])});
    }
    return channel::cascaded_link_snr(bs_, hops, rx_, config_.radio, blockers);
}

double Environment::link_snr_db(std::span<const LatticePoint> points) const {
    return link_snr_db(points, config_.blockers);
}

double Environment::floor_snr_db() const {
    return config_.scatter_floor_enabled ? config_.scatter_floor_snr_db : kNegInf;
}

double Environment::snr_db(const WorldState& world) const {
    return channel::snr_power_sum(link_snr_db(world.agents, world.blockers), floor_snr_db());
}

double Environment::snr_db(std::span<const LatticePoint> points) const {
    return channel::snr_power_sum(link_snr_db(points), floor_snr_db());
}

double Environment::throughput_bps(const WorldState& world) const {
    return channel::snr_to_throughput(snr_db(world), config_.radio);
}

double Environment::throughput_bps(std::span<const LatticePoint> points) const {
    return channel::snr_to_throughput(snr_db(points), config_.radio);
}

ThroughputSample Environment::measure_reward(WorldState& world, double window_s,
                                             const NoiseModel& noise, Rng& rng) const {
    if (!(window_s > 0.0))
        throw ConfigError(ConfigErrorCode::validation, "learning.window_s", "must be positive");
    const double base = snr_db(world);
    const auto ticks = std::max<long long>(1, std::llround(window_s / noise.tick_s));
    const bool noisy = noise.sigma_db > 0.0 && std::isfinite(base);
    std::normal_distribution<double> jitter(0.0, noisy ? noise.sigma_db : 1.0);
    double sum = 0.0;
    for (long long t = 0; t < ticks; ++t) {
        const double snr = noisy ? base + jitter(rng) : base;
        sum += channel::snr_to_throughput(snr, config_.radio);
    }
    world.clock_s += window_s;
    ThroughputSample sample;
    sample.throughput_bps = sum / static_cast<double>(ticks);
    sample.reward =
        std::clamp(sample.throughput_bps / config_.radio.throughput_cap_bps, 0.0, 1.0);
    sample.clock_s = world.clock_s;
    return sample;
}

std::size_t Environment::dim_levels(std::size_t agent, StateDim dim) const {
    const AgentConfig& a = config_.agents.at(agent);
    switch (dim) {
        case StateDim::x: return a.area.cells_x;
        case StateDim::y: return a.area.cells_y;
        case StateDim::height: return a.height.levels();
        case StateDim::orientation: return a.orientation.levels();
        case StateDim::elevation: return a.elevation.levels();
        case StateDim::ris: return a.panel.configuration_count();
        case StateDim::amplitude: return a.amplitude.levels();
    }
    return 1;
}

std::size_t Environment::state_count(std::size_t agent, std::span<const StateDim> dims) const {
    std::size_t n = 1;
    for (StateDim d : dims) n *= dim_levels(agent, d);
    return n;
}

std::size_t Environment::discretize_state(std::size_t agent, const LatticePoint& p,
                                          std::span<const StateDim> dims) const {
    std::size_t index = 0;
    for (StateDim d : dims) {
        std::size_t v = 0;
        switch (d) {
            case StateDim::x: v = p.ix; break;
            case StateDim::y: v = p.iy; break;
            case StateDim::height: v = p.height; break;
            case StateDim::orientation: v = p.orientation; break;
            case StateDim::elevation: v = p.elevation; break;
            case StateDim::ris: v = p.ris; break;
            case StateDim::amplitude: v = p.amplitude; break;
        }
        index = index * dim_levels(agent, d) + std::min(v, dim_levels(agent, d) - 1);
    }
    return index;
}

std::size_t Environment::discretize_state(const WorldState& world, std::size_t agent,
                                          std::span<const StateDim> dims) const {
    return discretize_state(agent, world.agents.at(agent), dims);
}

std::size_t Environment::action_count(std::size_t agent, SubAgentKind kind) const {
    switch (kind) {
        case SubAgentKind::position: return 5;
        case SubAgentKind::height:
        case SubAgentKind::orientation:
        case SubAgentKind::elevation:
        case SubAgentKind::ris_amplitude: return 3;
        case SubAgentKind::ris_phase: return config_.agents.at(agent).panel.configuration_count() + 1;
    }
    return 1;
}

}  // namespace idris
