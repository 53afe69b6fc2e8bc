#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "idris/config.hpp"
#include "idris/error.hpp"

namespace idris {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::array<std::string_view, N>& names,
                std::string_view what) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == name) return static_cast<Enum>(i);
    }
    throw ConfigError(ConfigErrorCode::validation, std::string(what),
                      "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

constexpr std::array<std::string_view, 6> kSubAgentNames{
    "position", "height", "orientation", "elevation", "ris_phase", "ris_amplitude"};
constexpr std::array<std::string_view, 7> kStateDimNames{
    "x", "y", "height", "orientation", "elevation", "ris", "amplitude"};
constexpr std::array<std::string_view, 3> kScheduleNames{"fixed", "step_decay", "visit_decay"};
constexpr std::array<std::string_view, 2> kBanditNames{"epsilon_greedy", "ucb1"};
constexpr std::array<std::string_view, 7> kSchemeNames{"fmarl",  "centralized", "marl",  "rl",
                                                       "mab",    "random",      "no_ris"};

[[noreturn]] void invalid(const std::string& key, const std::string& message) {
    throw ConfigError(ConfigErrorCode::validation, key, message);
}

void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) invalid(key, message);
}

void check_axis(const LatticeAxis& axis, const std::string& key) {
    require(std::isfinite(axis.min) && std::isfinite(axis.max), key, "bounds must be finite");
    require(axis.step > 0.0, key, "step must be positive");
    require(axis.max >= axis.min, key, "max must not be below min");
    const double span = (axis.max - axis.min) / axis.step;
    require(std::abs(span - std::round(span)) < 1e-9, key, "range must be a whole number of steps");
}

bool on_axis(const LatticeAxis& axis, double v) {
    return v >= axis.min - 1e-9 && v <= axis.max + 1e-9;
}

bool strictly_inside(const DeploymentArea& a, double x, double y) {
    return x > a.origin_x && x < a.origin_x + a.width && y > a.origin_y && y < a.origin_y + a.depth;
}

bool interiors_overlap(const DeploymentArea& a, const DeploymentArea& b) {
    return a.origin_x < b.origin_x + b.width && b.origin_x < a.origin_x + a.width &&
           a.origin_y < b.origin_y + b.depth && b.origin_y < a.origin_y + a.depth;
}

}  // namespace

std::string_view to_string(SubAgentKind kind) { return kSubAgentNames.at(static_cast<int>(kind)); }
SubAgentKind sub_agent_kind_from_string(std::string_view name) {
    return parse_enum<SubAgentKind>(name, kSubAgentNames, "sub-agent kind");
}

std::string_view to_string(StateDim dim) { return kStateDimNames.at(static_cast<int>(dim)); }
StateDim state_dim_from_string(std::string_view name) {
    return parse_enum<StateDim>(name, kStateDimNames, "state dimension");
}

std::string_view to_string(ExplorationSchedule s) { return kScheduleNames.at(static_cast<int>(s)); }
ExplorationSchedule exploration_schedule_from_string(std::string_view name) {
    return parse_enum<ExplorationSchedule>(name, kScheduleNames, "exploration schedule");
}

std::string_view to_string(BanditPolicy p) { return kBanditNames.at(static_cast<int>(p)); }
BanditPolicy bandit_policy_from_string(std::string_view name) {
    return parse_enum<BanditPolicy>(name, kBanditNames, "bandit policy");
}

std::size_t LatticeAxis::levels() const {
    return static_cast<std::size_t>(std::llround((max - min) / step)) + 1;
}

double LatticeAxis::value(std::size_t index) const {
    return min + static_cast<double>(index) * step;
}

std::size_t LatticeAxis::nearest(double v) const {
    const double k = std::round((v - min) / step);
    const double top = static_cast<double>(levels() - 1);
    return static_cast<std::size_t>(std::clamp(k, 0.0, top));
}

double DeploymentArea::cell_center_x(std::size_t i) const {
    return origin_x + (static_cast<double>(i) + 0.5) * cell_width();
}

double DeploymentArea::cell_center_y(std::size_t j) const {
    return origin_y + (static_cast<double>(j) + 0.5) * cell_depth();
}

std::size_t DeploymentArea::cell_x(double x) const {
    const double k = std::floor((x - origin_x) / cell_width());
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(cells_x - 1)));
}

std::size_t DeploymentArea::cell_y(double y) const {
    const double k = std::floor((y - origin_y) / cell_depth());
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(cells_y - 1)));
}

bool DeploymentArea::contains(double x, double y) const {
    return x >= origin_x && x <= origin_x + width && y >= origin_y && y <= origin_y + depth;
}

std::vector<std::uint64_t> SeedRange::expand() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = first; s <= last; ++s) {
        out.push_back(s);
        if (s == last) break;
    }
    return out;
}

void RLHyperparams::validate() const {
    require(epsilon >= 0.0 && epsilon <= 1.0, "learning.epsilon", "epsilon must lie in [0, 1]");
    require(alpha > 0.0 && alpha <= 1.0, "learning.alpha", "alpha must lie in (0, 1]");
    require(gamma >= 0.0 && gamma < 1.0, "learning.gamma", "gamma must lie in [0, 1)");
    require(fl_period >= 1, "learning.fl_period", "federation period must be at least 1");
    require(window_s > 0.0, "learning.window_s", "observation window must be positive");
}

std::size_t start_index(const ScenarioConfig& config, std::string_view name) {
    if (name.empty()) return 0;
    for (std::size_t i = 0; i < config.starts.size(); ++i) {
        if (config.starts[i].name == name) return i;
    }
    throw ConfigError(ConfigErrorCode::validation, "start",
                      "unknown start point '" + std::string(name) + "'");
}

void validate(const ScenarioConfig& c) {
    const auto& r = c.radio;
    require(r.carrier_frequency_hz > 0.0, "radio.carrier_frequency_hz", "must be positive");
    require(r.bandwidth_hz > 0.0, "radio.bandwidth_hz", "must be positive");
    require(r.throughput_cap_bps > 0.0, "radio.throughput_cap_bps", "must be positive");
    require(std::isfinite(r.tx_power_dbm), "radio.tx_power_dbm", "must be finite");
    require(std::isfinite(r.noise_figure_db), "radio.noise_figure_db", "must be finite");
    require(std::isfinite(r.calibration_margin_db), "calibration_margin", "must be finite");
    require(std::isfinite(c.scatter_floor_snr_db), "scatter_floor.snr_db", "must be finite");
    require(c.calibration_target_bps > 0.0 && c.calibration_target_bps < r.throughput_cap_bps,
            "calibration_target_bps", "must lie strictly between 0 and the throughput cap");

    require(c.bs.beamwidth_deg > 0.0 && c.bs.beamwidth_deg <= 360.0, "bs.beamwidth_deg",
            "must lie in (0, 360]");
    require(c.bs.beam_count >= 1, "bs.beam_count", "must be at least 1");
    require(c.bs.half_span_deg >= 0.0, "bs.half_span_deg", "must be non-negative");
    require(c.rx.position != c.bs.position, "rx.position", "coincides with the base station");

    for (std::size_t b = 0; b < c.blockers.size(); ++b) {
        const Box& box = c.blockers[b];
        require(box.min.x <= box.max.x && box.min.y <= box.max.y && box.min.z <= box.max.z,
                "blocker." + std::to_string(b), "min corner exceeds max corner");
    }

    require(!c.agents.empty(), "agent.0", "at least one agent is required");
    require(c.agents.size() <= channel::max_chain_length, "agent." + std::to_string(c.agents.size() - 1),
            "at most two agents are supported");
    std::set<int> orders;
    for (std::size_t k = 0; k < c.agents.size(); ++k) {
        const std::string p = "agent." + std::to_string(k);
        const AgentConfig& a = c.agents[k];
        require(a.area.width > 0.0 && a.area.depth > 0.0, p + ".area.size", "must be positive");
        require(a.area.cells_x >= 1 && a.area.cells_y >= 1, p + ".area.cells", "must be at least 1");
        require(a.area.reflection_order == 1 || a.area.reflection_order == 2,
                p + ".area.reflection_order", "must be 1 or 2");
        require(orders.insert(a.area.reflection_order).second, p + ".area.reflection_order",
                "duplicate reflection order");
        check_axis(a.height, p + ".height");
        require(a.height.min > 0.0, p + ".height", "heights must be positive");
        check_axis(a.orientation, p + ".orientation");
        check_axis(a.elevation, p + ".elevation");
        require(a.elevation.min > -90.0 && a.elevation.max < 90.0, p + ".elevation",
                "tilt must stay within (-90, 90)");
        check_axis(a.amplitude, p + ".amplitude");
        require(a.amplitude.min > 0.0 && a.amplitude.max <= 1.0, p + ".amplitude",
                "amplitudes must lie in (0, 1]");

        const auto& panel = a.panel;
        require(panel.num_elements >= 1, p + ".panel.elements", "must be at least 1");
        require(panel.control_bits >= 0, p + ".panel.control_bits", "must be non-negative");
        require(!(panel.fixed_beam() && !panel.codebook_deg.empty()), p + ".panel.codebook",
                "a fixed-beam panel takes no codebook");
        require(panel.pattern.half_power_beamwidth_deg > 0.0 &&
                    panel.pattern.half_power_beamwidth_deg <= 360.0,
                p + ".panel.beamwidth_deg", "must lie in (0, 360]");
        require(panel.pattern.sidelobe_floor_db < 0.0, p + ".panel.sidelobe_floor_db",
                "must be negative");
        require(std::isfinite(panel.pattern.peak_gain_dbi), p + ".panel.peak_gain_dbi",
                "must be finite");

        require(!a.sub_agents.empty(), p + ".sub_agents", "at least one sub-agent is required");
        std::set<SubAgentKind> kinds(a.sub_agents.begin(), a.sub_agents.end());
        require(kinds.size() == a.sub_agents.size(), p + ".sub_agents", "duplicate sub-agent kind");
        require(!kinds.contains(SubAgentKind::ris_phase) || !panel.codebook_deg.empty(),
                p + ".sub_agents", "ris_phase needs a panel codebook");

        for (std::size_t m = 0; m < k; ++m) {
            require(!interiors_overlap(a.area, c.agents[m].area), p + ".area",
                    "overlaps agent." + std::to_string(m));
        }
        require(!strictly_inside(a.area, c.bs.position.x, c.bs.position.y), p + ".area",
                "contains the base station");
        require(!strictly_inside(a.area, c.rx.position.x, c.rx.position.y), p + ".area",
                "contains the receiver");
    }
    require(*orders.begin() == 1 && *orders.rbegin() == static_cast<int>(orders.size()),
            "agent.0.area.reflection_order", "reflection orders must be 1..n");

    require(!c.starts.empty(), "start.0", "at least one start point is required");
    std::set<std::string> names;
    for (std::size_t s = 0; s < c.starts.size(); ++s) {
        const std::string p = "start." + std::to_string(s);
        const StartPoint& sp = c.starts[s];
        require(!sp.name.empty(), p + ".name", "must not be empty");
        require(names.insert(sp.name).second, p + ".name", "duplicate start name");
        require(sp.poses.size() == c.agents.size(), p + ".agent", "one pose per agent is required");
        for (std::size_t k = 0; k < sp.poses.size(); ++k) {
            const std::string q = p + ".agent." + std::to_string(k);
            const StartPose& pose = sp.poses[k];
            const AgentConfig& a = c.agents[k];
            require(a.area.contains(pose.x, pose.y), q, "lies outside the deployment area");
            require(on_axis(a.height, pose.height), q, "height outside limits");
            require(on_axis(a.orientation, pose.orientation_offset_deg), q,
                    "orientation outside limits");
            require(on_axis(a.elevation, pose.elevation_deg), q, "elevation outside limits");
            require(pose.ris_configuration < a.panel.configuration_count(), q,
                    "RIS configuration out of range");
        }
    }
    require(c.near_optimal_radius_m > 0.0, "near_optimal_radius_m", "must be positive");

    const auto& k = c.kinematics;
    require(k.speed_mps > 0.0, "kinematics.speed_mps", "must be positive");
    require(k.height_rate_mps > 0.0, "kinematics.height_rate_mps", "must be positive");
    require(k.orientation_rate_dps > 0.0, "kinematics.orientation_rate_dps", "must be positive");
    require(k.elevation_rate_dps > 0.0, "kinematics.elevation_rate_dps", "must be positive");
    require(k.ris_switch_s >= 0.0, "kinematics.ris_switch_s", "must be non-negative");
    require(k.step_latency_s >= 0.0, "kinematics.step_latency_s", "must be non-negative");

    require(c.noise.sigma_db >= 0.0, "noise.sigma_db", "must be non-negative");
    require(c.noise.tick_s > 0.0, "noise.tick_s", "must be positive");

    const auto& l = c.learning;
    l.hp.validate();
    require(l.patience >= 1, "learning.patience", "must be at least 1");
    require(l.tolerance >= 0.0, "learning.tolerance", "must be non-negative");
    require(std::isfinite(l.q_init), "learning.q_init", "must be finite");
    require(l.decay > 0.0 && l.decay <= 1.0, "learning.decay", "must lie in (0, 1]");
    require(l.min_epsilon >= 0.0 && l.min_epsilon <= 1.0, "learning.min_epsilon",
            "must lie in [0, 1]");
    require(!l.state_dims.empty(), "learning.state_dims", "at least one dimension is required");
    std::set<StateDim> dims(l.state_dims.begin(), l.state_dims.end());
    require(dims.size() == l.state_dims.size(), "learning.state_dims", "duplicate dimension");

    require(c.baselines.centralized_latency_s >= 0.0, "baselines.centralized_latency_s",
            "must be non-negative");
    require(c.baselines.joint_action_cap >= 1, "baselines.joint_action_cap", "must be at least 1");
    require(c.baselines.ucb_exploration >= 0.0, "baselines.ucb_exploration",
            "must be non-negative");

    require(std::find(kSchemeNames.begin(), kSchemeNames.end(), c.scheme) != kSchemeNames.end(),
            "scheme", "unknown scheme '" + c.scheme + "'");
    if (!c.start.empty()) start_index(c, c.start);
    require(c.seeds.first <= c.seeds.last, "seeds", "first seed exceeds last");
    require(c.budget >= 1, "budget", "must be at least 1");
    require(c.oracle_cap >= 1, "oracle_cap", "must be at least 1");
}

}  // namespace idris
