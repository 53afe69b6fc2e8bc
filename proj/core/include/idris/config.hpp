#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "idris/channel.hpp"
#include "idris/geometry.hpp"

namespace idris {

enum class SubAgentKind { position, height, orientation, elevation, ris_phase, ris_amplitude };

std::string_view to_string(SubAgentKind kind);
SubAgentKind sub_agent_kind_from_string(std::string_view name);

// Lattice dimensions an agent may observe as part of its RL state.
enum class StateDim { x, y, height, orientation, elevation, ris, amplitude };

std::string_view to_string(StateDim dim);
StateDim state_dim_from_string(std::string_view name);

// Evenly spaced values min, min + step, ..., max.
struct LatticeAxis {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    std::size_t levels() const;
    double value(std::size_t index) const;
    std::size_t nearest(double v) const;
    friend bool operator==(const LatticeAxis&, const LatticeAxis&) = default;
};

struct DeploymentArea {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double width = 1.0;
    double depth = 1.0;
    int reflection_order = 1;
    std::size_t cells_x = 10;
    std::size_t cells_y = 10;

    double cell_width() const { return width / static_cast<double>(cells_x); }
    double cell_depth() const { return depth / static_cast<double>(cells_y); }
    double cell_center_x(std::size_t i) const;
    double cell_center_y(std::size_t j) const;
    std::size_t cell_x(double x) const;
    std::size_t cell_y(double y) const;
    bool contains(double x, double y) const;
    double centroid_x() const { return origin_x + width / 2.0; }
    double centroid_y() const { return origin_y + depth / 2.0; }
    friend bool operator==(const DeploymentArea&, const DeploymentArea&) = default;
};

struct AgentConfig {
    DeploymentArea area;
    double heading_deg = 0.0;  // panel azimuth at zero orientation offset
    LatticeAxis height{1.0, 2.0, 0.25};
    LatticeAxis orientation{-30.0, 30.0, 10.0};  // offset from heading
    LatticeAxis elevation{-5.0, 5.0, 5.0};
    LatticeAxis amplitude{0.25, 1.0, 0.25};
    channel::RisPanel panel;
    std::vector<SubAgentKind> sub_agents{SubAgentKind::position, SubAgentKind::height,
                                         SubAgentKind::orientation, SubAgentKind::elevation};
    friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

struct StartPose {
    double x = 0.0;
    double y = 0.0;
    double height = 0.0;
    double orientation_offset_deg = 0.0;
    double elevation_deg = 0.0;
    std::size_t ris_configuration = 0;
    friend bool operator==(const StartPose&, const StartPose&) = default;
};

struct StartPoint {
    std::string name;
    std::vector<StartPose> poses;  // one per agent
    friend bool operator==(const StartPoint&, const StartPoint&) = default;
};

struct BaseStationConfig {
    Vec3 position;
    double beamwidth_deg = 18.0;
    std::size_t beam_count = 32;
    double boresight_deg = 90.0;
    double half_span_deg = 60.0;
    friend bool operator==(const BaseStationConfig&, const BaseStationConfig&) = default;
};

struct ReceiverConfig {
    Vec3 position;
    double gain_dbi = 0.0;
    friend bool operator==(const ReceiverConfig&, const ReceiverConfig&) = default;
};

struct Kinematics {
    double speed_mps = 0.3;
    double height_rate_mps = 0.1;
    double orientation_rate_dps = 10.0;
    double elevation_rate_dps = 5.0;
    double ris_switch_s = 0.5;
    double step_latency_s = 0.0;
    friend bool operator==(const Kinematics&, const Kinematics&) = default;
};

struct NoiseModel {
    double sigma_db = 0.5;
    double tick_s = 0.5;
    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

struct RLHyperparams {
    double epsilon = 0.15;
    double alpha = 0.5;
    double gamma = 0.5;
    std::size_t fl_period = 5;
    double window_s = 5.0;

    void validate() const;
    friend bool operator==(const RLHyperparams&, const RLHyperparams&) = default;
};

enum class ExplorationSchedule { fixed, step_decay, visit_decay };

std::string_view to_string(ExplorationSchedule s);
ExplorationSchedule exploration_schedule_from_string(std::string_view name);

struct LearningConfig {
    RLHyperparams hp;
    std::size_t warmup_steps = 10;
    double q_init = 0.0;
    std::size_t patience = 30;
    double tolerance = 0.02;
    bool stop_on_convergence = true;
    ExplorationSchedule schedule = ExplorationSchedule::fixed;
    double decay = 0.99;
    double min_epsilon = 0.0;
    std::vector<StateDim> state_dims{StateDim::x, StateDim::y, StateDim::ris};
    friend bool operator==(const LearningConfig&, const LearningConfig&) = default;
};

enum class BanditPolicy { epsilon_greedy, ucb1 };

std::string_view to_string(BanditPolicy p);
BanditPolicy bandit_policy_from_string(std::string_view name);

struct BaselineConfig {
    double centralized_latency_s = 2.0;
    std::size_t joint_action_cap = 100'000;
    BanditPolicy bandit = BanditPolicy::epsilon_greedy;
    double ucb_exploration = 1.0;
    friend bool operator==(const BaselineConfig&, const BaselineConfig&) = default;
};

struct SeedRange {
    std::uint64_t first = 1;
    std::uint64_t last = 20;

    std::vector<std::uint64_t> expand() const;
    friend bool operator==(const SeedRange&, const SeedRange&) = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    channel::RadioParams radio;
    double scatter_floor_snr_db = -5.0;
    bool scatter_floor_enabled = true;
    double calibration_target_bps = 980e6;
    BaseStationConfig bs;
    ReceiverConfig rx;
    std::vector<Box> blockers;
    std::vector<AgentConfig> agents;
    std::vector<StartPoint> starts;
    double near_optimal_radius_m = 1.5;
    Kinematics kinematics;
    NoiseModel noise;
    LearningConfig learning;
    BaselineConfig baselines;
    std::string scheme = "fmarl";
    std::string start = "";  // empty selects the first start point
    std::uint64_t seed = 1;
    SeedRange seeds;
    std::size_t budget = 300;
    std::size_t oracle_cap = 20'000'000;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Throws ConfigError naming the first offending key.
void validate(const ScenarioConfig& config);

std::size_t start_index(const ScenarioConfig& config, std::string_view name);

}  // namespace idris
