#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "idris/channel.hpp"
#include "idris/config.hpp"
#include "idris/geometry.hpp"
#include "idris/rng.hpp"

namespace idris {

enum class PositionMove : std::uint8_t { forward, backward, left, right, hold };
enum class HeightMove : std::uint8_t { up, down, hold };
enum class OrientationMove : std::uint8_t { cw, ccw, hold };
enum class ElevationMove : std::uint8_t { inc, dec, hold };
enum class AmplitudeMove : std::uint8_t { up, down, hold };

// Forward is +y and right is +x in world coordinates; the omni-wheel base
// does not need to turn before translating.
struct DeploymentAction {
    PositionMove position = PositionMove::hold;
    HeightMove height = HeightMove::hold;
    OrientationMove orientation = OrientationMove::hold;
    ElevationMove elevation = ElevationMove::hold;
    std::optional<std::size_t> ris;  // nullopt keeps the current configuration
    AmplitudeMove amplitude = AmplitudeMove::hold;

    friend bool operator==(const DeploymentAction&, const DeploymentAction&) = default;
};

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double height = 0.0;
    double orientation_deg = 0.0;  // absolute azimuth in [0, 360)
    double elevation_deg = 0.0;

    friend bool operator==(const Pose&, const Pose&) = default;
};

// Indices of one agent on its deployment lattice.
struct LatticePoint {
    std::size_t ix = 0;
    std::size_t iy = 0;
    std::size_t height = 0;
    std::size_t orientation = 0;
    std::size_t elevation = 0;
    std::size_t ris = 0;
    std::size_t amplitude = 0;

    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

struct WorldState {
    std::vector<LatticePoint> agents;
    std::vector<Box> blockers;
    double clock_s = 0.0;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct ThroughputSample {
    double throughput_bps = 0.0;  // mean over the window
    double reward = 0.0;          // throughput_bps / throughput cap
    double clock_s = 0.0;
};

struct ActionResult {
    double elapsed_s = 0.0;
    bool clamped = false;
};

struct JointActionResult {
    double elapsed_s = 0.0;
    std::vector<bool> clamped;
};

bool is_blocked(Vec3 a, Vec3 b, std::span<const Box> blockers);

class Environment {
public:
    explicit Environment(ScenarioConfig config);

    const ScenarioConfig& config() const { return config_; }
    std::size_t agent_count() const { return config_.agents.size(); }
    const AgentConfig& agent(std::size_t k) const { return config_.agents.at(k); }
    const channel::BaseStation& base_station() const { return bs_; }
    const channel::Receiver& receiver() const { return rx_; }

    WorldState reset(std::size_t start, std::uint64_t seed) const;

    // Advances the clock by this agent's actuation time.
    ActionResult apply_action(WorldState& world, std::size_t agent,
                              const DeploymentAction& action) const;

    // Agents actuate concurrently: the clock advances by the slowest agent
    // plus the per-step latency and any scheme-specific latency.
    JointActionResult apply_joint_action(WorldState& world,
                                         std::span<const DeploymentAction> actions,
                                         double extra_latency_s = 0.0) const;

    Pose pose(std::size_t agent, const LatticePoint& point) const;
    Pose pose(const WorldState& world, std::size_t agent) const {
        return pose(agent, world.agents.at(agent));
    }
    channel::RisConfiguration ris_configuration(std::size_t agent, const LatticePoint& point) const;
    LatticePoint snap(std::size_t agent, const StartPose& start) const;

    // SNR of the reflected path alone; -inf when blocked.
    double link_snr_db(std::span<const LatticePoint> points, std::span<const Box> blockers) const;
    double link_snr_db(std::span<const LatticePoint> points) const;
    // Reflected path combined with the scatter floor.
    double snr_db(const WorldState& world) const;
    double snr_db(std::span<const LatticePoint> points) const;
    double throughput_bps(const WorldState& world) const;
    double throughput_bps(std::span<const LatticePoint> points) const;
    double floor_snr_db() const;

    ThroughputSample measure_reward(WorldState& world, double window_s, const NoiseModel& noise,
                                    Rng& rng) const;

    std::size_t dim_levels(std::size_t agent, StateDim dim) const;
    std::size_t state_count(std::size_t agent, std::span<const StateDim> dims) const;
    std::size_t discretize_state(const WorldState& world, std::size_t agent,
                                 std::span<const StateDim> dims) const;
    std::size_t discretize_state(std::size_t agent, const LatticePoint& point,
                                 std::span<const StateDim> dims) const;

    std::size_t action_count(std::size_t agent, SubAgentKind kind) const;

    // Agents ordered along the reflection chain.
    std::span<const std::size_t> chain_order() const { return chain_; }

private:
    ScenarioConfig config_;
    channel::BaseStation bs_;
    channel::Receiver rx_;
    std::vector<std::size_t> chain_;
};

}  // namespace idris
