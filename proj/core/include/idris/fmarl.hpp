#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "idris/config.hpp"
#include "idris/environment.hpp"
#include "idris/qtable.hpp"
#include "idris/trace.hpp"

namespace idris {

struct SubChoice {
    SubAgentKind kind = SubAgentKind::position;
    std::size_t index = 0;

    friend bool operator==(const SubChoice&, const SubChoice&) = default;
};

// The ris_phase choice equal to ris_configurations means "hold".
DeploymentAction compose_joint_action(std::span<const SubChoice> choices,
                                      std::span<const SubAgentKind> enabled,
                                      std::size_t ris_configurations);
std::vector<SubChoice> decompose_joint_action(const DeploymentAction& action,
                                              std::span<const SubAgentKind> enabled,
                                              std::size_t ris_configurations);

struct SubAgent {
    SubAgentKind kind = SubAgentKind::position;
    QTable table;
};

struct Transition {
    std::size_t state = 0;
    std::vector<std::size_t> actions;  // one per sub-agent
    double reward = 0.0;
    std::size_t next_state = 0;
};

struct HierarchicalAgent {
    std::size_t id = 0;
    std::vector<SubAgent> sub_agents;
    std::vector<Transition> memory;

    std::vector<SubAgentKind> kinds() const;
};

HierarchicalAgent make_agent(const Environment& env, std::size_t agent,
                             const LearningConfig& learning);
std::vector<HierarchicalAgent> make_agents(const Environment& env, const LearningConfig& learning);

struct FederationSchedule {
    std::size_t period = 5;
    std::vector<std::size_t> participants;
    bool enabled = true;

    bool due(std::size_t step) const;
};

FederationSchedule full_federation(std::size_t agent_count, std::size_t period);
FederationSchedule no_federation();

// Epsilon for a 1-based step, honoring the warm-up and the decay schedule.
double exploration_rate(const LearningConfig& learning, std::size_t step,
                        std::uint64_t state_visits);

struct EpisodeOptions {
    std::size_t start = 0;
    std::uint64_t seed = 1;
    std::size_t budget = 300;
    double window_s = 5.0;
    NoiseModel noise;
    std::size_t patience = 30;
    double tolerance = 0.02;
    bool stop_on_convergence = true;

    static EpisodeOptions from(const ScenarioConfig& config);
};

struct TrainResult {
    EpisodeTrace trace;
    std::vector<double> true_throughput_bps;  // noise-free, after each step
    WorldState final_world;
    std::optional<std::size_t> converged_step;
};

// Decision-making side of an episode. Every scheme measures reward through
// the same environment path; controllers differ only in how they act and learn.
class Controller {
public:
    virtual ~Controller() = default;

    virtual std::vector<std::size_t> observe(const Environment& env, const WorldState& world) const;
    virtual std::vector<DeploymentAction> act(const Environment& env,
                                              std::span<const std::size_t> states,
                                              std::size_t step, Rng& rng) = 0;
    virtual void learn(std::span<const std::size_t> states,
                       std::span<const std::size_t> next_states, double reward) = 0;
    // Returns true when a federation exchange happened at this step.
    virtual bool after_step(std::size_t /*step*/) { return false; }
    virtual double step_latency_s() const { return 0.0; }
};

TrainResult run_episode(const Environment& env, Controller& controller,
                        const EpisodeOptions& options);

// FMARL when the schedule is enabled; MARL or single-agent RL otherwise.
class HierarchicalController : public Controller {
public:
    HierarchicalController(std::vector<HierarchicalAgent>& agents, const LearningConfig& learning,
                           FederationSchedule schedule);

    std::vector<DeploymentAction> act(const Environment& env, std::span<const std::size_t> states,
                                      std::size_t step, Rng& rng) override;
    void learn(std::span<const std::size_t> states, std::span<const std::size_t> next_states,
               double reward) override;
    bool after_step(std::size_t step) override;

private:
    std::vector<HierarchicalAgent>& agents_;
    LearningConfig learning_;
    FederationSchedule schedule_;
    std::vector<std::vector<std::size_t>> pending_;
};

TrainResult train(const Environment& env, std::vector<HierarchicalAgent>& agents,
                  const LearningConfig& learning, const FederationSchedule& schedule,
                  const EpisodeOptions& options);

}  // namespace idris
