#include "idris/fmarl.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "idris/error.hpp"

namespace idris {

namespace {

template <typename Enum>
Enum checked_enum(std::size_t index, std::size_t count, SubAgentKind kind) {
    if (index >= count)
        throw std::invalid_argument("sub-action index out of range for " +
                                    std::string(to_string(kind)));
    return static_cast<Enum>(index);
}

}  // namespace

DeploymentAction compose_joint_action(std::span<const SubChoice> choices,
                                      std::span<const SubAgentKind> enabled,
                                      std::size_t ris_configurations) {
    std::set<SubAgentKind> seen;
    for (const SubChoice& c : choices) {
        if (!seen.insert(c.kind).second)
            throw std::invalid_argument("duplicate sub-agent kind " + std::string(to_string(c.kind)));
        if (std::find(enabled.begin(), enabled.end(), c.kind) == enabled.end())
            throw std::invalid_argument("choice for disabled sub-agent " +
                                        std::string(to_string(c.kind)));
    }
    for (SubAgentKind k : enabled) {
        if (!seen.contains(k))
            throw std::invalid_argument("missing choice for sub-agent " + std::string(to_string(k)));
    }

    DeploymentAction action;
    for (const SubChoice& c : choices) {
        switch (c.kind) {
            case SubAgentKind::position:
                action.position = checked_enum<PositionMove>(c.index, 5, c.kind);
                break;
            case SubAgentKind::height:
                action.height = checked_enum<HeightMove>(c.index, 3, c.kind);
                break;
            case SubAgentKind::orientation:
                action.orientation = checked_enum<OrientationMove>(c.index, 3, c.kind);
                break;
            case SubAgentKind::elevation:
                action.elevation = checked_enum<ElevationMove>(c.index, 3, c.kind);
                break;
            case SubAgentKind::ris_phase:
                if (c.index > ris_configurations)
                    throw std::invalid_argument("RIS configuration index out of range");
                if (c.index < ris_configurations) action.ris = c.index;
                break;
            case SubAgentKind::ris_amplitude:
                action.amplitude = checked_enum<AmplitudeMove>(c.index, 3, c.kind);
                break;
        }
    }
    return action;
}

std::vector<SubChoice> decompose_joint_action(const DeploymentAction& action,
                                              std::span<const SubAgentKind> enabled,
                                              std::size_t ris_configurations) {
    std::vector<SubChoice> out;
    out.reserve(enabled.size());
    for (SubAgentKind k : enabled) {
        std::size_t index = 0;
        switch (k) {
            case SubAgentKind::position: index = static_cast<std::size_t>(action.position); break;
            case SubAgentKind::height: index = static_cast<std::size_t>(action.height); break;
            case SubAgentKind::orientation:
                index = static_cast<std::size_t>(action.orientation);
                break;
            case SubAgentKind::elevation: index = static_cast<std::size_t>(action.elevation); break;
            case SubAgentKind::ris_phase: index = action.ris.value_or(ris_configurations); break;
            case SubAgentKind::ris_amplitude:
                index = static_cast<std::size_t>(action.amplitude);
                break;
        }
        out.push_back({k, index});
    }
    return out;
}

std::vector<SubAgentKind> HierarchicalAgent::kinds() const {
    std::vector<SubAgentKind> out;
    for (const SubAgent& s : sub_agents) out.push_back(s.kind);
    return out;
}

HierarchicalAgent make_agent(const Environment& env, std::size_t agent,
                             const LearningConfig& learning) {
    HierarchicalAgent h;
    h.id = agent;
    const std::size_t states = env.state_count(agent, learning.state_dims);
    for (SubAgentKind kind : env.agent(agent).sub_agents)
        h.sub_agents.push_back({kind, QTable(states, env.action_count(agent, kind), learning.q_init)});
    return h;
}

std::vector<HierarchicalAgent> make_agents(const Environment& env, const LearningConfig& learning) {
    std::vector<HierarchicalAgent> out;
    for (std::size_t k = 0; k < env.agent_count(); ++k) out.push_back(make_agent(env, k, learning));
    return out;
}

bool FederationSchedule::due(std::size_t step) const {
    return enabled && period >= 1 && participants.size() >= 2 && step % period == 0;
}

FederationSchedule full_federation(std::size_t agent_count, std::size_t period) {
    FederationSchedule s;
    s.period = period;
    for (std::size_t k = 0; k < agent_count; ++k) s.participants.push_back(k);
    return s;
}

FederationSchedule no_federation() {
    FederationSchedule s;
    s.enabled = false;
    return s;
}

double exploration_rate(const LearningConfig& learning, std::size_t step,
                        std::uint64_t state_visits) {
    if (step <= learning.warmup_steps) return 1.0;
    const double eps = learning.hp.epsilon;
    switch (learning.schedule) {
        case ExplorationSchedule::fixed: return eps;
        case ExplorationSchedule::step_decay:
            return std::max(learning.min_epsilon,
                            eps * std::pow(learning.decay,
                                           static_cast<double>(step - learning.warmup_steps)));
        case ExplorationSchedule::visit_decay:
            return std::max(learning.min_epsilon,
                            eps * std::pow(learning.decay, static_cast<double>(state_visits)));
    }
    return eps;
}

EpisodeOptions EpisodeOptions::from(const ScenarioConfig& config) {
    EpisodeOptions o;
    o.start = start_index(config, config.start);
    o.seed = config.seed;
    o.budget = config.budget;
    o.window_s = config.learning.hp.window_s;
    o.noise = config.noise;
    o.patience = config.learning.patience;
    o.tolerance = config.learning.tolerance;
    o.stop_on_convergence = config.learning.stop_on_convergence;
    return o;
}

std::vector<std::size_t> Controller::observe(const Environment& env,
                                             const WorldState& world) const {
    std::vector<std::size_t> states;
    for (std::size_t k = 0; k < env.agent_count(); ++k)
        states.push_back(env.discretize_state(world, k, env.config().learning.state_dims));
    return states;
}

TrainResult run_episode(const Environment& env, Controller& controller,
                        const EpisodeOptions& options) {
    if (options.budget < 1) throw std::invalid_argument("budget must be at least 1");
    Rng policy_rng(derive_seed(options.seed, "policy"));
    Rng noise_rng(derive_seed(options.seed, "noise"));

    TrainResult result;
    WorldState world = env.reset(options.start, options.seed);
    std::vector<double> rewards;
    rewards.reserve(options.budget);

    for (std::size_t step = 1; step <= options.budget; ++step) {
        const auto states = controller.observe(env, world);
        const auto actions = controller.act(env, states, step, policy_rng);
        const auto applied = env.apply_joint_action(world, actions, controller.step_latency_s());
        const ThroughputSample sample =
            env.measure_reward(world, options.window_s, options.noise, noise_rng);
        const auto next_states = controller.observe(env, world);
        controller.learn(states, next_states, sample.reward);
        const bool federated = controller.after_step(step);

        for (std::size_t k = 0; k < env.agent_count(); ++k) {
            result.trace.records.push_back(
                make_record(step, k, states[k], actions[k], sample, federated, applied.clamped[k]));
        }
        result.true_throughput_bps.push_back(env.throughput_bps(world));
        rewards.push_back(sample.reward);
        if (options.stop_on_convergence && converged(rewards, options.patience, options.tolerance)) {
            result.converged_step = step;
            break;
        }
    }
    result.final_world = std::move(world);
    return result;
}

HierarchicalController::HierarchicalController(std::vector<HierarchicalAgent>& agents,
                                               const LearningConfig& learning,
                                               FederationSchedule schedule)
    : agents_(agents), learning_(learning), schedule_(std::move(schedule)) {
    for (std::size_t p : schedule_.participants) {
        if (p >= agents_.size())
            throw ConfigError(ConfigErrorCode::validation, "agents",
                              "federation participant out of range");
    }
}

std::vector<DeploymentAction> HierarchicalController::act(const Environment& env,
                                                          std::span<const std::size_t> states,
                                                          std::size_t step, Rng& rng) {
    std::vector<DeploymentAction> actions;
    pending_.assign(agents_.size(), {});
    for (std::size_t k = 0; k < agents_.size(); ++k) {
        std::vector<SubChoice> choices;
        for (const SubAgent& sub : agents_[k].sub_agents) {
            const double eps =
                exploration_rate(learning_, step, sub.table.state_visits(states[k]));
            const std::size_t a = select_action(sub.table, states[k], eps, rng);
            choices.push_back({sub.kind, a});
            pending_[k].push_back(a);
        }
        actions.push_back(compose_joint_action(choices, agents_[k].kinds(),
                                               env.agent(k).panel.configuration_count()));
    }
    return actions;
}

void HierarchicalController::learn(std::span<const std::size_t> states,
                                   std::span<const std::size_t> next_states, double reward) {
    const double alpha = learning_.hp.alpha;
    const double gamma = learning_.hp.gamma;
    for (std::size_t k = 0; k < agents_.size(); ++k) {
        auto& agent = agents_[k];
        for (std::size_t i = 0; i < agent.sub_agents.size(); ++i)
            q_update(agent.sub_agents[i].table, states[k], pending_[k][i], reward, next_states[k],
                     alpha, gamma);
        agent.memory.push_back({states[k], pending_[k], reward, next_states[k]});
    }
}

bool HierarchicalController::after_step(std::size_t step) {
    if (!schedule_.due(step)) return false;
    bool exchanged = false;
    for (SubAgentKind kind : {SubAgentKind::position, SubAgentKind::height,
                              SubAgentKind::orientation, SubAgentKind::elevation,
                              SubAgentKind::ris_phase, SubAgentKind::ris_amplitude}) {
        std::vector<QTable*> owners;
        for (std::size_t p : schedule_.participants) {
            for (SubAgent& sub : agents_[p].sub_agents) {
                if (sub.kind == kind) owners.push_back(&sub.table);
            }
        }
        if (owners.size() < 2) continue;
        std::vector<QTable> copies;
        copies.reserve(owners.size());
        for (QTable* t : owners) copies.push_back(*t);
        const QTable mean = federated_average(copies);
        for (QTable* t : owners) *t = mean;
        exchanged = true;
    }
    return exchanged;
}

TrainResult train(const Environment& env, std::vector<HierarchicalAgent>& agents,
                  const LearningConfig& learning, const FederationSchedule& schedule,
                  const EpisodeOptions& options) {
    if (agents.size() != env.agent_count())
        throw ConfigError(ConfigErrorCode::validation, "agents", "one learner per agent expected");
    HierarchicalController controller(agents, learning, schedule);
    return run_episode(env, controller, options);
}

}  // namespace idris
