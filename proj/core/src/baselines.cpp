#include "idris/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "idris/error.hpp"
#include "idris/stats.hpp"

namespace idris {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::vector<SubAgentKind>> agent_kinds(const Environment& env) {
    std::vector<std::vector<SubAgentKind>> out;
    for (std::size_t k = 0; k < env.agent_count(); ++k) out.push_back(env.agent(k).sub_agents);
    return out;
}

DeploymentAction compose_for(const Environment& env, std::size_t agent,
                             std::span<const SubAgentKind> kinds,
                             std::span<const std::size_t> indices) {
    std::vector<SubChoice> choices;
    for (std::size_t i = 0; i < kinds.size(); ++i) choices.push_back({kinds[i], indices[i]});
    return compose_joint_action(choices, kinds, env.agent(agent).panel.configuration_count());
}

bool amplitude_enabled(const AgentConfig& a) {
    return std::find(a.sub_agents.begin(), a.sub_agents.end(), SubAgentKind::ris_amplitude) !=
           a.sub_agents.end();
}

// Per-cell configuration sweep bounds of one agent.
struct ConfigSpace {
    std::size_t heights, orientations, elevations, ris, amplitudes;
    std::size_t amplitude_first;

    std::size_t size() const { return heights * orientations * elevations * ris * amplitudes; }
};

ConfigSpace config_space(const AgentConfig& a) {
    const std::size_t amp_levels = a.amplitude.levels();
    const bool amp = amplitude_enabled(a);
    return {a.height.levels(),
            a.orientation.levels(),
            a.elevation.levels(),
            a.panel.configuration_count(),
            amp ? amp_levels : 1,
            amp ? 0 : amp_levels - 1};
}

void check_cap(std::size_t evaluations, const ScenarioConfig& config) {
    if (evaluations > config.oracle_cap)
        throw ConfigError(ConfigErrorCode::validation, "oracle_cap",
                          "lattice needs " + std::to_string(evaluations) +
                              " evaluations, above the configured cap");
}

}  // namespace

bool is_scheme(std::string_view id) {
    return std::find(scheme_ids.begin(), scheme_ids.end(), id) != scheme_ids.end();
}

BanditArmStats::BanditArmStats(std::size_t arms) : counts(arms, 0), means(arms, 0.0) {}

void BanditArmStats::update(std::size_t arm, double reward) {
    if (!std::isfinite(reward)) throw DomainError("reward must be finite");
    ++counts.at(arm);
    ++total;
    means[arm] += (reward - means[arm]) / static_cast<double>(counts[arm]);
}

std::size_t mab_step(const BanditArmStats& stats, double epsilon, Rng& rng) {
    if (stats.arms() == 0) throw ConfigError(ConfigErrorCode::validation, "sub_agents", "no arms");
    const double u = uniform01(rng);
    if (u < epsilon) return uniform_index(rng, stats.arms());
    const double best = *std::max_element(stats.means.begin(), stats.means.end());
    std::size_t ties = 0;
    for (double m : stats.means) ties += m == best ? 1 : 0;
    std::size_t pick = uniform_index(rng, ties);
    for (std::size_t a = 0; a < stats.arms(); ++a) {
        if (stats.means[a] == best && pick-- == 0) return a;
    }
    return 0;
}

std::size_t ucb1_step(const BanditArmStats& stats, double exploration, Rng& rng) {
    if (stats.arms() == 0) throw ConfigError(ConfigErrorCode::validation, "sub_agents", "no arms");
    std::vector<std::size_t> untried;
    for (std::size_t a = 0; a < stats.arms(); ++a) {
        if (stats.counts[a] == 0) untried.push_back(a);
    }
    if (!untried.empty()) return untried[uniform_index(rng, untried.size())];
    const double log_total = std::log(static_cast<double>(stats.total));
    std::size_t best = 0;
    double best_score = kNegInf;
    for (std::size_t a = 0; a < stats.arms(); ++a) {
        const double score =
            stats.means[a] +
            exploration * std::sqrt(2.0 * log_total / static_cast<double>(stats.counts[a]));
        if (score > best_score) {
            best_score = score;
            best = a;
        }
    }
    return best;
}

std::size_t random_policy_step(std::size_t action_count, Rng& rng) {
    if (action_count == 0) throw ConfigError(ConfigErrorCode::validation, "sub_agents", "empty action set");
    return uniform_index(rng, action_count);
}

std::size_t centralized_rl_step(const QTable& global_table, std::size_t joint_state,
                                double epsilon, Rng& rng) {
    return select_action(global_table, joint_state, epsilon, rng);
}

CentralizedController::CentralizedController(const Environment& env,
                                             const LearningConfig& learning,
                                             const BaselineConfig& baselines)
    : learning_(learning), latency_s_(baselines.centralized_latency_s), kinds_(agent_kinds(env)) {
    std::size_t states = 1;
    std::size_t actions = 1;
    const auto overflow = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < env.agent_count(); ++k) {
        const std::size_t s = env.state_count(k, learning_.state_dims);
        if (states > overflow / s)
            throw ConfigError(ConfigErrorCode::validation, "learning.state_dims",
                              "joint state space overflows");
        states *= s;
        state_radix_.push_back(s);
        action_radix_.emplace_back();
        for (SubAgentKind kind : kinds_[k]) {
            const std::size_t n = env.action_count(k, kind);
            action_radix_[k].push_back(n);
            if (actions > baselines.joint_action_cap / n + 1 || actions * n > baselines.joint_action_cap)
                throw ConfigError(ConfigErrorCode::validation, "baselines.joint_action_cap",
                                  "joint action space exceeds the cap; coarsen the lattice");
            actions *= n;
        }
    }
    table_ = QTable(states, actions, learning_.q_init);
}

std::size_t CentralizedController::joint_state(std::span<const std::size_t> states) const {
    std::size_t index = 0;
    for (std::size_t k = 0; k < state_radix_.size(); ++k) index = index * state_radix_[k] + states[k];
    return index;
}

std::vector<std::vector<std::size_t>> CentralizedController::decode(std::size_t joint_action) const {
    std::vector<std::vector<std::size_t>> out(action_radix_.size());
    for (std::size_t k = action_radix_.size(); k-- > 0;) {
        out[k].assign(action_radix_[k].size(), 0);
        for (std::size_t i = action_radix_[k].size(); i-- > 0;) {
            out[k][i] = joint_action % action_radix_[k][i];
            joint_action /= action_radix_[k][i];
        }
    }
    return out;
}

std::vector<DeploymentAction> CentralizedController::act(const Environment& env,
                                                         std::span<const std::size_t> states,
                                                         std::size_t step, Rng& rng) {
    const std::size_t js = joint_state(states);
    const double eps = exploration_rate(learning_, step, table_.state_visits(js));
    pending_ = centralized_rl_step(table_, js, eps, rng);
    const auto parts = decode(pending_);
    std::vector<DeploymentAction> actions;
    for (std::size_t k = 0; k < parts.size(); ++k)
        actions.push_back(compose_for(env, k, kinds_[k], parts[k]));
    return actions;
}

void CentralizedController::learn(std::span<const std::size_t> states,
                                  std::span<const std::size_t> next_states, double reward) {
    q_update(table_, joint_state(states), pending_, reward, joint_state(next_states),
             learning_.hp.alpha, learning_.hp.gamma);
}

BanditController::BanditController(const Environment& env, const LearningConfig& learning,
                                   const BaselineConfig& baselines)
    : learning_(learning), baselines_(baselines), kinds_(agent_kinds(env)) {
    for (std::size_t k = 0; k < env.agent_count(); ++k) {
        stats_.emplace_back();
        for (SubAgentKind kind : kinds_[k]) stats_[k].emplace_back(env.action_count(k, kind));
    }
}

std::vector<DeploymentAction> BanditController::act(const Environment& env,
                                                    std::span<const std::size_t>,
                                                    std::size_t step, Rng& rng) {
    const double eps = exploration_rate(learning_, step, 0);
    std::vector<DeploymentAction> actions;
    pending_.assign(stats_.size(), {});
    for (std::size_t k = 0; k < stats_.size(); ++k) {
        for (const BanditArmStats& s : stats_[k]) {
            const bool ucb = baselines_.bandit == BanditPolicy::ucb1;
            pending_[k].push_back(ucb ? ucb1_step(s, baselines_.ucb_exploration, rng)
                                      : mab_step(s, eps, rng));
        }
        actions.push_back(compose_for(env, k, kinds_[k], pending_[k]));
    }
    return actions;
}

void BanditController::learn(std::span<const std::size_t>, std::span<const std::size_t>,
                             double reward) {
    for (std::size_t k = 0; k < stats_.size(); ++k) {
        for (std::size_t i = 0; i < stats_[k].size(); ++i) stats_[k][i].update(pending_[k][i], reward);
    }
}

RandomController::RandomController(const Environment& env) : kinds_(agent_kinds(env)) {}

std::vector<DeploymentAction> RandomController::act(const Environment& env,
                                                    std::span<const std::size_t>, std::size_t,
                                                    Rng& rng) {
    std::vector<DeploymentAction> actions;
    for (std::size_t k = 0; k < kinds_.size(); ++k) {
        std::vector<std::size_t> picks;
        for (SubAgentKind kind : kinds_[k])
            picks.push_back(random_policy_step(env.action_count(k, kind), rng));
        actions.push_back(compose_for(env, k, kinds_[k], picks));
    }
    return actions;
}

double no_ris_throughput(const ScenarioConfig& config) {
    if (!config.scatter_floor_enabled) return 0.0;
    return channel::snr_to_throughput(config.scatter_floor_snr_db, config.radio);
}

std::size_t config_index(const Environment& env, std::size_t agent, const LatticePoint& p) {
    const ConfigSpace cs = config_space(env.agent(agent));
    const std::size_t amp = p.amplitude - cs.amplitude_first;
    return (((p.height * cs.orientations + p.orientation) * cs.elevations + p.elevation) * cs.ris +
            p.ris) * cs.amplitudes + amp;
}

Heatmap exhaustive_search(const Environment& env, std::size_t agent,
                          std::span<const LatticePoint> others) {
    const AgentConfig& a = env.agent(agent);
    const ConfigSpace cs = config_space(a);
    const std::size_t cells = a.area.cells_x * a.area.cells_y;
    check_cap(cells * cs.size(), env.config());

    Heatmap h;
    h.area = a.area;
    h.agent = agent;
    h.best_throughput_bps.assign(cells, 0.0);
    h.best_snr_db.assign(cells, kNegInf);
    h.best_config.assign(cells, 0);
    h.best_point.assign(cells, LatticePoint{});

    std::vector<LatticePoint> points(others.begin(), others.end());
    points.resize(env.agent_count());
    double best_overall = kNegInf;
    for (std::size_t iy = 0; iy < a.area.cells_y; ++iy) {
        for (std::size_t ix = 0; ix < a.area.cells_x; ++ix) {
            const std::size_t cell = iy * a.area.cells_x + ix;
            double best = kNegInf;
            LatticePoint best_p{ix, iy, 0, 0, 0, 0, cs.amplitude_first};
            for (std::size_t ih = 0; ih < cs.heights; ++ih)
                for (std::size_t io = 0; io < cs.orientations; ++io)
                    for (std::size_t ie = 0; ie < cs.elevations; ++ie)
                        for (std::size_t ir = 0; ir < cs.ris; ++ir)
                            for (std::size_t ia = 0; ia < cs.amplitudes; ++ia) {
                                points[agent] = {ix, iy, ih, io, ie, ir, cs.amplitude_first + ia};
                                const double snr = env.snr_db(points);
                                ++h.evaluations;
                                if (snr > best) {
                                    best = snr;
                                    best_p = points[agent];
                                }
                            }
            h.best_snr_db[cell] = best;
            h.best_throughput_bps[cell] = channel::snr_to_throughput(best, env.config().radio);
            h.best_point[cell] = best_p;
            h.best_config[cell] = config_index(env, agent, best_p);
            if (best > best_overall) {
                best_overall = best;
                h.argmax_cell = cell;
            }
        }
    }
    return h;
}

Heatmap exhaustive_search(const Environment& env, std::size_t agent) {
    if (env.agent_count() == 1) return exhaustive_search(env, agent, env.reset(0, 0).agents);
    return exhaustive_search(env, agent, oracle_optimum(env).points);
}

namespace {

struct PanelSweep {
    double gain = kNegInf;
    LatticePoint point;
};

// Best panel gain over the per-cell configurations, position and height fixed.
PanelSweep best_panel_gain(const Environment& env, std::size_t agent, LatticePoint base,
                           Vec3 source, Vec3 destination, std::size_t& evaluations) {
    const AgentConfig& a = env.agent(agent);
    const ConfigSpace cs = config_space(a);
    PanelSweep out;
    for (std::size_t io = 0; io < cs.orientations; ++io)
        for (std::size_t ie = 0; ie < cs.elevations; ++ie)
            for (std::size_t ir = 0; ir < cs.ris; ++ir)
                for (std::size_t ia = 0; ia < cs.amplitudes; ++ia) {
                    LatticePoint p = base;
                    p.orientation = io;
                    p.elevation = ie;
                    p.ris = ir;
                    p.amplitude = cs.amplitude_first + ia;
                    const Pose pose = env.pose(agent, p);
                    const channel::RisHop hop{std::cref(a.panel), {pose.x, pose.y, pose.height},
                                              pose.orientation_deg, pose.elevation_deg,
                                              env.ris_configuration(agent, p)};
                    ++evaluations;
                    const auto g = channel::ris_gain(hop, source, destination);
                    if (g && *g > out.gain) {
                        out.gain = *g;
                        out.point = p;
                    }
                }
    return out;
}

Vec3 position_of(const Environment& env, std::size_t agent, const LatticePoint& p) {
    const Pose pose = env.pose(agent, p);
    return {pose.x, pose.y, pose.height};
}

}  // namespace

OracleOptimum oracle_optimum(const Environment& env) {
    OracleOptimum best;
    if (env.agent_count() == 1) {
        const Heatmap h = exhaustive_search(env, 0, env.reset(0, 0).agents);
        best.points = {h.best_point[h.argmax_cell]};
        best.evaluations = h.evaluations;
    } else {
        // Positions and heights fix every path length; each panel's remaining
        // configuration then only affects its own gain, so the sweeps separate.
        const auto chain = env.chain_order();
        const std::size_t first = chain[0];
        const std::size_t second = chain[1];
        const AgentConfig& a0 = env.agent(first);
        const AgentConfig& a1 = env.agent(second);
        const ScenarioConfig& cfg = env.config();
        const auto blockers = std::span<const Box>(cfg.blockers);
        const Vec3 bs = env.base_station().position;
        const Vec3 rx = env.receiver().position;
        const double freq = cfg.radio.carrier_frequency_hz;

        const std::size_t places0 = a0.area.cells_x * a0.area.cells_y * a0.height.levels();
        const std::size_t places1 = a1.area.cells_x * a1.area.cells_y * a1.height.levels();
        check_cap(places0 * places1 * (config_space(a0).size() / a0.height.levels() +
                                       config_space(a1).size() / a1.height.levels()),
                  cfg);

        const auto place = [](const AgentConfig& a, std::size_t index) {
            LatticePoint p;
            p.height = index % a.height.levels();
            const std::size_t cell = index / a.height.levels();
            p.ix = cell % a.area.cells_x;
            p.iy = cell / a.area.cells_x;
            return p;
        };

        double best_score = kNegInf;
        for (std::size_t i0 = 0; i0 < places0; ++i0) {
            const LatticePoint p0 = place(a0, i0);
            const Vec3 q0 = position_of(env, first, p0);
            if (segment_blocked(bs, q0, blockers)) continue;
            const double head = env.base_station().gain_toward(normalized(q0 - bs)) -
                                channel::free_space_path_loss(norm(q0 - bs), freq);
            for (std::size_t i1 = 0; i1 < places1; ++i1) {
                const LatticePoint p1 = place(a1, i1);
                const Vec3 q1 = position_of(env, second, p1);
                if (segment_blocked(q0, q1, blockers) || segment_blocked(q1, rx, blockers)) continue;
                const double lengths = channel::free_space_path_loss(norm(q1 - q0), freq) +
                                       channel::free_space_path_loss(norm(rx - q1), freq);
                const PanelSweep g0 = best_panel_gain(env, first, p0, bs, q1, best.evaluations);
                if (g0.gain == kNegInf) continue;
                const PanelSweep g1 = best_panel_gain(env, second, p1, q0, rx, best.evaluations);
                if (g1.gain == kNegInf) continue;
                const double score = head + g0.gain + g1.gain - lengths;
                if (score > best_score) {
                    best_score = score;
                    best.points.assign(env.agent_count(), LatticePoint{});
                    best.points[first] = g0.point;
                    best.points[second] = g1.point;
                }
            }
        }
        if (best.points.empty()) best.points = env.reset(0, 0).agents;
    }
    best.link_snr_db = env.link_snr_db(best.points);
    best.snr_db = env.snr_db(best.points);
    best.throughput_bps = env.throughput_bps(best.points);
    return best;
}

void BenchmarkResult::aggregate() {
    std::vector<double> tp;
    std::vector<double> dt;
    for (const SeedResult& s : seeds) {
        tp.push_back(s.converged_throughput_bps);
        dt.push_back(s.deployment_time_s);
    }
    const MeanCi a = mean_ci95(tp);
    const MeanCi b = mean_ci95(dt);
    mean_throughput_bps = a.mean;
    ci95_throughput_bps = a.half_width;
    mean_deployment_time_s = b.mean;
    ci95_deployment_time_s = b.half_width;
}

SchemeRun run_scheme(const Environment& env, std::string_view scheme, std::uint64_t seed,
                     std::size_t budget, const BenchmarkOptions& options) {
    if (!is_scheme(scheme))
        throw ConfigError(ConfigErrorCode::validation, "scheme",
                          "unknown scheme '" + std::string(scheme) + "'");
    const ScenarioConfig& cfg = env.config();
    SchemeRun run;
    run.summary.seed = seed;
    if (scheme == "no_ris") {
        run.summary.converged_throughput_bps = no_ris_throughput(cfg);
        run.summary.final_true_throughput_bps = run.summary.converged_throughput_bps;
        run.summary.converged = true;
        return run;
    }

    LearningConfig learning = cfg.learning;
    if (options.epsilon) learning.hp.epsilon = *options.epsilon;
    EpisodeOptions episode = EpisodeOptions::from(cfg);
    episode.seed = seed;
    episode.budget = budget;
    if (options.start) episode.start = *options.start;

    if (scheme == "fmarl" || scheme == "marl" || scheme == "rl") {
        if (scheme == "rl" && env.agent_count() != 1)
            throw ConfigError(ConfigErrorCode::validation, "scheme",
                              "rl drives a single agent; use marl or fmarl");
        auto agents = make_agents(env, learning);
        const FederationSchedule schedule = scheme == "fmarl"
                                                ? full_federation(env.agent_count(), learning.hp.fl_period)
                                                : no_federation();
        run.result = train(env, agents, learning, schedule, episode);
    } else if (scheme == "centralized") {
        CentralizedController c(env, learning, cfg.baselines);
        run.result = run_episode(env, c, episode);
    } else if (scheme == "mab") {
        BanditController c(env, learning, cfg.baselines);
        run.result = run_episode(env, c, episode);
    } else {
        RandomController c(env);
        run.result = run_episode(env, c, episode);
    }

    const auto& trace = run.result.trace;
    const auto throughputs = trace.step_throughputs();
    const std::size_t tail = std::min(episode.patience, throughputs.size());
    double sum = 0.0;
    for (std::size_t i = throughputs.size() - tail; i < throughputs.size(); ++i) sum += throughputs[i];
    const DeploymentTime dt = deployment_time(trace, episode.patience, episode.tolerance);
    run.summary.converged_throughput_bps = sum / static_cast<double>(tail);
    run.summary.deployment_time_s = dt.seconds;
    run.summary.steps = dt.steps;
    run.summary.converged = dt.converged;
    run.summary.final_true_throughput_bps = run.result.true_throughput_bps.back();
    if (options.reach_target_bps > 0.0) {
        const auto& truth = run.result.true_throughput_bps;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (truth[i] >= options.reach_target_bps) {
                run.summary.reach_step = i + 1;
                break;
            }
        }
    }
    return run;
}

BenchmarkResult run_benchmark(std::string_view scheme, const ScenarioConfig& config,
                              std::span<const std::uint64_t> seeds, std::size_t budget,
                              const BenchmarkOptions& options) {
    if (!is_scheme(scheme))
        throw ConfigError(ConfigErrorCode::validation, "scheme",
                          "unknown scheme '" + std::string(scheme) + "'");
    const Environment env(config);
    BenchmarkResult result;
    result.scheme = std::string(scheme);
    result.seeds.resize(seeds.size());

    unsigned workers = options.threads ? options.threads : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(seeds.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(seeds.size());
    const auto work = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                result.seeds[i] = run_scheme(env, scheme, seeds[i], budget, options).summary;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    result.aggregate();
    return result;
}

}  // namespace idris
