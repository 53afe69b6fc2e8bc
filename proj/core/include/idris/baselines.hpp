#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idris/config.hpp"
#include "idris/environment.hpp"
#include "idris/fmarl.hpp"
#include "idris/qtable.hpp"

namespace idris {

inline constexpr std::array<std::string_view, 7> scheme_ids{
    "fmarl", "centralized", "marl", "rl", "mab", "random", "no_ris"};

bool is_scheme(std::string_view id);

struct BanditArmStats {
    std::vector<std::uint64_t> counts;
    std::vector<double> means;
    std::uint64_t total = 0;

    explicit BanditArmStats(std::size_t arms = 0);
    std::size_t arms() const { return counts.size(); }
    void update(std::size_t arm, double reward);
};

// Epsilon-greedy over arm means with uniform tie-breaking.
std::size_t mab_step(const BanditArmStats& stats, double epsilon, Rng& rng);
// UCB1; untried arms are pulled first, in random order.
std::size_t ucb1_step(const BanditArmStats& stats, double exploration, Rng& rng);
std::size_t random_policy_step(std::size_t action_count, Rng& rng);

std::size_t centralized_rl_step(const QTable& global_table, std::size_t joint_state,
                                double epsilon, Rng& rng);

// One global table over the product of all agents' states and sub-actions.
class CentralizedController : public Controller {
public:
    CentralizedController(const Environment& env, const LearningConfig& learning,
                          const BaselineConfig& baselines);

    std::size_t joint_state(std::span<const std::size_t> states) const;
    std::size_t joint_state_count() const { return table_.state_count(); }
    std::size_t joint_action_count() const { return table_.action_count(); }
    std::vector<std::vector<std::size_t>> decode(std::size_t joint_action) const;
    const QTable& table() const { return table_; }

    std::vector<DeploymentAction> act(const Environment& env, std::span<const std::size_t> states,
                                      std::size_t step, Rng& rng) override;
    void learn(std::span<const std::size_t> states, std::span<const std::size_t> next_states,
               double reward) override;
    double step_latency_s() const override { return latency_s_; }

private:
    LearningConfig learning_;
    double latency_s_;
    std::vector<std::size_t> state_radix_;
    std::vector<std::vector<std::size_t>> action_radix_;  // per agent, per sub-agent
    std::vector<std::vector<SubAgentKind>> kinds_;
    QTable table_;
    std::size_t pending_ = 0;
};

class BanditController : public Controller {
public:
    BanditController(const Environment& env, const LearningConfig& learning,
                     const BaselineConfig& baselines);

    std::vector<DeploymentAction> act(const Environment& env, std::span<const std::size_t> states,
                                      std::size_t step, Rng& rng) override;
    void learn(std::span<const std::size_t> states, std::span<const std::size_t> next_states,
               double reward) override;

    const BanditArmStats& stats(std::size_t agent, std::size_t sub_agent) const {
        return stats_.at(agent).at(sub_agent);
    }

private:
    LearningConfig learning_;
    BaselineConfig baselines_;
    std::vector<std::vector<SubAgentKind>> kinds_;
    std::vector<std::vector<BanditArmStats>> stats_;
    std::vector<std::vector<std::size_t>> pending_;
};

class RandomController : public Controller {
public:
    explicit RandomController(const Environment& env);

    std::vector<DeploymentAction> act(const Environment& env, std::span<const std::size_t> states,
                                      std::size_t step, Rng& rng) override;
    void learn(std::span<const std::size_t>, std::span<const std::size_t>, double) override {}

private:
    std::vector<std::vector<SubAgentKind>> kinds_;
};

double no_ris_throughput(const ScenarioConfig& config);

struct Heatmap {
    DeploymentArea area;
    std::size_t agent = 0;
    std::vector<double> best_throughput_bps;  // row-major: index = iy * cells_x + ix
    std::vector<double> best_snr_db;
    std::vector<std::size_t> best_config;
    std::vector<LatticePoint> best_point;
    std::size_t evaluations = 0;
    std::size_t argmax_cell = 0;

    std::size_t cell_count() const { return best_throughput_bps.size(); }
    double max_throughput_bps() const { return best_throughput_bps.at(argmax_cell); }
};

// Flattened (height, orientation, elevation, ris, amplitude) index of a point.
std::size_t config_index(const Environment& env, std::size_t agent, const LatticePoint& point);

// Every lattice pose of one agent, the others held at `others` (the entry
// for `agent` is ignored). Noise-free.
Heatmap exhaustive_search(const Environment& env, std::size_t agent,
                          std::span<const LatticePoint> others);
Heatmap exhaustive_search(const Environment& env, std::size_t agent = 0);

struct OracleOptimum {
    std::vector<LatticePoint> points;
    double link_snr_db = 0.0;
    double snr_db = 0.0;
    double throughput_bps = 0.0;
    std::size_t evaluations = 0;
};

// Joint noise-free optimum over all agents' lattices.
OracleOptimum oracle_optimum(const Environment& env);

struct SeedResult {
    std::uint64_t seed = 0;
    double converged_throughput_bps = 0.0;
    double deployment_time_s = 0.0;
    std::size_t steps = 0;
    bool converged = false;
    double final_true_throughput_bps = 0.0;
    std::optional<std::size_t> reach_step;

    friend bool operator==(const SeedResult&, const SeedResult&) = default;
};

struct BenchmarkResult {
    std::string scheme;
    std::vector<SeedResult> seeds;
    double mean_throughput_bps = 0.0;
    double ci95_throughput_bps = 0.0;
    double mean_deployment_time_s = 0.0;
    double ci95_deployment_time_s = 0.0;

    void aggregate();
};

struct BenchmarkOptions {
    std::optional<std::size_t> start;        // defaults to the scenario's start
    std::optional<double> epsilon;           // overrides the scenario's epsilon
    double reach_target_bps = 0.0;           // 0 disables reach tracking
    unsigned threads = 0;                    // 0 = hardware concurrency
};

struct SchemeRun {
    TrainResult result;  // empty for no_ris
    SeedResult summary;
};

SchemeRun run_scheme(const Environment& env, std::string_view scheme, std::uint64_t seed,
                     std::size_t budget, const BenchmarkOptions& options = {});

BenchmarkResult run_benchmark(std::string_view scheme, const ScenarioConfig& config,
                              std::span<const std::uint64_t> seeds, std::size_t budget,
                              const BenchmarkOptions& options = {});

}  // namespace idris
