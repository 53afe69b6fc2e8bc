#include <idris/baselines.hpp>
#include <idris/error.hpp>
#include <idris/stats.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "support.hpp"

namespace idris {
namespace {

TEST(BanditArmStats, incremental_mean) {
    BanditArmStats s(3);
    s.update(1, 0.2);
    s.update(1, 0.4);
    s.update(2, 1.0);
    EXPECT_DOUBLE_EQ(s.means[1], 0.3);
    EXPECT_EQ(s.counts[1], 2u);
    EXPECT_EQ(s.total, 3u);
    EXPECT_THROW(s.update(0, std::numeric_limits<double>::infinity()), DomainError);
}

TEST(MabStep, greedy_returns_best_mean_and_explores_at_epsilon) {
    BanditArmStats s(4);
    s.update(3, 0.9);
    s.update(0, 0.1);
    Rng rng(7);
    for (int i = 0; i < 200; ++i) EXPECT_EQ(mab_step(s, 0.0, rng), 3u);
    const int n = 40'000;
    int off = 0;
    for (int i = 0; i < n; ++i) off += mab_step(s, 0.4, rng) != 3u;
    EXPECT_NEAR(off / double(n), 0.4 * 3.0 / 4.0, 0.01);
}

TEST(Ucb1Step, pulls_every_arm_before_repeating) {
    BanditArmStats s(5);
    Rng rng(3);
    std::vector<bool> pulled(5, false);
    for (int i = 0; i < 5; ++i) {
        const std::size_t a = ucb1_step(s, 1.0, rng);
        EXPECT_FALSE(pulled[a]);
        pulled[a] = true;
        s.update(a, a == 2 ? 1.0 : 0.0);
    }
    EXPECT_EQ(ucb1_step(s, 1.0, rng), 2u);
}

TEST(Ucb1Step, concentrates_on_the_best_arm) {
    BanditArmStats s(3);
    Rng rng(4);
    const std::vector<double> p{0.2, 0.5, 0.8};
    for (int i = 0; i < 5000; ++i) {
        const std::size_t a = ucb1_step(s, 1.0, rng);
        s.update(a, uniform01(rng) < p[a] ? 1.0 : 0.0);
    }
    EXPECT_GT(s.counts[2], 4000u);
}

TEST(RandomPolicy, uniform_over_actions) {
    Rng rng(5);
    std::vector<int> hits(5, 0);
    const int n = 50'000;
    for (int i = 0; i < n; ++i) ++hits[random_policy_step(5, rng)];
    for (int h : hits) EXPECT_NEAR(h / double(n), 0.2, 0.01);
    EXPECT_THROW(random_policy_step(0, rng), ConfigError);
}

TEST(CentralizedController, joint_spaces_and_decode_round_trip) {
    const ScenarioConfig c = test::shipped("scenario2");
    const Environment env(c);
    const CentralizedController ctl(env, c.learning, c.baselines);
    EXPECT_EQ(ctl.joint_state_count(), 100u * 100u);
    // position(5) height(3) orientation(3) elevation(3) per agent
    EXPECT_EQ(ctl.joint_action_count(), 135u * 135u);
    std::set<std::vector<std::vector<std::size_t>>> seen;
    for (std::size_t a = 0; a < ctl.joint_action_count(); a += 97) {
        const auto parts = ctl.decode(a);
        ASSERT_EQ(parts.size(), 2u);
        ASSERT_EQ(parts[0].size(), 4u);
        EXPECT_LT(parts[0][0], 5u);
        EXPECT_LT(parts[1][3], 3u);
        EXPECT_TRUE(seen.insert(parts).second);
    }
    const std::vector<std::size_t> s{3, 7};
    EXPECT_EQ(ctl.joint_state(s), 3u * 100u + 7u);
}

TEST(CentralizedController, joint_action_cap_is_enforced) {
    ScenarioConfig c = test::shipped("scenario2");
    c.baselines.joint_action_cap = 1000;
    const Environment env(c);
    try {
        CentralizedController ctl(env, c.learning, c.baselines);
        FAIL() << "expected a ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "baselines.joint_action_cap");
    }
}

TEST(NoRis, throughput_is_the_scatter_floor_rate) {
    ScenarioConfig c = test::shipped("scenario1");
    EXPECT_NEAR(no_ris_throughput(c) / 1e6, 39.6, 0.05);
    c.scatter_floor_enabled = false;
    EXPECT_EQ(no_ris_throughput(c), 0.0);
}

TEST(ExhaustiveSearch, covers_every_cell_and_configuration) {
    const Environment env(test::shipped("scenario1"));
    const AgentConfig& a = env.agent(0);
    const Heatmap h = exhaustive_search(env);
    EXPECT_EQ(h.cell_count(), 100u);
    EXPECT_EQ(h.evaluations,
              100u * a.height.levels() * a.orientation.levels() * a.elevation.levels());
    EXPECT_EQ(*std::max_element(h.best_throughput_bps.begin(), h.best_throughput_bps.end()),
              h.max_throughput_bps());
}

TEST(ExhaustiveSearch, cell_maxima_match_an_independent_resweep) {
    const Environment env(test::tiny_config());
    const AgentConfig& a = env.agent(0);
    const Heatmap h = exhaustive_search(env);
    for (std::size_t iy = 0; iy < a.area.cells_y; ++iy)
        for (std::size_t ix = 0; ix < a.area.cells_x; ++ix) {
            double best = 0.0;
            for (std::size_t ih = 0; ih < a.height.levels(); ++ih)
                for (std::size_t io = 0; io < a.orientation.levels(); ++io) {
                    WorldState w = env.reset(0, 0);
                    w.agents[0] = {ix, iy, ih, io, 0, 0, w.agents[0].amplitude};
                    best = std::max(best, env.throughput_bps(w));
                }
            const std::size_t cell = iy * a.area.cells_x + ix;
            EXPECT_DOUBLE_EQ(h.best_throughput_bps[cell], best);
            const std::vector<LatticePoint> at{h.best_point[cell]};
            EXPECT_DOUBLE_EQ(env.throughput_bps(at), best);
        }
}

TEST(ExhaustiveSearch, oracle_cap_guards_the_sweep) {
    ScenarioConfig c = test::tiny_config();
    c.oracle_cap = 10;
    const Environment env(c);
    EXPECT_THROW(exhaustive_search(env), ConfigError);
}

TEST(ConfigIndex, flattens_in_row_major_order) {
    const Environment env(test::tiny_config());
    const std::size_t top = env.agent(0).amplitude.levels() - 1;
    EXPECT_EQ(config_index(env, 0, {0, 0, 0, 0, 0, 0, top}), 0u);
    EXPECT_EQ(config_index(env, 0, {0, 0, 0, 2, 0, 0, top}), 2u);
    EXPECT_EQ(config_index(env, 0, {0, 0, 1, 1, 0, 0, top}), 4u);
}

TEST(OracleOptimum, two_agent_search_beats_every_sampled_pose) {
    const Environment env(test::shipped("scenario2"));
    const OracleOptimum o = oracle_optimum(env);
    ASSERT_EQ(o.points.size(), 2u);
    EXPECT_DOUBLE_EQ(o.throughput_bps, env.throughput_bps(o.points));
    Rng rng(6);
    for (int i = 0; i < 2000; ++i) {
        std::vector<LatticePoint> p(2);
        for (std::size_t k = 0; k < 2; ++k) {
            const AgentConfig& a = env.agent(k);
            p[k] = {uniform_index(rng, a.area.cells_x), uniform_index(rng, a.area.cells_y),
                    uniform_index(rng, a.height.levels()), uniform_index(rng, a.orientation.levels()),
                    uniform_index(rng, a.elevation.levels()), 0, a.amplitude.levels() - 1};
        }
        EXPECT_LE(env.link_snr_db(p), o.link_snr_db + 1e-9);
    }
}

TEST(BenchmarkResult, aggregate_matches_sample_statistics) {
    BenchmarkResult r;
    for (double v : {1.0, 2.0, 3.0, 4.0}) {
        SeedResult s;
        s.converged_throughput_bps = v;
        s.deployment_time_s = 10 * v;
        r.seeds.push_back(s);
    }
    r.aggregate();
    EXPECT_DOUBLE_EQ(r.mean_throughput_bps, 2.5);
    EXPECT_NEAR(r.ci95_throughput_bps, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.mean_deployment_time_s, 25.0);
}

TEST(MeanCi95, single_sample_has_zero_width) {
    const std::vector<double> one{3.0};
    const MeanCi m = mean_ci95(one);
    EXPECT_EQ(m.mean, 3.0);
    EXPECT_EQ(m.half_width, 0.0);
    EXPECT_EQ(m.n, 1u);
}

TEST(RunScheme, rejects_unknown_scheme_and_multi_agent_rl) {
    const Environment two(test::shipped("scenario2"));
    try {
        run_scheme(two, "rl", 1, 5);
        FAIL() << "expected a ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "scheme");
    }
    EXPECT_THROW(run_scheme(two, "nosuch", 1, 5), ConfigError);
    EXPECT_FALSE(is_scheme("nosuch"));
}

TEST(RunScheme, every_scheme_runs_within_budget) {
    const Environment env(test::tiny_config());
    for (std::string_view id : scheme_ids) {
        const SchemeRun r = run_scheme(env, id, 3, 12);
        if (id == "no_ris") {
            EXPECT_TRUE(r.result.trace.records.empty());
            continue;
        }
        EXPECT_EQ(r.result.trace.step_count(), 12u) << id;
        EXPECT_GE(r.summary.converged_throughput_bps, 0.0);
        EXPECT_LE(r.summary.converged_throughput_bps, env.config().radio.throughput_cap_bps);
    }
}

TEST(RunScheme, centralized_pays_controller_latency) {
    ScenarioConfig c = test::tiny_config();
    c.baselines.centralized_latency_s = 7.0;
    const Environment env(c);
    const auto central = run_scheme(env, "centralized", 3, 5).result.trace;
    const auto random = run_scheme(env, "random", 3, 5).result.trace;
    EXPECT_GE(central.records.back().clock_s, 5 * (7.0 + c.learning.hp.window_s));
    EXPECT_LT(random.records.back().clock_s, central.records.back().clock_s);
}

TEST(RunBenchmark, threads_do_not_change_results) {
    const ScenarioConfig c = test::tiny_config();
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
    BenchmarkOptions one;
    one.threads = 1;
    BenchmarkOptions many;
    many.threads = 3;
    const auto a = run_benchmark("fmarl", c, seeds, 15, one);
    const auto b = run_benchmark("fmarl", c, seeds, 15, many);
    EXPECT_EQ(a.seeds, b.seeds);
    EXPECT_EQ(a.mean_throughput_bps, b.mean_throughput_bps);
}

}  // namespace
}  // namespace idris
