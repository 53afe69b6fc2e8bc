// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <idris/baselines.hpp>
#include <idris/channel.hpp>
#include <idris/config_io.hpp>
#include <idris/harness.hpp>
#include <idris/qtable.hpp>
#include <idris/report.hpp>
#include <idris/stats.hpp>
#include <idris/trace.hpp>

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"

namespace {

using namespace idris;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    fmt::print("{} criterion {}: {} ({})\n", ok ? "PASS" : "FAIL", id, what, detail);
    std::fflush(stdout);
    if (!ok) ++failures;
}

struct Stat {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

Stat stat_of(std::span<const double> xs) {
    const MeanCi m = mean_ci95(xs);
    return {m.mean, m.half_width / 1.96, m.n};
}

// One-sided Welch z at the 95% level.
constexpr double kZ95 = 1.6449;
double welch_z(const Stat& a, const Stat& b) {
    const double se = std::sqrt(a.se * a.se + b.se * b.se);
    if (se == 0.0) return a.mean == b.mean ? 0.0 : (a.mean > b.mean ? INFINITY : -INFINITY);
    return (a.mean - b.mean) / se;
}
// a >= b: a is not significantly below b.
bool not_below(const Stat& a, const Stat& b) { return welch_z(a, b) > -kZ95; }
// a > b with significance.
bool above(const Stat& a, const Stat& b) { return welch_z(a, b) > kZ95; }

std::vector<std::uint64_t> seed_list(std::uint64_t first, std::uint64_t last) {
    return SeedRange{first, last}.expand();
}

ScenarioConfig calibrated(const std::string& name) {
    ScenarioConfig c = test::shipped(name);
    calibrate(c);
    return c;
}

// ---------------------------------------------------------------- 1
void criterion_calibration() {
    std::string detail;
    bool ok = true;
    for (const auto& [name, target] : {std::pair{"scenario1", 980.0}, std::pair{"scenario2", 600.0}}) {
        ScenarioConfig c = test::shipped(name);
        c.radio.calibration_margin_db = 0.0;
        const auto t0 = Clock::now();
        const CalibrationResult r = calibrate(c);
        const double secs = seconds_since(t0);
        const double mbps = r.throughput_bps / 1e6;
        ok = ok && std::abs(mbps - target) <= 1.0 && secs < 10.0;
        detail += fmt::format("{}{} {:.3f} Mbps in {:.2f} s", detail.empty() ? "" : "; ", name, mbps,
                              secs);
    }
    report(1, ok, "calibrated oracle optima at 980 and 600 Mbps within 1 Mbps, < 10 s each", detail);
}

// ---------------------------------------------------------------- 2
void criterion_start_points(const ScenarioConfig& s1) {
    const auto t0 = Clock::now();
    const Environment env(s1);
    const double target = 0.95 * oracle_optimum(env).throughput_bps;
    const auto seeds = seed_list(1, 10);
    bool ok = true;
    std::string detail;
    std::map<std::string, double> mean_steps;
    for (std::size_t start = 0; start < s1.starts.size(); ++start) {
        BenchmarkOptions bo;
        bo.start = start;
        bo.reach_target_bps = target;
        std::size_t reached = 0;
        std::vector<double> steps;
        for (std::uint64_t seed : seeds) {
            const SeedResult r = run_scheme(env, "fmarl", seed, 300, bo).summary;
            if (r.reach_step) {
                ++reached;
                steps.push_back(static_cast<double>(*r.reach_step));
            }
        }
        const double mean =
            steps.empty() ? INFINITY : std::accumulate(steps.begin(), steps.end(), 0.0) / steps.size();
        mean_steps[s1.starts[start].name] = mean;
        ok = ok && reached >= 8;
        detail += fmt::format("{}={}/10 mean step {:.1f}; ", s1.starts[start].name, reached, mean);
    }
    const bool order = mean_steps.at("near_optimal") < mean_steps.at("low_rate");
    const double secs = seconds_since(t0);
    ok = ok && order && secs < 120.0;
    detail += fmt::format("near<low {}; {:.1f} s", order ? "yes" : "no", secs);
    report(2, ok, "FMARL reaches 95% of the heatmap optimum from every start in >= 8/10 seeds", detail);
}

// ---------------------------------------------------------------- 3
void criterion_scheme_ordering(const ScenarioConfig& s2) {
    const auto t0 = Clock::now();
    const auto seeds = seed_list(1, 20);
    std::map<std::string, Stat> tp;
    std::map<std::string, Stat> dt;
    for (std::string_view id : {"fmarl", "centralized", "marl", "mab", "random", "no_ris"}) {
        const BenchmarkResult r = run_benchmark(id, s2, seeds, s2.budget);
        std::vector<double> t;
        std::vector<double> d;
        for (const SeedResult& s : r.seeds) {
            t.push_back(s.converged_throughput_bps);
            d.push_back(s.deployment_time_s);
        }
        tp[std::string(id)] = stat_of(t);
        dt[std::string(id)] = stat_of(d);
    }
    const bool chain = not_below(tp["fmarl"], tp["centralized"]) &&
                       not_below(tp["centralized"], tp["marl"]);
    bool worst = true;
    for (const char* low : {"random", "no_ris"})
        for (const char* high : {"fmarl", "centralized", "marl", "mab"})
            worst = worst && above(tp[high], tp[low]);
    const bool faster = above(dt["centralized"], dt["fmarl"]);
    const double secs = seconds_since(t0);
    std::string detail;
    for (const auto& [id, s] : tp) detail += fmt::format("{} {:.1f} Mbps; ", id, s.mean / 1e6);
    detail += fmt::format("time fmarl {:.0f} s vs centralized {:.0f} s; chain {} worst {} faster {}; {:.1f} s",
                          dt["fmarl"].mean, dt["centralized"].mean, chain ? "yes" : "no",
                          worst ? "yes" : "no", faster ? "yes" : "no", secs);
    report(3, chain && worst && faster && secs < 600.0,
           "dual-area ordering fmarl >= centralized >= marl, random and no_ris worst, fmarl faster",
           detail);
}

// ---------------------------------------------------------------- 4, 5, 6
struct Scenario1Runs {
    std::vector<SeedResult> eps015;
    std::vector<SeedResult> eps030;
};

Scenario1Runs run_scenario1(const ScenarioConfig& s1) {
    const auto seeds = seed_list(1, 20);
    Scenario1Runs out;
    for (std::size_t start = 0; start < s1.starts.size(); ++start) {
        for (double eps : {0.15, 0.3}) {
            BenchmarkOptions bo;
            bo.start = start;
            bo.epsilon = eps;
            const BenchmarkResult r = run_benchmark("fmarl", s1, seeds, s1.budget, bo);
            auto& dst = eps == 0.15 ? out.eps015 : out.eps030;
            dst.insert(dst.end(), r.seeds.begin(), r.seeds.end());
        }
    }
    return out;
}

std::vector<double> throughputs(const std::vector<SeedResult>& rs) {
    std::vector<double> v;
    for (const SeedResult& r : rs) v.push_back(r.converged_throughput_bps);
    return v;
}

void criterion_exploration(const Scenario1Runs& runs) {
    const Stat lo = stat_of(throughputs(runs.eps015));
    const Stat hi = stat_of(throughputs(runs.eps030));
    report(4, hi.mean < lo.mean, "epsilon 0.3 yields lower mean converged throughput than 0.15",
           fmt::format("0.15: {:.1f} Mbps, 0.3: {:.1f} Mbps over {} runs (20 seeds x 3 starts)",
                       lo.mean / 1e6, hi.mean / 1e6, lo.n));
}

void criterion_improvement(const ScenarioConfig& s1, const ScenarioConfig& s2,
                           const Scenario1Runs& runs) {
    const auto seeds = seed_list(1, 20);
    const double s1_fmarl = stat_of(throughputs(runs.eps015)).mean;
    const double s2_fmarl = run_benchmark("fmarl", s2, seeds, s2.budget).mean_throughput_bps;
    const double r1 = s1_fmarl / no_ris_throughput(s1);
    const double r2 = s2_fmarl / no_ris_throughput(s2);
    const double best = std::max(r1, r2);
    report(5, best >= 1.2 && best <= 40.0,
           "best FMARL / no_ris improvement ratio within [1.2, 40]",
           fmt::format("scenario1 {:.2f}x, scenario2 {:.2f}x, best {:.2f}x (reference range 1.2-3.6x)",
                       r1, r2, best));
}

void criterion_overhead(const Scenario1Runs& runs) {
    std::size_t converged = 0;
    std::size_t fast = 0;
    for (const SeedResult& r : runs.eps015) {
        if (!r.converged) continue;
        ++converged;
        fast += r.deployment_time_s < 600.0;
    }
    const bool ok = converged > 0 && fast * 5 >= converged * 4;
    report(6, ok, ">= 80% of converged scenario-1 FMARL seeds deploy in < 600 s",
           fmt::format("{} of {} converged seeds under 600 s, {} runs total", fast, converged,
                       runs.eps015.size()));
}

// ---------------------------------------------------------------- 7
void criterion_gridworld() {
    const auto t0 = Clock::now();
    constexpr std::size_t side = 3, states = 9, goal = 8, actions = 4;
    constexpr double gamma = 0.9;
    const auto step = [](std::size_t s, std::size_t a) {
        std::size_t x = s % side, y = s / side;
        if (a == 0) y = std::min(y + 1, side - 1);
        if (a == 1) y = y ? y - 1 : 0;
        if (a == 2) x = x ? x - 1 : 0;
        if (a == 3) x = std::min(x + 1, side - 1);
        return y * side + x;
    };
    std::array<std::array<double, actions>, states> vi{};
    for (int sweep = 0; sweep < 200; ++sweep)
        for (std::size_t s = 0; s < goal; ++s)
            for (std::size_t a = 0; a < actions; ++a) {
                const std::size_t n = step(s, a);
                vi[s][a] = n == goal ? 1.0 : gamma * *std::max_element(vi[n].begin(), vi[n].end());
            }
    QTable q(states, actions);
    Rng rng(7);
    for (int ep = 0; ep < 4000; ++ep) {
        std::size_t s = uniform_index(rng, goal);
        for (int k = 0; k < 50 && s != goal; ++k) {
            const std::size_t a = uniform_index(rng, actions);
            const std::size_t n = step(s, a);
            q_update(q, s, a, n == goal ? 1.0 : 0.0, n, 0.2, gamma, n == goal);
            s = n;
        }
    }
    std::size_t agree = 0;
    for (std::size_t s = 0; s < goal; ++s) {
        const auto v = q.values(s);
        const double best = *std::max_element(vi[s].begin(), vi[s].end());
        bool same = true;
        for (std::size_t a = 0; a < actions; ++a) {
            const bool q_greedy = v[a] == *std::max_element(v.begin(), v.end());
            const bool vi_greedy = std::abs(vi[s][a] - best) < 1e-12;
            same = same && q_greedy == vi_greedy;
        }
        agree += same;
    }
    const double secs = seconds_since(t0);
    report(7, agree == goal && secs < 5.0, "Q-learning greedy policy equals value iteration on 3x3",
           fmt::format("{}/{} states agree in {:.3f} s", agree, goal, secs));
}

// ---------------------------------------------------------------- 8
void criterion_properties(const ScenarioConfig& s1, const ScenarioConfig& s2) {
    std::vector<std::string> broken;
    const auto check = [&](bool ok, const char* name) {
        if (!ok) broken.emplace_back(name);
    };
    Rng rng(2025);
    std::uniform_real_distribution<double> dist(0.1, 200.0);
    std::uniform_real_distribution<double> snr(-40.0, 60.0);
    const channel::RadioParams radio;

    bool friis = true;
    bool cap = true;
    for (int i = 0; i < 1000; ++i) {
        const double d = dist(rng);
        const double l = channel::free_space_path_loss(d, 28e9);
        friis = friis && std::abs(channel::free_space_path_loss(2 * d, 28e9) - l - 6.0206) < 1e-3 &&
                channel::free_space_path_loss(d * 1.001, 28e9) > l;
        const double a = snr(rng), b = snr(rng);
        const double ta = channel::snr_to_throughput(a, radio), tb = channel::snr_to_throughput(b, radio);
        cap = cap && ta <= radio.throughput_cap_bps && ((a <= b) == (ta <= tb) || ta == tb);
    }
    check(friis, "friis");
    check(cap, "throughput");

    QTable bounded(10, 5);
    for (int i = 0; i < 200'000; ++i)
        q_update(bounded, uniform_index(rng, 10), uniform_index(rng, 5), uniform01(rng),
                 uniform_index(rng, 10), 0.5, 0.5);
    bool in_bound = true;
    for (std::size_t s = 0; s < 10; ++s)
        for (double v : bounded.values(s)) in_bound = in_bound && v >= 0.0 && v <= 2.0;
    check(in_bound, "q-bound");

    QTable a(4, 3), b(4, 3);
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t k = 0; k < 3; ++k) {
            a.set(s, k, uniform01(rng));
            b.set(s, k, uniform01(rng));
        }
    const std::vector<QTable> pair{a, b};
    const QTable m = federated_average(pair);
    const std::vector<QTable> twice{m, m};
    const QTable mm = federated_average(twice);
    bool mean_ok = true;
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t k = 0; k < 3; ++k)
            mean_ok = mean_ok && std::abs(2 * m.value(s, k) - a.value(s, k) - b.value(s, k)) < 1e-12 &&
                      mm.value(s, k) == m.value(s, k);
    check(mean_ok, "federation");

    bool affine = true;
    for (int i = 0; i < 200; ++i) {
        QTable t(1, 6), u(1, 6);
        const double scale = 0.1 + uniform01(rng) * 5, shift = uniform01(rng) * 3 - 1.5;
        for (std::size_t k = 0; k < 6; ++k) {
            const double v = std::round(uniform01(rng) * 8) / 8;
            t.set(0, k, v);
            u.set(0, k, scale * v + shift);
        }
        Rng r1(i), r2(i);
        affine = affine && select_action(t, 0, 0.0, r1) == select_action(u, 0, 0.0, r2);
    }
    check(affine, "argmax-affine");

    const Environment env1(s1);
    const Environment env2(s2);
    bool deterministic = true;
    for (std::uint64_t seed : {3u, 11u}) {
        deterministic = deterministic &&
                        trace_to_csv(run_scheme(env2, "fmarl", seed, 60).result.trace) ==
                            trace_to_csv(run_scheme(env2, "fmarl", seed, 60).result.trace);
    }
    check(deterministic, "trace-determinism");

    const EpisodeTrace trace = run_scheme(env2, "fmarl", 5, 40).result.trace;
    check(trace_from_csv(trace_to_csv(trace)) == trace && trace_from_json(trace_to_json(trace)) == trace,
          "round-trip");
    const ScenarioConfig back = parse_config(serialize_config(s2));
    check(back == s2, "config-round-trip");

    const Heatmap h = exhaustive_search(env1);
    const AgentConfig& ag = s1.agents[0];
    check(h.cell_count() == 100 &&
              h.evaluations == 100 * ag.height.levels() * ag.orientation.levels() * ag.elevation.levels(),
          "lattice-cardinality");

    std::string detail = broken.empty() ? "all properties hold" : "broken:";
    for (const auto& b : broken) detail += " " + b;
    report(8, broken.empty(), "property suites", detail);
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    criterion_calibration();
    const ScenarioConfig s1 = calibrated("scenario1");
    const ScenarioConfig s2 = calibrated("scenario2");
    criterion_start_points(s1);
    criterion_scheme_ordering(s2);
    const Scenario1Runs runs = run_scenario1(s1);
    criterion_exploration(runs);
    criterion_improvement(s1, s2, runs);
    criterion_overhead(runs);
    criterion_gridworld();
    criterion_properties(s1, s2);
    fmt::print("{} of 8 criteria failed; {:.1f} s total\n", failures, seconds_since(t0));
    return failures;
}
