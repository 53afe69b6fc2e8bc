#include "idris/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "idris/config_io.hpp"
#include "idris/error.hpp"
#include "idris/report.hpp"
#include "idris/trace.hpp"

#ifndef IDRIS_SCENARIO_DIR
#define IDRIS_SCENARIO_DIR "scenarios"
#endif

namespace idris {

CalibrationResult calibrate(ScenarioConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    CalibrationResult out;
    const double target_snr = channel::throughput_to_snr(config.calibration_target_bps, config.radio);
    double required = target_snr;
    if (config.scatter_floor_enabled) {
        const double residual = std::pow(10.0, target_snr / 10.0) -
                                std::pow(10.0, config.scatter_floor_snr_db / 10.0);
        if (residual <= 0.0)
            throw ConfigError(ConfigErrorCode::validation, "calibration_target_bps",
                              "target is already met by the scatter floor alone");
        required = 10.0 * std::log10(residual);
    }
    const OracleOptimum before = oracle_optimum(Environment(config));
    if (!std::isfinite(before.link_snr_db))
        throw RuntimeError("calibration: every lattice pose is blocked");
    out.adjustment_db = required - before.link_snr_db;
    config.radio.calibration_margin_db += out.adjustment_db;
    out.margin_db = config.radio.calibration_margin_db;
    out.optimum = oracle_optimum(Environment(config));
    out.throughput_bps = out.optimum.throughput_bps;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

void store_calibration_margin(const std::filesystem::path& path, double margin_db) {
    std::istringstream in(read_text_file(path));
    std::string text;
    std::string line;
    bool replaced = false;
    const std::string entry = "calibration_margin = " + format_number(margin_db);
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        const auto eq = line.find('=');
        if (first != std::string::npos && eq != std::string::npos) {
            std::string key = line.substr(first, eq - first);
            key.erase(key.find_last_not_of(" \t") + 1);
            if (key == "calibration_margin") {
                line = entry;
                replaced = true;
            }
        }
        text += line;
        text += '\n';
    }
    if (!replaced) text += entry + '\n';
    write_text_file(path, text);
}

std::filesystem::path resolve_scenario(std::string_view name_or_path) {
    const std::filesystem::path given(name_or_path);
    if (std::filesystem::exists(given) || given.has_parent_path() || given.has_extension())
        return given;
    return std::filesystem::path(IDRIS_SCENARIO_DIR) / (std::string(name_or_path) + ".cfg");
}

namespace {

struct Options {
    std::string scenario;
    std::vector<std::string> schemes;
    std::optional<std::uint64_t> seed;
    std::string seeds;
    std::optional<std::size_t> budget;
    std::string out_dir = "out";
    std::string format = "csv";
    bool no_noise = false;
    std::string start;
    std::optional<double> epsilon;
    unsigned threads = 0;
};

struct Loaded {
    std::filesystem::path path;
    ScenarioConfig config;
};

Loaded load(const Options& o) {
    Loaded l;
    l.path = resolve_scenario(o.scenario);
    l.config = load_config(l.path);
    if (o.no_noise) l.config.noise.sigma_db = 0.0;
    if (o.budget) l.config.budget = *o.budget;
    if (!o.start.empty()) {
        start_index(l.config, o.start);
        l.config.start = o.start;
    }
    return l;
}

std::uint64_t resolve_seed(const Options& o, const ScenarioConfig& config) {
    if (o.seed) return *o.seed;
    if (const char* env = std::getenv("IDRIS_SEED"); env && *env) {
        const double v = parse_number(env, "IDRIS_SEED");
        if (v < 0 || v != std::floor(v))
            throw ConfigError(ConfigErrorCode::usage, "IDRIS_SEED", "must be a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }
    return config.seed;
}

std::filesystem::path out_file(const Options& o, const std::string& stem, std::string_view ext) {
    return std::filesystem::path(o.out_dir) / (stem + "." + std::string(ext));
}

int cmd_survey(const Options& o, std::ostream& out) {
    const Loaded l = load(o);
    const Environment env(l.config);
    const OracleOptimum opt = oracle_optimum(env);
    for (std::size_t k = 0; k < env.agent_count(); ++k) {
        const Heatmap h = exhaustive_search(env, k, opt.points);
        const auto path = out_file(o, fmt::format("heatmap_{}_agent{}", l.config.name, k), "csv");
        emit_heatmap(h, path);
        const LatticePoint& p = h.best_point[h.argmax_cell];
        const Pose pose = env.pose(k, p);
        fmt::print(out, "agent {}: {} cells, {} evaluations, best {:.2f} Mbps at ({:.2f}, {:.2f}) "
                        "h={:.2f} az={:.1f} el={:.1f} ris={} -> {}\n",
                   k, h.cell_count(), h.evaluations, h.max_throughput_bps() / 1e6, pose.x, pose.y,
                   pose.height, pose.orientation_deg, pose.elevation_deg, p.ris, path.string());
    }
    fmt::print(out, "oracle optimum: {:.3f} Mbps (link snr {:.3f} dB, total snr {:.3f} dB), "
                    "no_ris {:.3f} Mbps\n",
               opt.throughput_bps / 1e6, opt.link_snr_db, opt.snr_db,
               no_ris_throughput(l.config) / 1e6);
    return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
    const Loaded l = load(o);
    const TraceFormat format = trace_format_from_string(o.format);
    const std::string scheme = o.schemes.empty() ? l.config.scheme : o.schemes.front();
    const std::uint64_t seed = resolve_seed(o, l.config);
    const Environment env(l.config);
    BenchmarkOptions bo;
    bo.epsilon = o.epsilon;
    const SchemeRun run = run_scheme(env, scheme, seed, l.config.budget, bo);
    const auto path = out_file(o, fmt::format("trace_{}_{}_seed{}", l.config.name, scheme, seed),
                               format == TraceFormat::csv ? "csv" : "json");
    emit_trace(run.result.trace, path, format);
    const SeedResult& s = run.summary;
    fmt::print(out, "{} seed {}: {} steps, converged={}, throughput {:.2f} Mbps, "
                    "deployment {:.1f} s -> {}\n",
               scheme, seed, s.steps, s.converged ? "yes" : "no",
               s.converged_throughput_bps / 1e6, s.deployment_time_s, path.string());
    return 0;
}

int cmd_bench(const Options& o, std::ostream& out) {
    const Loaded l = load(o);
    std::vector<std::string> schemes = o.schemes;
    if (schemes.empty()) {
        for (std::string_view id : scheme_ids) {
            if (id == "rl" && l.config.agents.size() != 1) continue;
            schemes.emplace_back(id);
        }
    }
    for (const std::string& s : schemes) {
        if (!is_scheme(s))
            throw ConfigError(ConfigErrorCode::usage, "--scheme", "unknown scheme '" + s + "'");
    }
    const SeedRange range = o.seeds.empty() ? l.config.seeds : parse_seed_range(o.seeds, "--seeds");
    const std::vector<std::uint64_t> seeds = range.expand();
    BenchmarkOptions bo;
    bo.epsilon = o.epsilon;
    bo.threads = o.threads;
    std::vector<BenchmarkResult> results;
    for (const std::string& s : schemes)
        results.push_back(run_benchmark(s, l.config, seeds, l.config.budget, bo));
    const Summary summary = summarize(results);
    // Single writer, after every worker has joined.
    const auto summary_path = out_file(o, "summary_" + l.config.name, "csv");
    write_text_file(summary_path, summary_to_csv(summary));
    write_text_file(out_file(o, "seeds_" + l.config.name, "csv"), seeds_to_csv(results));
    out << summary_to_table(summary);
    fmt::print(out, "-> {}\n", summary_path.string());
    return 0;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
    Loaded l = load(o);
    const CalibrationResult c = calibrate(l.config);
    store_calibration_margin(l.path, c.margin_db);
    fmt::print(out, "calibration_margin = {} (adjusted by {:+.6f} dB); optimum {:.6f} Mbps in "
                    "{:.2f} s -> {}\n",
               format_number(c.margin_db), c.adjustment_db, c.throughput_bps / 1e6, c.seconds,
               l.path.string());
    return 0;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deployment learning for movable RIS agents", "idris"};
    app.require_subcommand(1, 1);
    Options o;
    const auto common = [&](CLI::App* sub, bool training) {
        sub->add_option("--scenario", o.scenario, "Scenario file or shipped scenario name")
            ->required();
        sub->add_option("--out", o.out_dir, "Output directory");
        sub->add_flag("--no-noise", o.no_noise, "Disable measurement noise");
        sub->add_option("--start", o.start, "Start point name");
        if (!training) return;
        sub->add_option("--scheme", o.schemes, "Scheme id")->delimiter(',');
        sub->add_option("--seed", o.seed, "Seed (overrides IDRIS_SEED and the config)");
        sub->add_option("--seeds", o.seeds, "Seed range N..M");
        sub->add_option("--budget", o.budget, "Step budget");
        sub->add_option("--format", o.format, "Trace format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--epsilon", o.epsilon, "Override the exploration rate");
        sub->add_option("--threads", o.threads, "Worker threads for bench (0 = all cores)");
    };
    CLI::App* survey = app.add_subcommand("survey", "Exhaustive heatmap of every agent");
    CLI::App* train = app.add_subcommand("train", "One scheme, one seed; emits a trace");
    CLI::App* bench = app.add_subcommand("bench", "Scheme x seed sweep; emits a summary");
    CLI::App* calib = app.add_subcommand("calibrate", "Solve calibration_margin for the scenario");
    common(survey, false);
    common(train, true);
    common(bench, true);
    common(calib, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (train->parsed()) {
            if (o.schemes.size() > 1)
                throw ConfigError(ConfigErrorCode::usage, "--scheme", "train takes one scheme");
            return cmd_train(o, out);
        }
        if (bench->parsed()) return cmd_bench(o, out);
        if (survey->parsed()) return cmd_survey(o, out);
        return cmd_calibrate(o, out);
    } catch (const ConfigError& e) {
        err << "config error [" << to_string(e.code()) << "] " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace idris
