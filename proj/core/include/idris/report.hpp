#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idris/baselines.hpp"

namespace idris {

inline constexpr std::string_view heatmap_csv_header =
    "x_m,y_m,best_throughput_bps,best_config_index";

std::string heatmap_to_csv(const Heatmap& heatmap);
void emit_heatmap(const Heatmap& heatmap, const std::filesystem::path& path);

struct SummaryRow {
    std::string scheme;
    std::size_t seeds = 0;
    std::size_t converged_seeds = 0;
    double mean_throughput_bps = 0.0;
    std::optional<double> ci95_throughput_bps;  // nullopt below two seeds
    double mean_deployment_time_s = 0.0;
    std::optional<double> ci95_deployment_time_s;
    std::size_t throughput_rank = 0;  // 1 = highest mean throughput
};

struct Summary {
    std::vector<SummaryRow> rows;
    bool fmarl_highest = false;  // FMARL mean throughput >= every other scheme
    std::optional<double> improvement_ratio;  // FMARL over no_ris, when both ran

    const SummaryRow* find(std::string_view scheme) const;
};

Summary summarize(std::span<const BenchmarkResult> results);

inline constexpr std::string_view summary_csv_header =
    "scheme,seeds,converged_seeds,mean_throughput_bps,ci95_throughput_bps,"
    "mean_deployment_time_s,ci95_deployment_time_s,throughput_rank,fmarl_highest";

std::string summary_to_csv(const Summary& summary);
std::string summary_to_table(const Summary& summary);

// Per-seed rows behind a summary, so aggregates can be recomputed.
inline constexpr std::string_view seeds_csv_header =
    "scheme,seed,converged_throughput_bps,deployment_time_s,steps,converged,"
    "final_true_throughput_bps,reach_step";

std::string seeds_to_csv(std::span<const BenchmarkResult> results);

}  // namespace idris
