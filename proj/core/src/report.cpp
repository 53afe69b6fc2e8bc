#include "idris/report.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "idris/config_io.hpp"
#include "idris/stats.hpp"
#include "idris/trace.hpp"

namespace idris {

namespace {

std::string optional_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string("n/a");
}

}  // namespace

std::string heatmap_to_csv(const Heatmap& heatmap) {
    std::string out(heatmap_csv_header);
    out += '\n';
    const DeploymentArea& a = heatmap.area;
    for (std::size_t iy = 0; iy < a.cells_y; ++iy) {
        for (std::size_t ix = 0; ix < a.cells_x; ++ix) {
            const std::size_t cell = iy * a.cells_x + ix;
            out += fmt::format("{},{},{},{}\n", format_number(a.cell_center_x(ix)),
                               format_number(a.cell_center_y(iy)),
                               format_number(heatmap.best_throughput_bps.at(cell)),
                               heatmap.best_config.at(cell));
        }
    }
    return out;
}

void emit_heatmap(const Heatmap& heatmap, const std::filesystem::path& path) {
    write_text_file(path, heatmap_to_csv(heatmap));
}

const SummaryRow* Summary::find(std::string_view scheme) const {
    for (const SummaryRow& r : rows) {
        if (r.scheme == scheme) return &r;
    }
    return nullptr;
}

Summary summarize(std::span<const BenchmarkResult> results) {
    if (results.empty()) throw std::invalid_argument("summarize: no results");
    Summary s;
    for (const BenchmarkResult& r : results) {
        std::vector<double> tp;
        std::vector<double> dt;
        SummaryRow row;
        row.scheme = r.scheme;
        row.seeds = r.seeds.size();
        for (const SeedResult& seed : r.seeds) {
            tp.push_back(seed.converged_throughput_bps);
            dt.push_back(seed.deployment_time_s);
            row.converged_seeds += seed.converged ? 1 : 0;
        }
        const MeanCi a = mean_ci95(tp);
        const MeanCi b = mean_ci95(dt);
        row.mean_throughput_bps = a.mean;
        row.mean_deployment_time_s = b.mean;
        if (a.n > 1) row.ci95_throughput_bps = a.half_width;
        if (b.n > 1) row.ci95_deployment_time_s = b.half_width;
        s.rows.push_back(std::move(row));
    }
    for (SummaryRow& row : s.rows) {
        row.throughput_rank = 1;
        for (const SummaryRow& other : s.rows)
            row.throughput_rank += other.mean_throughput_bps > row.mean_throughput_bps ? 1 : 0;
    }
    if (const SummaryRow* f = s.find("fmarl")) {
        s.fmarl_highest = std::all_of(s.rows.begin(), s.rows.end(), [&](const SummaryRow& r) {
            return f->mean_throughput_bps >= r.mean_throughput_bps;
        });
        const SummaryRow* base = s.find("no_ris");
        if (base && base->mean_throughput_bps > 0.0)
            s.improvement_ratio = f->mean_throughput_bps / base->mean_throughput_bps;
    }
    return s;
}

std::string summary_to_csv(const Summary& summary) {
    std::string out(summary_csv_header);
    out += '\n';
    for (const SummaryRow& r : summary.rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.scheme, r.seeds, r.converged_seeds,
                           format_number(r.mean_throughput_bps),
                           optional_number(r.ci95_throughput_bps),
                           format_number(r.mean_deployment_time_s),
                           optional_number(r.ci95_deployment_time_s), r.throughput_rank,
                           summary.fmarl_highest ? 1 : 0);
    }
    return out;
}

std::string summary_to_table(const Summary& summary) {
    const auto ci = [](const std::optional<double>& v, double scale) {
        return v ? fmt::format("{:.2f}", *v / scale) : std::string("n/a");
    };
    std::string out = fmt::format("{:<12} {:>5} {:>5} {:>14} {:>9} {:>12} {:>9} {:>4}\n",
                                  "scheme", "seeds", "conv", "throughput_Mb", "ci95", "deploy_s",
                                  "ci95", "rank");
    for (const SummaryRow& r : summary.rows) {
        out += fmt::format("{:<12} {:>5} {:>5} {:>14.2f} {:>9} {:>12.1f} {:>9} {:>4}\n", r.scheme,
                           r.seeds, r.converged_seeds, r.mean_throughput_bps / 1e6,
                           ci(r.ci95_throughput_bps, 1e6), r.mean_deployment_time_s,
                           ci(r.ci95_deployment_time_s, 1.0), r.throughput_rank);
    }
    if (summary.find("fmarl"))
        out += fmt::format("fmarl highest throughput: {}\n", summary.fmarl_highest ? "yes" : "no");
    if (summary.improvement_ratio)
        out += fmt::format("improvement fmarl/no_ris: {:.2f}x (reference range 1.2-3.6x)\n",
                           *summary.improvement_ratio);
    return out;
}

std::string seeds_to_csv(std::span<const BenchmarkResult> results) {
    std::string out(seeds_csv_header);
    out += '\n';
    for (const BenchmarkResult& r : results) {
        for (const SeedResult& s : r.seeds) {
            out += fmt::format("{},{},{},{},{},{},{},{}\n", r.scheme, s.seed,
                               format_number(s.converged_throughput_bps),
                               format_number(s.deployment_time_s), s.steps, s.converged ? 1 : 0,
                               format_number(s.final_true_throughput_bps),
                               s.reach_step ? std::to_string(*s.reach_step) : std::string());
        }
    }
    return out;
}

}  // namespace idris
