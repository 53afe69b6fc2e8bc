#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace idris {

struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;  // 0 when fewer than two samples
    std::size_t n = 0;
};

// Normal-approximation 95% interval, sample standard deviation.
inline MeanCi mean_ci95(std::span<const double> xs) {
    MeanCi out;
    out.n = xs.size();
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
    return out;
}

}  // namespace idris
