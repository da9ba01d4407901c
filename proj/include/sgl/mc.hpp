#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgl {

// Pairwise (tree) summation. The result depends only on the element order,
// never on chunking or thread scheduling, and the rounding error grows like
// O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n <= 32) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

struct McEstimate {
    double mean = 0.0;
    std::int64_t n = 0;
    double half_width = 0.0;  // 95% CI half-width, 1.96 * sd / sqrt(n)
    std::uint64_t seed = 0;
};

// Two-pass mean/CI over per-sample values; both passes use pairwise sums so
// the estimate is bit-stable for a fixed sample order.
inline McEstimate mc_estimate(std::span<const double> xs, std::uint64_t seed = 0) {
    if (xs.empty()) throw std::invalid_argument("mc_estimate: empty sample set");
    McEstimate e;
    e.n = static_cast<std::int64_t>(xs.size());
    e.seed = seed;
    e.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
    if (xs.size() == 1) return e;
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - e.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
    e.half_width = 1.96 * std::sqrt(var / static_cast<double>(xs.size()));
    return e;
}

inline McEstimate mc_estimate(const std::vector<double>& xs, std::uint64_t seed = 0) {
    return mc_estimate(std::span<const double>(xs), seed);
}

}  // namespace sgl
