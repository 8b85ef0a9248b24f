#include "commentox/stats.hpp"

#include <algorithm>
#include <cmath>

#include "commentox/errors.hpp"

namespace ctox {

double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw StatError("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

Moments moments_of(std::span<const double> xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    const double n = static_cast<double>(xs.size());
    m.mean = mean_of(xs);
    if (xs.size() < 2) return m;

    double m2 = 0.0, m3 = 0.0;
    for (double x : xs) {
        double d = x - m.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    double var = m2 / (n - 1.0);
    m.sd = std::sqrt(var);
    if (xs.size() < 3 || m2 == 0.0) return m;

    // g1 over population moments, then the small-sample adjustment.
    double g1 = (m3 / n) / std::pow(m2 / n, 1.5);
    m.skewness = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
    return m;
}

double trimmed_mean_upper(std::span<const double> xs, double trim) {
    if (xs.empty()) throw StatError("trimmed mean of empty sample");
    if (trim < 0.0 || trim >= 1.0)
        throw StatError("trim fraction must be in [0, 1)");
    std::vector<double> sorted = sorted_copy(xs);
    size_t drop = static_cast<size_t>(
        std::floor(static_cast<double>(sorted.size()) * trim + 1e-12));
    if (drop >= sorted.size()) drop = sorted.size() - 1;
    double s = 0.0;
    size_t keep = sorted.size() - drop;
    for (size_t i = 0; i < keep; ++i) s += sorted[i];
    return s / static_cast<double>(keep);
}

double quantile(std::span<const double> xs, double q) {
    if (xs.empty()) throw StatError("quantile of empty sample");
    if (q < 0.0) q = 0.0;
    if (q > 1.0) q = 1.0;
    std::vector<double> sorted = sorted_copy(xs);
    double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    size_t lo = static_cast<size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> sorted_copy(std::span<const double> xs) {
    std::vector<double> out(xs.begin(), xs.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ctox
