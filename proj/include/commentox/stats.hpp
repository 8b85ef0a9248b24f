#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ctox {

// Basic sample moments. sd and skewness are left empty when undefined
// (fewer than 2 resp. 3 observations, or zero variance for skewness).
struct Moments {
    size_t count = 0;
    double mean = 0.0;
    std::optional<double> sd;        // sample standard deviation (n-1)
    std::optional<double> skewness;  // bias-adjusted Fisher-Pearson G1
};

double mean_of(std::span<const double> xs);

Moments moments_of(std::span<const double> xs);

// Mean after removing the `trim` fraction of highest values
// (one-sided upper trim); floor(n*trim) observations are dropped.
// Throws StatError on empty input or trim outside [0, 1).
double trimmed_mean_upper(std::span<const double> xs, double trim);

// Linear-interpolation quantile (the "linear" convention: h = (n-1)q).
// Input need not be sorted. Throws StatError on empty input.
double quantile(std::span<const double> xs, double q);

std::vector<double> sorted_copy(std::span<const double> xs);

}  // namespace ctox
