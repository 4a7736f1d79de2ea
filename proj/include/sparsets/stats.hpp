#pragma once

#include <span>

namespace sparsets {

/// Median (mean of the two middle values for even sizes). Throws on empty input.
double median(std::span<const double> v);
double mean(std::span<const double> v);
/// Linear-interpolation quantile, prob in [0, 1].
double quantile(std::span<const double> v, double prob);

}  // namespace sparsets
