#include "sparsets/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sparsets/error.hpp"

namespace sparsets {

double median(std::span<const double> v) { return quantile(v, 0.5); }

double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double quantile(std::span<const double> v, double prob) {
  if (v.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double pos = prob * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace sparsets
