#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace sparsets {

/// Names a reproducible random stream: identical (seed, stream) pairs yield
/// identical draws on every run and every thread.
struct RngSeed {
  std::uint64_t seed = 0;
  std::string stream = "main";

  /// Child stream, e.g. `seed.derive("rep3")` for replicate 3.
  RngSeed derive(std::string_view label) const;
  RngSeed derive(std::string_view label, std::uint64_t index) const;

  bool operator==(const RngSeed&) const = default;
};

/// Counter-based 64-bit generator: the i-th output is SplitMix64's finalizer
/// applied to key + i * golden_gamma, where the key hashes (seed, stream).
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(const RngSeed& seed);

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // N(0, 1)
  Eigen::VectorXd normal_vector(Eigen::Index n);
  /// Integer uniform on [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> gauss_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sparsets
