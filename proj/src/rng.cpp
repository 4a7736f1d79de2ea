#include "sparsets/rng.hpp"

namespace sparsets {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSeed RngSeed::derive(std::string_view label) const {
  std::string child = stream;
  child += '/';
  child += label;
  return RngSeed{seed, std::move(child)};
}

RngSeed RngSeed::derive(std::string_view label, std::uint64_t index) const {
  std::string sub(label);
  sub += std::to_string(index);
  return derive(sub);
}

CounterRng::CounterRng(const RngSeed& seed)
    : key_(splitmix64(seed.seed ^ splitmix64(fnv1a(seed.stream)))) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return splitmix64(key_ + counter_ * kGoldenGamma);
}

double CounterRng::uniform() {
  // 53 high bits -> double in [0, 1)
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() { return gauss_(*this); }

Eigen::VectorXd CounterRng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(*this);
}

}  // namespace sparsets
