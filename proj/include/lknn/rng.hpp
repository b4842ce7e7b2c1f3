#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace lknn {

// Deterministic RNG with cheap substream derivation. Streams are xoshiro256++
// seeded through splitmix64; child streams hash the parent seed together with
// caller-supplied tags, so every (experiment, grid point, replicate, purpose)
// cell owns an independent stream and results never depend on scheduling.
// Reproducibility is guaranteed within one build, not across languages.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t seed() const { return seed_; }

  // Derived stream: same tags => same stream, independent of call order.
  Rng child(std::uint64_t tag) const { return Rng(mix(seed_, tag)); }
  Rng child(std::uint64_t tag_a, std::uint64_t tag_b) const {
    return Rng(mix(mix(seed_, tag_a), tag_b));
  }
  Rng child(std::string_view label) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return child(h);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller; draws two uniforms per variate.
  double gaussian(double mu, double sigma) {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential(double lambda) {
    return -std::log(1.0 - uniform01()) / lambda;
  }

  // Pareto with location 1 and shape alpha; support [1, inf).
  double pareto(double alpha) {
    return std::pow(1.0 - uniform01(), -1.0 / alpha);
  }

  double laplace(double mu, double b) {
    const double u = uniform01() - 0.5;
    return mu - b * (u < 0.0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    return splitmix64(s);
  }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace lknn
