#pragma once

#include <cstdint>
#include <random>

namespace graspkit {

// splitmix64, used to whiten seeds and derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for a worker/chain stream. Streams derived from the same base seed but
// different ids are decorrelated; the mapping is stable across platforms.
inline std::uint64_t derive_stream(std::uint64_t base_seed, std::uint64_t stream_id) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(stream_id + 0x517cc1b727220a95ULL));
}

// Thin wrapper over mt19937_64 with the handful of draws the library needs.
// All stochastic code takes an Rng& so tests can pin sequences exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

  // Uniform in [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Uniform integer in [0, n).
  int uniform_int(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }

  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace graspkit
