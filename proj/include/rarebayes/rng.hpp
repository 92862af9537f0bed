#pragma once

#include <cstdint>
#include <random>

#include "rarebayes/normal.hpp"

namespace rarebayes {

// Reproducible keyed RNG streams. Every consumer of randomness owns a
// stream derived from (master seed, domain, level, index), so results do
// not depend on thread count or scheduling. mt19937_64 output is fixed by
// the standard, and the uniform/normal mappings below are our own, so a
// given (seed, key) pair produces the same bytes on every platform.

namespace rngdomain {
constexpr std::uint64_t kLevelZero = 1;
constexpr std::uint64_t kChain = 2;
constexpr std::uint64_t kShuffle = 3;
constexpr std::uint64_t kInner = 4;
constexpr std::uint64_t kOracle = 5;
constexpr std::uint64_t kCompare = 6;
constexpr std::uint64_t kRun = 7;
constexpr std::uint64_t kAdapt = 8;
}  // namespace rngdomain

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t master, std::uint64_t domain,
                             std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s ^= domain;
  h ^= splitmix64(s);
  s ^= a;
  h ^= splitmix64(s);
  s ^= b;
  h ^= splitmix64(s);
  return h;
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1); the half-bit offset keeps the
  // endpoints unreachable so logs and quantiles stay finite.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the quantile; exactly one uniform consumed.
  double normal() { return norm_quantile(uniform()); }

 private:
  std::mt19937_64 engine_;
};

// Hands out keyed streams under one master seed.
class RngFactory {
 public:
  explicit RngFactory(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }

  RngStream stream(std::uint64_t domain, std::uint64_t a = 0,
                   std::uint64_t b = 0) const {
    return RngStream(mix_key(master_, domain, a, b));
  }

  // A factory whose whole key space is disjoint from this one; used to
  // give inner runs their own namespace.
  RngFactory subfactory(std::uint64_t domain, std::uint64_t a = 0,
                        std::uint64_t b = 0) const {
    return RngFactory(mix_key(master_, domain, a, b));
  }

 private:
  std::uint64_t master_;
};

}  // namespace rarebayes
