#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>

namespace hsc {

// Seeded random stream with hand-rolled samplers. The std:: engines are
// bit-reproducible across implementations but the std:: distributions are
// not, and reproducing a run byte-for-byte is a hard requirement here, so
// every sampler below is implemented directly on top of the raw engine.
//
// A stream is single-owner: callers that run in parallel derive their own
// substream instead of sharing one.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed)
      : seed_base_(seed), engine_(mix(seed)) {}

  // Derives an independent child stream. Children with distinct ids are
  // decorrelated from each other and from the parent's own draws.
  RandomStream substream(std::uint64_t id) const {
    return RandomStream(mix(seed_base_) ^ mix(id + 0x9e3779b97f4a7c15ull));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1). 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer on [lo, hi], inclusive, unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    assert(lo <= hi);
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next_u64());  // full span
    const std::uint64_t reject_below = (0 - range) % range;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw < reject_below);
    return lo + static_cast<std::int64_t>(draw % range);
  }

  // Box-Muller; the spare value is cached, so draws come in deterministic
  // pairs of engine consumption.
  double normal(double mean = 0.0, double stddev = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + stddev * radius * std::cos(angle);
  }

  // Exponential with rate 1.
  double exponential() {
    double u = uniform();
    while (u >= 1.0) u = uniform();
    return -std::log1p(-u);
  }

  // Knuth's product method, chunked so that large rates do not underflow.
  std::int64_t poisson(double rate) {
    std::int64_t count = 0;
    while (rate > kPoissonChunk) {
      count += poisson_small(kPoissonChunk);
      rate -= kPoissonChunk;
    }
    return count + poisson_small(rate);
  }

  // Tags for deriving the fixed top-level streams of one experiment seed.
  // Keeping them centralized stops two modules from colliding on an id.
  enum StreamTag : std::uint64_t {
    kNetworkStream = 1,
    kDemandStream = 2,
    kPolicyInitStream = 3,
    kEnvStream = 4,
    kUpdateStream = 5,
    kEvalStream = 6,
  };

 private:
  static constexpr double kPi = 3.14159265358979323846;
  static constexpr double kPoissonChunk = 60.0;

  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::int64_t poisson_small(double rate) {
    if (rate <= 0.0) return 0;
    const double threshold = std::exp(-rate);
    std::int64_t k = 0;
    double product = uniform();
    while (product > threshold) {
      ++k;
      product *= uniform();
    }
    return k;
  }

  std::uint64_t seed_base_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hsc
