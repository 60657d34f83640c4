#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mocco {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent sub-seed from a master seed and a stream id, so
// changing how one component consumes randomness never perturbs the others.
inline uint64_t derive_seed(uint64_t master, uint64_t stream_id) {
  return splitmix64(master ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
}

// Deterministic random stream. Distribution transforms are implemented
// inline (not via std:: distributions) so that identical seeds give
// identical sequences regardless of the standard library, and so the engine
// state can be copied to replay a draw sequence.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Box-Muller without the cached spare, so each draw consumes exactly two
  // engine outputs and copied streams stay in lockstep.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n). Lemire multiply-shift; n must be > 0.
  uint64_t integer(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<__uint128_t>(eng_()) * n) >> 64);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mocco
