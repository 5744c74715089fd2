// Deterministic random streams. Every source of randomness in the toolkit
// is derived from one base seed; stream ids keep initialization, workers
// and baselines decorrelated without extra flags.
#pragma once

#include <cstdint>
#include <random>

namespace c2v {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream ids used across the toolkit. Worker i uses worker_stream + i.
enum : uint64_t {
  kInitStream = 0,
  kStage2InitStream = 1,
  kBaselineStream = 2,
  kWorkerStream = 16,
};

inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1). Built from raw bits so the stream does not depend on
  // the standard library's distribution implementation.
  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t index(uint64_t n) {
    // Rejection sampling keeps the draw unbiased.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  uint64_t bits() { return engine_(); }

  double gaussian() {
    // Box-Muller on two uniform draws; the spare is not cached so the
    // number of raw draws per call is fixed.
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace c2v
