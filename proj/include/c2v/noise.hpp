// Negative-sampling noise distribution: unigram counts raised to a
// smoothing power, drawn by binary search over the cumulative table.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "c2v/common.hpp"
#include "c2v/rng.hpp"

namespace c2v {

class NoiseSampler {
 public:
  NoiseSampler() = default;

  // P(w) = count(w)^alpha / sum count^alpha. alpha = 0 gives the uniform
  // distribution; the reference smoothing is alpha = 0.75.
  static NoiseSampler build(const std::vector<uint64_t>& counts, double alpha) {
    require(alpha >= 0.0, "noise alpha must be >= 0");
    require(!counts.empty(), "noise sampler over empty vocabulary");
    NoiseSampler s;
    s.probs_.resize(counts.size());
    double z = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
      s.probs_[i] = std::pow(static_cast<double>(counts[i]), alpha);
      z += s.probs_[i];
    }
    s.cum_.resize(counts.size());
    double acc = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
      s.probs_[i] /= z;
      acc += s.probs_[i];
      s.cum_[i] = acc;
    }
    s.cum_.back() = 1.0;  // absorb rounding in the last bucket
    return s;
  }

  uint32_t sample(Rng& rng) const {
    double u = rng.uniform01();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) --it;
    return static_cast<uint32_t>(it - cum_.begin());
  }

  void sample_k(Rng& rng, uint32_t k, std::vector<uint32_t>& out) const {
    out.resize(k);
    for (uint32_t i = 0; i < k; ++i) out[i] = sample(rng);
  }

  double prob(uint32_t id) const { return probs_[id]; }
  size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
  std::vector<double> cum_;
};

}  // namespace c2v
