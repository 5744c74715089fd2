// Skip-gram pair generation over a symmetric window.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "c2v/common.hpp"

namespace c2v {

struct TrainingPair {
  uint32_t target = 0;
  uint32_t context = 0;
  uint64_t position = 0;  // index of the target in the filtered token stream
};

// Emits (target, context) for every position t and offset d in
// [-window, window] \ {0}, clipped at the corpus bounds. `ids` must already
// be OOV-filtered; positions refer to that filtered stream.
inline void for_each_pair(const std::vector<uint32_t>& ids, uint32_t window,
                          const std::function<void(uint32_t, uint32_t, uint64_t)>& fn) {
  require(window >= 1, "window must be >= 1");
  const int64_t n = static_cast<int64_t>(ids.size());
  const int64_t w = static_cast<int64_t>(window);
  for (int64_t t = 0; t < n; ++t) {
    int64_t lo = t - w < 0 ? 0 : t - w;
    int64_t hi = t + w >= n ? n - 1 : t + w;
    for (int64_t u = lo; u <= hi; ++u) {
      if (u == t) continue;
      fn(ids[t], ids[u], static_cast<uint64_t>(t));
    }
  }
}

inline std::vector<TrainingPair> iter_pairs(const std::vector<uint32_t>& ids,
                                            uint32_t window) {
  std::vector<TrainingPair> out;
  for_each_pair(ids, window,
                [&](uint32_t t, uint32_t c, uint64_t pos) { out.push_back({t, c, pos}); });
  return out;
}

// Total number of pairs for a fully in-vocabulary stream of length n.
inline uint64_t pair_count(uint64_t n, uint32_t window) {
  uint64_t total = 0;
  const uint64_t w = window;
  for (uint64_t t = 0; t < n; ++t) {
    uint64_t left = t < w ? t : w;
    uint64_t right = n - 1 - t < w ? n - 1 - t : w;
    total += left + right;
  }
  return total;
}

}  // namespace c2v
