// Differentiable building blocks: stable sigmoid/softmax, a tanh affine
// layer and a standard LSTM cell, each with a hand-derived backward pass.
#pragma once

#include <algorithm>
#include <cmath>

#include "c2v/rng.hpp"
#include "c2v/tensor.hpp"

namespace c2v {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for large |x|.
inline double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// In-place softmax with max subtraction. Throws on empty input.
inline void softmax_inplace(double* s, size_t n) {
  if (n == 0) throw ConfigError("softmax: empty score vector");
  double mx = s[0];
  for (size_t i = 1; i < n; ++i) mx = std::max(mx, s[i]);
  double z = 0.0;
  for (size_t i = 0; i < n; ++i) {
    s[i] = std::exp(s[i] - mx);
    z += s[i];
  }
  for (size_t i = 0; i < n; ++i) s[i] /= z;
}

inline Vec softmax(const Vec& scores) {
  Vec out = scores;
  softmax_inplace(out.data(), out.size());
  return out;
}

// out = tanh(W x + b)
inline Vec affine_tanh(const Mat& w, const Vec& b, const Vec& x) {
  check_shape(w.cols == x.size() && w.rows == b.size(), "affine_tanh");
  Vec out = b;
  gemv(w, x.data(), out.data());
  for (double& v : out) v = std::tanh(v);
  return out;
}

// Given d(loss)/d(out) and out = tanh(Wx + b), accumulates parameter and
// input gradients. `out` is the forward activation.
inline void affine_tanh_backward(const Mat& w, const double* x, const double* out,
                                 const double* d_out, Mat& d_w, double* d_b,
                                 double* d_x, Vec& scratch) {
  scratch.resize(w.rows);
  for (size_t r = 0; r < w.rows; ++r) scratch[r] = d_out[r] * (1.0 - out[r] * out[r]);
  add_outer(d_w, scratch.data(), x);
  axpy(1.0, scratch.data(), d_b, w.rows);
  if (d_x != nullptr) gemv_t(w, scratch.data(), d_x);
}

// ---------------------------------------------------------------------------
// LSTM. The four gates (input, forget, output, candidate) are packed into
// one 4*d_h-row block in that order so each step is two matrix products.

enum : size_t { kGateI = 0, kGateF = 1, kGateO = 2, kGateG = 3 };

struct LstmParams {
  size_t d_in = 0;
  size_t d_h = 0;
  Mat wx;  // 4*d_h x d_in
  Mat wh;  // 4*d_h x d_h
  Vec b;   // 4*d_h

  LstmParams() = default;
  LstmParams(size_t in, size_t h)
      : d_in(in), d_h(h), wx(4 * h, in), wh(4 * h, h), b(4 * h, 0.0) {}

  // Forget-gate bias starts at 1 to keep early cell gradients alive;
  // weights are uniform in +-1/sqrt(d_h).
  void init(Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(d_h));
    for (double& v : wx.a) v = rng.uniform(-bound, bound);
    for (double& v : wh.a) v = rng.uniform(-bound, bound);
    std::fill(b.begin(), b.end(), 0.0);
    for (size_t j = 0; j < d_h; ++j) b[kGateF * d_h + j] = 1.0;
  }
};

struct LstmState {
  Vec h;
  Vec c;
  LstmState() = default;
  explicit LstmState(size_t d_h) : h(d_h, 0.0), c(d_h, 0.0) {}
};

// Per-step activations kept for the backward pass.
struct LstmStepCache {
  Vec gates;   // 4*d_h, post-activation, packed i|f|o|g
  Vec c;       // cell state after the step
  Vec tanh_c;  // tanh(c)
  Vec h;       // hidden state after the step
};

// One cell step. prev is read only; the result lands in `cache`.
inline void lstm_step_cached(const LstmParams& p, const double* x, const LstmState& prev,
                             LstmStepCache& cache) {
  const size_t d = p.d_h;
  cache.gates = p.b;
  gemv(p.wx, x, cache.gates.data());
  gemv(p.wh, prev.h.data(), cache.gates.data());
  double* g = cache.gates.data();
  for (size_t j = 0; j < 3 * d; ++j) g[j] = sigmoid(g[j]);
  for (size_t j = 3 * d; j < 4 * d; ++j) g[j] = std::tanh(g[j]);

  cache.c.resize(d);
  cache.tanh_c.resize(d);
  cache.h.resize(d);
  const double* gi = g + kGateI * d;
  const double* gf = g + kGateF * d;
  const double* go = g + kGateO * d;
  const double* gg = g + kGateG * d;
  for (size_t j = 0; j < d; ++j) {
    cache.c[j] = gf[j] * prev.c[j] + gi[j] * gg[j];
    cache.tanh_c[j] = std::tanh(cache.c[j]);
    cache.h[j] = go[j] * cache.tanh_c[j];
  }
}

inline LstmState lstm_step(const LstmParams& p, const Vec& x, const LstmState& prev) {
  check_shape(x.size() == p.d_in, "lstm_step: input dim");
  check_shape(prev.h.size() == p.d_h && prev.c.size() == p.d_h, "lstm_step: state dim");
  LstmStepCache cache;
  lstm_step_cached(p, x.data(), prev, cache);
  LstmState out;
  out.h = cache.h;
  out.c = cache.c;
  return out;
}

struct LstmGrads {
  Mat wx;
  Mat wh;
  Vec b;
  explicit LstmGrads(const LstmParams& p)
      : wx(4 * p.d_h, p.d_in), wh(4 * p.d_h, p.d_h), b(4 * p.d_h, 0.0) {}
  void zero() {
    wx.zero();
    wh.zero();
    std::fill(b.begin(), b.end(), 0.0);
  }
};

// Backward through one step. d_h_in / d_c_in are the gradients flowing into
// this step's outputs; d_h_prev / d_c_prev and d_x are accumulated into.
inline void lstm_step_backward(const LstmParams& p, const double* x, const double* h_prev,
                               const double* c_prev, const LstmStepCache& cache,
                               const double* d_h_in, const double* d_c_in, LstmGrads& grads,
                               double* d_x, double* d_h_prev, double* d_c_prev,
                               Vec& d_gates_scratch) {
  const size_t d = p.d_h;
  const double* gi = cache.gates.data() + kGateI * d;
  const double* gf = cache.gates.data() + kGateF * d;
  const double* go = cache.gates.data() + kGateO * d;
  const double* gg = cache.gates.data() + kGateG * d;

  d_gates_scratch.resize(4 * d);
  double* dzi = d_gates_scratch.data() + kGateI * d;
  double* dzf = d_gates_scratch.data() + kGateF * d;
  double* dzo = d_gates_scratch.data() + kGateO * d;
  double* dzg = d_gates_scratch.data() + kGateG * d;

  for (size_t j = 0; j < d; ++j) {
    double dh = d_h_in[j];
    double dc = d_c_in[j] + dh * go[j] * (1.0 - cache.tanh_c[j] * cache.tanh_c[j]);
    double d_o = dh * cache.tanh_c[j];
    double d_i = dc * gg[j];
    double d_g = dc * gi[j];
    double d_f = dc * c_prev[j];
    d_c_prev[j] += dc * gf[j];
    dzi[j] = d_i * gi[j] * (1.0 - gi[j]);
    dzf[j] = d_f * gf[j] * (1.0 - gf[j]);
    dzo[j] = d_o * go[j] * (1.0 - go[j]);
    dzg[j] = d_g * (1.0 - gg[j] * gg[j]);
  }

  add_outer(grads.wx, d_gates_scratch.data(), x);
  add_outer(grads.wh, d_gates_scratch.data(), h_prev);
  axpy(1.0, d_gates_scratch.data(), grads.b.data(), 4 * d);
  if (d_x != nullptr) gemv_t(p.wx, d_gates_scratch.data(), d_x);
  gemv_t(p.wh, d_gates_scratch.data(), d_h_prev);
}

}  // namespace c2v
