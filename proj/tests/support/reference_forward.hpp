// Independent re-implementation of the full pair-loss forward pass, written
// directly from the layer definitions as plain per-gate loops and templated
// on the scalar type. Serves as the finite-difference oracle: evaluating
// the loss in extended precision keeps the difference quotient meaningful
// at step sizes around 1e-5 even for near-zero gradient entries.
#pragma once

#include <cmath>
#include <vector>

#include "c2v/model.hpp"

namespace c2v::test {

template <typename T>
T ref_sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
T ref_log_sigmoid(T x) {
  if (x >= T(0)) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

template <typename T>
struct RefLstm {
  std::vector<std::vector<T>> h;  // one hidden vector per step
};

// Runs one LSTM direction over the embedded inputs. Gate blocks are read
// from the packed parameter layout but evaluated gate by gate.
template <typename T>
RefLstm<T> ref_lstm(const LstmParams& p, const Mat& emb,
                    const std::vector<uint32_t>& ids) {
  const size_t d = p.d_h;
  const size_t din = p.d_in;
  RefLstm<T> out;
  std::vector<T> h(d, T(0)), c(d, T(0));
  for (uint32_t id : ids) {
    const double* x = emb.row(id);
    std::vector<T> gates(4 * d);
    for (size_t g = 0; g < 4; ++g) {
      for (size_t j = 0; j < d; ++j) {
        size_t r = g * d + j;
        T z = T(p.b[r]);
        for (size_t kk = 0; kk < din; ++kk) z += T(p.wx(r, kk)) * T(x[kk]);
        for (size_t kk = 0; kk < d; ++kk) z += T(p.wh(r, kk)) * h[kk];
        gates[r] = (g == kGateG) ? std::tanh(z) : ref_sigmoid(z);
      }
    }
    std::vector<T> c_new(d), h_new(d);
    for (size_t j = 0; j < d; ++j) {
      c_new[j] = gates[kGateF * d + j] * c[j] + gates[kGateI * d + j] * gates[kGateG * d + j];
      h_new[j] = gates[kGateO * d + j] * std::tanh(c_new[j]);
    }
    c = std::move(c_new);
    h = std::move(h_new);
    out.h.push_back(h);
  }
  return out;
}

// Full pair loss: encoder, head (attention or final-states), SGNS loss.
template <typename T>
T ref_pair_loss(const ModelParams& p, const std::vector<uint32_t>& padded_ids,
                uint32_t context_id, const std::vector<uint32_t>& negatives) {
  const size_t n = padded_ids.size() - 2;
  const size_t d_lstm = p.fwd.d_h;
  const size_t d_word = p.w_comp.rows;

  std::vector<uint32_t> fwd_in(padded_ids.begin(), padded_ids.end() - 1);
  std::vector<uint32_t> bwd_in;
  bwd_in.push_back(padded_ids.back());
  for (size_t k = n; k >= 1; --k) bwd_in.push_back(padded_ids[k]);

  RefLstm<T> f = ref_lstm<T>(p.fwd, p.char_emb, fwd_in);
  RefLstm<T> b = ref_lstm<T>(p.bwd, p.char_emb, bwd_in);

  // Split state i: forward after i characters, backward after n-i.
  std::vector<std::vector<T>> states(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    const std::vector<T>& hf = f.h[i];
    const std::vector<T>& hb = b.h[n - i];
    std::vector<T> st(d_word);
    for (size_t r = 0; r < d_word; ++r) {
      T z = T(p.b_comp[r]);
      for (size_t kk = 0; kk < d_lstm; ++kk) z += T(p.w_comp(r, kk)) * hf[kk];
      for (size_t kk = 0; kk < d_lstm; ++kk) z += T(p.w_comp(r, d_lstm + kk)) * hb[kk];
      st[r] = std::tanh(z);
    }
    states[i] = std::move(st);
  }

  std::vector<T> word_vec(d_word, T(0));
  if (p.has_attention()) {
    const size_t d_attn = p.w_attn.rows;
    std::vector<T> scores(n + 1);
    for (size_t i = 0; i <= n; ++i) {
      T s = T(0);
      for (size_t r = 0; r < d_attn; ++r) {
        T z = T(0);
        for (size_t kk = 0; kk < d_word; ++kk) z += T(p.w_attn(r, kk)) * states[i][kk];
        s += T(p.v_attn[r]) * std::tanh(z);
      }
      scores[i] = s;
    }
    T mx = scores[0];
    for (T s : scores) mx = std::max(mx, s);
    T zsum = T(0);
    std::vector<T> alpha(n + 1);
    for (size_t i = 0; i <= n; ++i) {
      alpha[i] = std::exp(scores[i] - mx);
      zsum += alpha[i];
    }
    for (size_t i = 0; i <= n; ++i) {
      alpha[i] /= zsum;
      for (size_t j = 0; j < d_word; ++j) word_vec[j] += alpha[i] * states[i][j];
    }
  } else {
    const std::vector<T>& hf = f.h[n];
    const std::vector<T>& hb = b.h[n];
    for (size_t r = 0; r < d_word; ++r) {
      T z = T(p.b_comp[r]);
      for (size_t kk = 0; kk < d_lstm; ++kk) z += T(p.w_comp(r, kk)) * hf[kk];
      for (size_t kk = 0; kk < d_lstm; ++kk) z += T(p.w_comp(r, d_lstm + kk)) * hb[kk];
      word_vec[r] = std::tanh(z);
    }
  }

  auto dot_ctx = [&](uint32_t row) {
    T s = T(0);
    const double* c = p.context_table.row(row);
    for (size_t j = 0; j < d_word; ++j) s += word_vec[j] * T(c[j]);
    return s;
  };
  T loss = -ref_log_sigmoid(dot_ctx(context_id));
  for (uint32_t neg : negatives) loss -= ref_log_sigmoid(-dot_ctx(neg));
  return loss;
}

}  // namespace c2v::test
