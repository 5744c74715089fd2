#include "c2v/encoder.hpp"

#include <cstring>

namespace c2v {

namespace {

void run_lstm(const LstmParams& p, const Mat& emb, const uint32_t* ids, size_t steps,
              std::vector<LstmStepCache>& out) {
  out.resize(steps);
  LstmState state(p.d_h);
  for (size_t s = 0; s < steps; ++s) {
    if (ids[s] >= emb.rows) throw DataError("encode_word: character id out of range");
    lstm_step_cached(p, emb.row(ids[s]), state, out[s]);
    state.h = out[s].h;
    state.c = out[s].c;
  }
}

}  // namespace

void encode_word(const ModelParams& p, const std::vector<uint32_t>& padded_ids,
                 bool with_states, EncodeCache& cache) {
  require(padded_ids.size() >= 2, "encode_word: sequence must carry BOW and EOW");
  const size_t n = padded_ids.size() - 2;
  const size_t d_lstm = p.fwd.d_h;
  cache.ids = padded_ids;
  cache.n = n;

  // Forward pass reads BOW..c_n; backward pass reads EOW..c_1 (reversed).
  run_lstm(p.fwd, p.char_emb, padded_ids.data(), n + 1, cache.fwd_steps);
  std::vector<uint32_t> rev(n + 1);
  rev[0] = padded_ids[n + 1];
  for (size_t k = 1; k <= n; ++k) rev[k] = padded_ids[n + 1 - k];
  run_lstm(p.bwd, p.char_emb, rev.data(), n + 1, cache.bwd_steps);

  if (!with_states) {
    cache.concat = Mat();
    cache.states = Mat();
    return;
  }

  cache.concat = Mat(n + 1, 2 * d_lstm);
  cache.states = Mat(n + 1, p.w_comp.rows);
  for (size_t i = 0; i <= n; ++i) {
    double* row = cache.concat.row(i);
    std::memcpy(row, cache.fwd_h(i), d_lstm * sizeof(double));
    std::memcpy(row + d_lstm, cache.bwd_h(i), d_lstm * sizeof(double));
    double* st = cache.states.row(i);
    std::memcpy(st, p.b_comp.data(), p.b_comp.size() * sizeof(double));
    gemv(p.w_comp, row, st);
    for (size_t j = 0; j < p.w_comp.rows; ++j) st[j] = std::tanh(st[j]);
  }
}

void attend(const ModelParams& p, const EncodeCache& cache, AttentionResult& att) {
  const size_t m = cache.states.rows;
  if (m == 0) throw ConfigError("attend: encoder produced no states");
  const size_t d_attn = p.w_attn.rows;
  const size_t d_word = cache.states.cols;

  att.scores.assign(m, 0.0);
  att.u.assign(m * d_attn, 0.0);
  for (size_t i = 0; i < m; ++i) {
    double* u = att.u.data() + i * d_attn;
    gemv(p.w_attn, cache.states.row(i), u);
    for (size_t j = 0; j < d_attn; ++j) u[j] = std::tanh(u[j]);
    att.scores[i] = dot(p.v_attn.data(), u, d_attn);
  }
  att.alpha = att.scores;
  softmax_inplace(att.alpha.data(), m);

  att.word_vec.assign(d_word, 0.0);
  for (size_t i = 0; i < m; ++i) {
    axpy(att.alpha[i], cache.states.row(i), att.word_vec.data(), d_word);
  }
}

namespace {

// Shared BPTT driver. d_h_out(i, :) is the loss gradient at the i-th
// emitted hidden state of the pass (in read order).
void lstm_backward_sequence(const LstmParams& p, const Mat& emb, const uint32_t* ids,
                            const std::vector<LstmStepCache>& steps, const Mat& d_h_out,
                            LstmGrads& grads, Mat& d_emb, EncoderWorkspace& ws) {
  const size_t d = p.d_h;
  const size_t n_steps = steps.size();
  ws.d_h.assign(d, 0.0);       // gradient into step s's hidden state
  ws.d_c.assign(d, 0.0);       // gradient into step s's cell state
  ws.d_h_next.assign(d, 0.0);  // accumulators for step s-1's outputs
  ws.d_c_next.assign(d, 0.0);
  ws.d_x.assign(p.d_in, 0.0);
  Vec zeros(d, 0.0);

  for (size_t s = n_steps; s-- > 0;) {
    // Recurrent flow from step s+1 plus the emitted-output gradient.
    for (size_t j = 0; j < d; ++j) ws.d_h[j] = ws.d_h_next[j] + d_h_out(s, j);
    ws.d_c.swap(ws.d_c_next);
    std::fill(ws.d_h_next.begin(), ws.d_h_next.end(), 0.0);
    std::fill(ws.d_c_next.begin(), ws.d_c_next.end(), 0.0);
    std::fill(ws.d_x.begin(), ws.d_x.end(), 0.0);
    const double* h_prev = s == 0 ? zeros.data() : steps[s - 1].h.data();
    const double* c_prev = s == 0 ? zeros.data() : steps[s - 1].c.data();
    lstm_step_backward(p, emb.row(ids[s]), h_prev, c_prev, steps[s], ws.d_h.data(),
                       ws.d_c.data(), grads, ws.d_x.data(), ws.d_h_next.data(),
                       ws.d_c_next.data(), ws.d_gates);
    axpy(1.0, ws.d_x.data(), d_emb.row(ids[s]), p.d_in);
  }
}

}  // namespace

void char2vec_backward(const ModelParams& p, const EncodeCache& cache,
                       const AttentionResult& att, const Vec& d_word_vec,
                       EncoderGrads& grads, EncoderWorkspace& ws) {
  const size_t m = cache.n + 1;
  const size_t d_word = cache.states.cols;
  const size_t d_attn = p.w_attn.rows;
  const size_t d_lstm = p.fwd.d_h;

  // word_vec = sum alpha_i h_i
  ws.d_states = Mat(m, d_word);
  Vec d_alpha(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    d_alpha[i] = dot(d_word_vec.data(), cache.states.row(i), d_word);
    axpy(att.alpha[i], d_word_vec.data(), ws.d_states.row(i), d_word);
  }

  // Softmax: d_score_i = alpha_i (d_alpha_i - sum_j alpha_j d_alpha_j).
  double mix = 0.0;
  for (size_t i = 0; i < m; ++i) mix += att.alpha[i] * d_alpha[i];
  Vec d_score(m);
  for (size_t i = 0; i < m; ++i) d_score[i] = att.alpha[i] * (d_alpha[i] - mix);

  // score_i = v . tanh(W_a h_i)
  ws.scratch.resize(d_attn);
  for (size_t i = 0; i < m; ++i) {
    const double* u = att.u.data() + i * d_attn;
    axpy(d_score[i], u, grads.v_attn.data(), d_attn);
    for (size_t j = 0; j < d_attn; ++j) {
      ws.scratch[j] = d_score[i] * p.v_attn[j] * (1.0 - u[j] * u[j]);
    }
    add_outer(grads.w_attn, ws.scratch.data(), cache.states.row(i));
    gemv_t(p.w_attn, ws.scratch.data(), ws.d_states.row(i));
  }

  // Compression layer, then both LSTM passes.
  ws.d_concat = Mat(m, 2 * d_lstm);
  for (size_t i = 0; i < m; ++i) {
    affine_tanh_backward(p.w_comp, cache.concat.row(i), cache.states.row(i),
                         ws.d_states.row(i), grads.w_comp, grads.b_comp.data(),
                         ws.d_concat.row(i), ws.scratch);
  }

  Mat d_fwd_h(m, d_lstm);
  Mat d_bwd_h(m, d_lstm);  // indexed in backward read order
  for (size_t i = 0; i < m; ++i) {
    std::memcpy(d_fwd_h.row(i), ws.d_concat.row(i), d_lstm * sizeof(double));
    std::memcpy(d_bwd_h.row(cache.n - i), ws.d_concat.row(i) + d_lstm,
                d_lstm * sizeof(double));
  }

  lstm_backward_sequence(p.fwd, p.char_emb, cache.ids.data(), cache.fwd_steps, d_fwd_h,
                         grads.fwd, grads.char_emb, ws);
  std::vector<uint32_t> rev(m);
  rev[0] = cache.ids[cache.n + 1];
  for (size_t k = 1; k <= cache.n; ++k) rev[k] = cache.ids[cache.n + 1 - k];
  lstm_backward_sequence(p.bwd, p.char_emb, rev.data(), cache.bwd_steps, d_bwd_h,
                         grads.bwd, grads.char_emb, ws);
}

void no_att_head(const ModelParams& p, const EncodeCache& cache, Vec& word_vec,
                 EncoderWorkspace& ws) {
  const size_t d_lstm = p.fwd.d_h;
  ws.concat_buf.resize(2 * d_lstm);
  std::memcpy(ws.concat_buf.data(), cache.fwd_h(cache.n), d_lstm * sizeof(double));
  std::memcpy(ws.concat_buf.data() + d_lstm, cache.bwd_h(0), d_lstm * sizeof(double));
  word_vec.assign(p.w_comp.rows, 0.0);
  std::memcpy(word_vec.data(), p.b_comp.data(), p.b_comp.size() * sizeof(double));
  gemv(p.w_comp, ws.concat_buf.data(), word_vec.data());
  for (double& v : word_vec) v = std::tanh(v);
}

void no_att_backward(const ModelParams& p, const EncodeCache& cache,
                     const Vec& word_vec, const Vec& d_word_vec, EncoderGrads& grads,
                     EncoderWorkspace& ws) {
  const size_t d_lstm = p.fwd.d_h;
  const size_t m = cache.n + 1;
  // Rebuild the concat input; the head caches it in ws.concat_buf only
  // when forward and backward run back to back, so recompute defensively.
  ws.concat_buf.resize(2 * d_lstm);
  std::memcpy(ws.concat_buf.data(), cache.fwd_h(cache.n), d_lstm * sizeof(double));
  std::memcpy(ws.concat_buf.data() + d_lstm, cache.bwd_h(0), d_lstm * sizeof(double));

  ws.d_split.assign(2 * d_lstm, 0.0);
  affine_tanh_backward(p.w_comp, ws.concat_buf.data(), word_vec.data(),
                       d_word_vec.data(), grads.w_comp, grads.b_comp.data(),
                       ws.d_split.data(), ws.scratch);

  Mat d_fwd_h(m, d_lstm);
  Mat d_bwd_h(m, d_lstm);
  std::memcpy(d_fwd_h.row(cache.n), ws.d_split.data(), d_lstm * sizeof(double));
  std::memcpy(d_bwd_h.row(cache.n), ws.d_split.data() + d_lstm, d_lstm * sizeof(double));

  lstm_backward_sequence(p.fwd, p.char_emb, cache.ids.data(), cache.fwd_steps, d_fwd_h,
                         grads.fwd, grads.char_emb, ws);
  std::vector<uint32_t> rev(m);
  rev[0] = cache.ids[cache.n + 1];
  for (size_t k = 1; k <= cache.n; ++k) rev[k] = cache.ids[cache.n + 1 - k];
  lstm_backward_sequence(p.bwd, p.char_emb, rev.data(), cache.bwd_steps, d_bwd_h,
                         grads.bwd, grads.char_emb, ws);
}

Vec char_word_vector(const ModelParams& p, const std::string& word, OnUnknownChar mode) {
  std::vector<uint32_t> ids = p.chars.char_sequence(word, mode);
  EncodeCache cache;
  EncoderWorkspace ws;
  if (p.has_attention()) {
    encode_word(p, ids, true, cache);
    AttentionResult att;
    attend(p, cache, att);
    return att.word_vec;
  }
  encode_word(p, ids, false, cache);
  Vec out;
  no_att_head(p, cache, out, ws);
  return out;
}

AttentionResult attention_for_word(const ModelParams& p, const std::string& word,
                                   OnUnknownChar mode) {
  require(p.has_attention(), "attention weights require a char2vec model");
  std::vector<uint32_t> ids = p.chars.char_sequence(word, mode);
  EncodeCache cache;
  encode_word(p, ids, true, cache);
  AttentionResult att;
  attend(p, cache, att);
  return att;
}

double sgns_pair_loss(const double* w_vec, size_t dim, const Mat& context_table,
                      uint32_t context_id, const std::vector<uint32_t>& negatives,
                      double* d_w, const std::function<void(uint32_t, double)>& row_grad) {
  check_shape(dim == context_table.cols, "pair_loss: vector dim vs context table");
  const double* c = context_table.row(context_id);
  double pos_dot = dot(w_vec, c, dim);
  if (!std::isfinite(pos_dot)) throw NumericError("pair_loss: non-finite dot product");

  double loss = -log_sigmoid(pos_dot);
  double pos_coeff = sigmoid(pos_dot) - 1.0;  // d loss / d pos_dot
  if (d_w != nullptr) axpy(pos_coeff, c, d_w, dim);
  if (row_grad) row_grad(context_id, pos_coeff);

  for (uint32_t neg : negatives) {
    const double* cn = context_table.row(neg);
    double neg_dot = dot(w_vec, cn, dim);
    if (!std::isfinite(neg_dot)) throw NumericError("pair_loss: non-finite dot product");
    loss -= log_sigmoid(-neg_dot);
    double neg_coeff = sigmoid(neg_dot);
    if (d_w != nullptr) axpy(neg_coeff, cn, d_w, dim);
    if (row_grad) row_grad(neg, neg_coeff);
  }
  return loss;
}

}  // namespace c2v
