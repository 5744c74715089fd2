// The character encoder: a forward LSTM that reads the begin-of-word
// symbol plus the characters, a backward LSTM that reads the end-of-word
// symbol plus the characters reversed, a shared compression layer, and the
// split-point attention head. State i pairs the forward read of the first
// i characters with the backward read of the rest, so the n+1 states of an
// n-character word enumerate its prefix/suffix splits.
#pragma once

#include <vector>

#include "c2v/model.hpp"

namespace c2v {

struct EncodeCache {
  std::vector<uint32_t> ids;  // padded: BOW, c_1..c_n, EOW
  size_t n = 0;               // characters (states = n + 1)
  std::vector<LstmStepCache> fwd_steps;  // fwd_steps[i] = forward read of BOW,c_1..c_i
  std::vector<LstmStepCache> bwd_steps;  // bwd_steps[k] = backward read of EOW,c_n..c_{n-k+1}
  Mat concat;  // (n+1) x 2*d_lstm, row i = [h_i^f ; h_i^b]
  Mat states;  // (n+1) x d_word, compressed split states

  const double* fwd_h(size_t i) const { return fwd_steps[i].h.data(); }
  // Backward state aligned to split i (read EOW and the suffix after i).
  const double* bwd_h(size_t i) const { return bwd_steps[n - i].h.data(); }
};

struct AttentionResult {
  Vec scores;    // n+1 raw attention scores
  Vec u;         // (n+1) x d_attn, tanh(W_a h_i), flattened
  Vec alpha;     // softmax weights
  Vec word_vec;  // sum_i alpha_i h_i
};

// Reusable scratch for the backward passes; one per worker.
struct EncoderWorkspace {
  Vec d_gates;
  Vec d_h;
  Vec d_c;
  Vec d_h_next;
  Vec d_c_next;
  Vec d_x;
  Vec scratch;
  Mat d_states;
  Mat d_concat;
  Vec d_split;
  Vec concat_buf;
};

// Runs both LSTM passes over a padded character-id sequence. When
// with_states is set, also builds the concatenated pairs and the
// compressed split states (needed by attention; the no-attention head
// only uses the two final hidden states).
void encode_word(const ModelParams& p, const std::vector<uint32_t>& padded_ids,
                 bool with_states, EncodeCache& cache);

// Attention over the compressed states: score_i = v . tanh(W_a h_i),
// alpha = softmax(scores), word_vec = sum alpha_i h_i.
void attend(const ModelParams& p, const EncodeCache& cache, AttentionResult& att);

// d_word_vec -> gradients of every character-side tensor (and the char
// embedding rows used by the word).
void char2vec_backward(const ModelParams& p, const EncodeCache& cache,
                       const AttentionResult& att, const Vec& d_word_vec,
                       EncoderGrads& grads, EncoderWorkspace& ws);

// No-attention head: word_vec = tanh(W_comp [h_n^f ; h_0^b] + b). The
// cache must come from encode_word(..., with_states=false) or true.
void no_att_head(const ModelParams& p, const EncodeCache& cache, Vec& word_vec,
                 EncoderWorkspace& ws);

void no_att_backward(const ModelParams& p, const EncodeCache& cache,
                     const Vec& word_vec, const Vec& d_word_vec, EncoderGrads& grads,
                     EncoderWorkspace& ws);

// Convenience wrappers used by evaluation and the morphology ranker.
Vec char_word_vector(const ModelParams& p, const std::string& word, OnUnknownChar mode);
AttentionResult attention_for_word(const ModelParams& p, const std::string& word,
                                   OnUnknownChar mode);

// Skip-gram negative-sampling loss for one (target vector, context,
// negatives) tuple: -(log s(w.c) + sum log s(-w.c_neg)). Accumulates the
// gradient w.r.t. the target vector into d_w, and reports per-row context
// gradients as coefficients via row_grad (grad of row r is coeff * w).
double sgns_pair_loss(const double* w_vec, size_t dim, const Mat& context_table,
                      uint32_t context_id, const std::vector<uint32_t>& negatives,
                      double* d_w,
                      const std::function<void(uint32_t, double)>& row_grad = nullptr);

}  // namespace c2v
