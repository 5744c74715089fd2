// Builds small models over a toy vocabulary for encoder and training tests.
#pragma once

#include <string>

#include "c2v/encoder.hpp"
#include "c2v/gradcheck.hpp"
#include "c2v/model.hpp"
#include "support/reference_forward.hpp"

namespace c2v::test {

inline ModelParams make_char_model(ModelKind kind, uint64_t seed, uint32_t d_char = 4,
                                   uint32_t d_lstm = 8, uint32_t d_word = 8) {
  ModelParams p;
  p.kind = kind;
  p.config.kind = kind;
  p.config.d_char = d_char;
  p.config.d_lstm = d_lstm;
  p.config.d_word = d_word;
  p.config.min_count = 1;

  std::string corpus = "abc bcd cde dea eab fade beef";
  uint64_t total = 0;
  auto counts = count_tokens(corpus, &total);
  p.vocab = Vocab::build(counts, 1, total);
  p.chars = CharVocab::build(p.vocab);

  Rng rng(derive_seed(seed, kInitStream));
  p.allocate_tables();
  p.init_tables(rng);
  if (p.has_char_encoder()) {
    p.allocate_char_encoder();
    p.init_char_encoder(rng);
  }
  // Loss tests need informative context rows, not the zero init.
  for (double& v : p.context_table.a) v = rng.uniform(-0.8, 0.8);
  return p;
}

// Random word over the model's character vocabulary.
inline std::string random_word(const ModelParams& p, Rng& rng, size_t min_len,
                               size_t max_len) {
  size_t len = min_len + rng.index(max_len - min_len + 1);
  std::string w;
  const auto& cps = p.chars.codepoints();
  for (size_t i = 0; i < len; ++i) {
    w.push_back(static_cast<char>(cps[rng.index(cps.size())]));
  }
  return w;
}

// Finite-difference check of the full pair loss (encoder + attention or
// no-attention head + SGNS loss) against every trainable tensor, including
// the context table when it is not frozen.
inline GradCheckResult full_pair_loss_gradcheck(ModelParams& p, const std::string& word,
                                                uint32_t context_id,
                                                const std::vector<uint32_t>& negatives,
                                                bool check_context, double epsilon) {
  EncoderGrads grads(p);
  Mat d_context(p.context_table.rows, p.context_table.cols);
  EncoderWorkspace ws;

  std::vector<TensorRef> refs = char_tensor_refs(p, grads);
  if (check_context) {
    refs.push_back({"context_table", p.context_table.a.data(), d_context.a.data(),
                    p.context_table.size()});
  }

  auto ids = p.chars.char_sequence(word, OnUnknownChar::kError);
  const size_t d_word = p.config.d_word;

  auto loss = [&](bool want_grad) -> double {
    EncodeCache cache;
    Vec word_vec;
    AttentionResult att;
    if (p.has_attention()) {
      encode_word(p, ids, true, cache);
      attend(p, cache, att);
      word_vec = att.word_vec;
    } else {
      encode_word(p, ids, false, cache);
      no_att_head(p, cache, word_vec, ws);
    }
    Vec d_f(d_word, 0.0);
    auto row_grad = [&](uint32_t row, double coeff) {
      axpy(coeff, word_vec.data(), d_context.row(row), d_word);
    };
    double l = sgns_pair_loss(word_vec.data(), d_word, p.context_table, context_id,
                              negatives, want_grad ? d_f.data() : nullptr,
                              want_grad && check_context
                                  ? std::function<void(uint32_t, double)>(row_grad)
                                  : nullptr);
    if (want_grad) {
      if (p.has_attention()) {
        char2vec_backward(p, cache, att, d_f, grads, ws);
      } else {
        no_att_backward(p, cache, word_vec, d_f, grads, ws);
      }
    }
    return l;
  };

  // The difference quotient is taken against the independent extended-
  // precision forward so the 1e-8 floor in the relative error stays above
  // the quotient noise.
  auto fd_loss = [&]() { return ref_pair_loss<long double>(p, ids, context_id, negatives); };
  return grad_check_fd(loss, fd_loss, refs, epsilon);
}

}  // namespace c2v::test
