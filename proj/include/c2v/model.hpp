// Model parameter container for the four embedding models, plus the
// training hyperparameter block they share.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "c2v/adam.hpp"
#include "c2v/nn.hpp"
#include "c2v/vocab.hpp"

namespace c2v {

enum class ModelKind : uint8_t {
  kSgns = 0,
  kC2vNoAtt = 1,
  kChar2vec = 2,
  kPpmiSvd = 3,
};

std::string model_kind_name(ModelKind kind);
std::optional<ModelKind> model_kind_from_name(std::string_view name);

struct TrainConfig {
  ModelKind kind = ModelKind::kChar2vec;
  uint32_t window = 3;
  uint32_t negatives = 11;
  uint32_t epochs = 3;
  uint64_t min_count = 6;  // "appeared more than 5 times" => count >= 6
  uint32_t d_char = 64;
  uint32_t d_lstm = 256;
  uint32_t d_word = 256;
  uint32_t d_attn = 0;  // 0 = same as d_word
  double noise_alpha = 0.75;
  AdamConfig adam;
  uint64_t seed = 1;
  uint32_t workers = 1;
  bool freeze_context = true;  // stage-2 context table is fixed by default
  uint64_t trace_every = 100000;  // pairs per loss-trace point

  uint32_t attn_dim() const { return d_attn == 0 ? d_word : d_attn; }
  void validate() const;
};

struct ModelParams {
  ModelKind kind = ModelKind::kChar2vec;
  TrainConfig config;
  Vocab vocab;
  CharVocab chars;

  // Word tables. For sgns both are trained; for ppmi-svd the target table
  // holds the factorized vectors; char models keep the frozen context
  // table from stage 1.
  Mat target_table;   // |V| x d_word
  Mat context_table;  // |V| x d_word
  bool context_frozen = false;

  // Character encoder (char2vec and c2v-no-att).
  Mat char_emb;  // |A| x d_char
  LstmParams fwd;
  LstmParams bwd;
  Mat w_comp;  // d_word x 2*d_lstm
  Vec b_comp;  // d_word
  Mat w_attn;  // d_attn x d_word (char2vec only)
  Vec v_attn;  // d_attn          (char2vec only)

  bool has_char_encoder() const {
    return kind == ModelKind::kC2vNoAtt || kind == ModelKind::kChar2vec;
  }
  bool has_attention() const { return kind == ModelKind::kChar2vec; }

  void allocate_tables();
  void allocate_char_encoder();
  void init_tables(Rng& rng);
  void init_char_encoder(Rng& rng);

  // The model's vector for a word: table lookup for word-level models
  // (absent when out of vocabulary), synthesized from characters for the
  // character models (never absent; unknown characters map to UNK).
  std::optional<Vec> word_vector(const std::string& word) const;
};

// Gradient buffers mirroring the trainable character-side tensors.
struct EncoderGrads {
  Mat char_emb;
  LstmGrads fwd;
  LstmGrads bwd;
  Mat w_comp;
  Vec b_comp;
  Mat w_attn;
  Vec v_attn;

  explicit EncoderGrads(const ModelParams& p)
      : char_emb(p.char_emb.rows, p.char_emb.cols),
        fwd(p.fwd),
        bwd(p.bwd),
        w_comp(p.w_comp.rows, p.w_comp.cols),
        b_comp(p.b_comp.size(), 0.0),
        w_attn(p.w_attn.rows, p.w_attn.cols),
        v_attn(p.v_attn.size(), 0.0) {}

  void zero();
};

// Flat (value, grad) views over the trainable character tensors, in the
// fixed order used by the optimizer, the gradient checker and the model
// file. Attention tensors are included only for attention-bearing models.
std::vector<TensorRef> char_tensor_refs(ModelParams& params, EncoderGrads& grads);

}  // namespace c2v
