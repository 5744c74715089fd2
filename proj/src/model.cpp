#include "c2v/model.hpp"

#include "c2v/encoder.hpp"

namespace c2v {

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSgns: return "sgns";
    case ModelKind::kC2vNoAtt: return "c2v-no-att";
    case ModelKind::kChar2vec: return "char2vec";
    case ModelKind::kPpmiSvd: return "ppmi-svd";
  }
  return "unknown";
}

std::optional<ModelKind> model_kind_from_name(std::string_view name) {
  if (name == "sgns") return ModelKind::kSgns;
  if (name == "c2v-no-att") return ModelKind::kC2vNoAtt;
  if (name == "char2vec") return ModelKind::kChar2vec;
  if (name == "ppmi-svd") return ModelKind::kPpmiSvd;
  return std::nullopt;
}

void TrainConfig::validate() const {
  require(window >= 1, "window must be >= 1");
  require(negatives >= 1, "negatives must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(min_count >= 1, "min-count must be >= 1");
  require(d_char >= 1 && d_lstm >= 1 && d_word >= 1, "dimensions must be >= 1");
  require(workers >= 1, "workers must be >= 1");
  require(noise_alpha >= 0.0, "noise alpha must be >= 0");
  require(adam.lr > 0.0, "learning rate must be > 0");
  require(trace_every >= 1, "trace interval must be >= 1");
}

void ModelParams::allocate_tables() {
  target_table = Mat(vocab.size(), config.d_word);
  context_table = Mat(vocab.size(), config.d_word);
}

void ModelParams::allocate_char_encoder() {
  char_emb = Mat(chars.size(), config.d_char);
  fwd = LstmParams(config.d_char, config.d_lstm);
  bwd = LstmParams(config.d_char, config.d_lstm);
  w_comp = Mat(config.d_word, 2 * config.d_lstm);
  b_comp.assign(config.d_word, 0.0);
  if (kind == ModelKind::kChar2vec) {
    w_attn = Mat(config.attn_dim(), config.d_word);
    v_attn.assign(config.attn_dim(), 0.0);
  } else {
    w_attn = Mat();
    v_attn.clear();
  }
}

void ModelParams::init_tables(Rng& rng) {
  // word2vec-style start: small uniform target rows, zero context rows.
  double bound = 0.5 / static_cast<double>(config.d_word);
  for (double& v : target_table.a) v = rng.uniform(-bound, bound);
  context_table.zero();
}

void ModelParams::init_char_encoder(Rng& rng) {
  double eb = 1.0 / std::sqrt(static_cast<double>(config.d_char));
  for (double& v : char_emb.a) v = rng.uniform(-eb, eb);
  fwd.init(rng);
  bwd.init(rng);
  double cb = 1.0 / std::sqrt(static_cast<double>(2 * config.d_lstm));
  for (double& v : w_comp.a) v = rng.uniform(-cb, cb);
  std::fill(b_comp.begin(), b_comp.end(), 0.0);
  if (kind == ModelKind::kChar2vec) {
    double ab = 1.0 / std::sqrt(static_cast<double>(config.d_word));
    for (double& v : w_attn.a) v = rng.uniform(-ab, ab);
    double vb = 1.0 / std::sqrt(static_cast<double>(config.attn_dim()));
    for (double& v : v_attn) v = rng.uniform(-vb, vb);
  }
}

std::optional<Vec> ModelParams::word_vector(const std::string& word) const {
  if (has_char_encoder()) {
    return char_word_vector(*this, word, OnUnknownChar::kMapToUnk);
  }
  std::optional<uint32_t> id = vocab.id_of(word);
  if (!id) return std::nullopt;
  const double* row = target_table.row(*id);
  return Vec(row, row + target_table.cols);
}

void EncoderGrads::zero() {
  char_emb.zero();
  fwd.zero();
  bwd.zero();
  w_comp.zero();
  std::fill(b_comp.begin(), b_comp.end(), 0.0);
  w_attn.zero();
  std::fill(v_attn.begin(), v_attn.end(), 0.0);
}

std::vector<TensorRef> char_tensor_refs(ModelParams& params, EncoderGrads& grads) {
  std::vector<TensorRef> refs;
  auto add_mat = [&](const char* name, Mat& value, Mat& grad) {
    refs.push_back({name, value.a.data(), grad.a.data(), value.size()});
  };
  auto add_vec = [&](const char* name, Vec& value, Vec& grad) {
    refs.push_back({name, value.data(), grad.data(), value.size()});
  };
  add_mat("char_emb", params.char_emb, grads.char_emb);
  add_mat("fwd.wx", params.fwd.wx, grads.fwd.wx);
  add_mat("fwd.wh", params.fwd.wh, grads.fwd.wh);
  add_vec("fwd.b", params.fwd.b, grads.fwd.b);
  add_mat("bwd.wx", params.bwd.wx, grads.bwd.wx);
  add_mat("bwd.wh", params.bwd.wh, grads.bwd.wh);
  add_vec("bwd.b", params.bwd.b, grads.bwd.b);
  add_mat("w_comp", params.w_comp, grads.w_comp);
  add_vec("b_comp", params.b_comp, grads.b_comp);
  if (params.has_attention()) {
    add_mat("w_attn", params.w_attn, grads.w_attn);
    add_vec("v_attn", params.v_attn, grads.v_attn);
  }
  return refs;
}

}  // namespace c2v
