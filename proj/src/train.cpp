#include "c2v/train.hpp"

#include <atomic>
#include <mutex>

#include "c2v/encoder.hpp"
#include "c2v/noise.hpp"
#include "c2v/pairs.hpp"
#include "c2v/ppmi.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace c2v {

namespace {

// Cross-worker loss bookkeeping. Points are appended whenever the global
// pair counter crosses a trace interval.
class TraceCollector {
 public:
  TraceCollector(LossTrace& trace, uint64_t every) : trace_(trace), every_(every) {}

  void add(double loss, uint64_t pairs) {
    double before = loss_sum_.fetch_add(loss, std::memory_order_relaxed);
    (void)before;
    uint64_t prev = pairs_.fetch_add(pairs, std::memory_order_relaxed);
    uint64_t now = prev + pairs;
    if (now / every_ != prev / every_) {
      std::lock_guard<std::mutex> lock(mu_);
      double cum = loss_sum_.load(std::memory_order_relaxed);
      uint64_t window = now - last_pairs_;
      if (window == 0) return;
      trace_.points.push_back({now, (cum - last_loss_) / static_cast<double>(window)});
      last_pairs_ = now;
      last_loss_ = cum;
    }
  }

  void finish_epoch() {
    std::lock_guard<std::mutex> lock(mu_);
    uint64_t pairs = pairs_.load(std::memory_order_relaxed);
    double cum = loss_sum_.load(std::memory_order_relaxed);
    uint64_t window = pairs - epoch_start_pairs_;
    double mean = window == 0 ? 0.0 : (cum - epoch_start_loss_) / static_cast<double>(window);
    trace_.epoch_mean.push_back(mean);
    trace_.total_pairs = pairs;
    epoch_start_pairs_ = pairs;
    epoch_start_loss_ = cum;
  }

 private:
  LossTrace& trace_;
  uint64_t every_;
  std::atomic<double> loss_sum_{0.0};
  std::atomic<uint64_t> pairs_{0};
  std::mutex mu_;
  uint64_t last_pairs_ = 0;
  double last_loss_ = 0.0;
  uint64_t epoch_start_pairs_ = 0;
  double epoch_start_loss_ = 0.0;
};

struct Shard {
  size_t begin;
  size_t end;
};

Shard shard_of(size_t n, uint32_t workers, uint32_t w) {
  size_t per = n / workers;
  size_t rem = n % workers;
  size_t begin = w * per + std::min<size_t>(w, rem);
  size_t end = begin + per + (w < rem ? 1 : 0);
  return {begin, end};
}

// Runs fn(worker_index) on `workers` threads (serially when OpenMP is
// unavailable or workers == 1).
template <typename Fn>
void run_workers(uint32_t workers, const Fn& fn) {
  if (workers == 1) {
    fn(0);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel num_threads(static_cast<int>(workers))
  {
    fn(static_cast<uint32_t>(omp_get_thread_num()));
  }
#else
  for (uint32_t w = 0; w < workers; ++w) fn(w);
#endif
}

// Collects the in-window context ids around position t.
inline void window_contexts(const std::vector<uint32_t>& ids, size_t t, uint32_t window,
                            std::vector<uint32_t>& out) {
  out.clear();
  size_t lo = t >= window ? t - window : 0;
  size_t hi = std::min(ids.size() - 1, t + window);
  for (size_t u = lo; u <= hi; ++u) {
    if (u != t) out.push_back(ids[u]);
  }
}

void sgns_stage(ModelParams& model, const std::vector<uint32_t>& ids,
                const NoiseSampler& noise, LossTrace& trace) {
  const TrainConfig& cfg = model.config;
  const size_t dim = cfg.d_word;
  Adam adam(cfg.adam);
  {
    // Slot 0: target table, slot 1: context table (row updates).
    std::vector<TensorRef> refs{
        {"target", model.target_table.a.data(), nullptr, model.target_table.size()},
        {"context", model.context_table.a.data(), nullptr, model.context_table.size()}};
    adam.register_params(refs);
  }

  TraceCollector collector(trace, cfg.trace_every);

  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::atomic<bool> failed{false};
    std::string fail_msg;
    std::mutex fail_mu;

    run_workers(cfg.workers, [&](uint32_t w) {
      Rng rng(derive_seed(cfg.seed, kWorkerStream + w));
      Shard shard = shard_of(ids.size(), cfg.workers, w);
      std::vector<uint32_t> contexts;
      std::vector<uint32_t> negs;
      Vec w_grad(dim);
      Vec w_snapshot(dim);
      std::vector<std::pair<uint32_t, double>> row_coeffs;

      try {
        for (size_t t = shard.begin; t < shard.end && !failed.load(); ++t) {
          uint32_t target = ids[t];
          window_contexts(ids, t, cfg.window, contexts);
          for (uint32_t ctx : contexts) {
            noise.sample_k(rng, cfg.negatives, negs);
            // Gradients are taken at a snapshot of the target row so the
            // row update does not feed back into the same pair.
            std::copy_n(model.target_table.row(target), dim, w_snapshot.begin());
            std::fill(w_grad.begin(), w_grad.end(), 0.0);
            row_coeffs.clear();
            double loss = sgns_pair_loss(
                w_snapshot.data(), dim, model.context_table, ctx, negs, w_grad.data(),
                [&](uint32_t row, double coeff) { row_coeffs.emplace_back(row, coeff); });
            if (!std::isfinite(loss)) {
              throw NumericError("sgns: non-finite loss at position " + std::to_string(t));
            }

            AdamScale scale = adam.next_step();
            adam.update_row(0, scale, model.target_table, target, w_grad.data());
            // Duplicate negative rows are merged before the moment update.
            std::sort(row_coeffs.begin(), row_coeffs.end());
            for (size_t i = 0; i < row_coeffs.size();) {
              uint32_t row = row_coeffs[i].first;
              double coeff = 0.0;
              while (i < row_coeffs.size() && row_coeffs[i].first == row) {
                coeff += row_coeffs[i++].second;
              }
              for (size_t j = 0; j < dim; ++j) w_grad[j] = coeff * w_snapshot[j];
              adam.update_row(1, scale, model.context_table, row, w_grad.data());
            }
            collector.add(loss, 1);
          }
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(fail_mu);
        failed.store(true);
        if (fail_msg.empty()) fail_msg = e.what();
      }
    });

    if (failed.load()) throw NumericError(fail_msg);
    collector.finish_epoch();
  }
}

void char_stage(ModelParams& model, const std::vector<uint32_t>& ids,
                const NoiseSampler& noise, LossTrace& trace) {
  const TrainConfig& cfg = model.config;
  const size_t dim = cfg.d_word;
  const bool attention = model.has_attention();
  const bool update_context = !model.context_frozen;

  // Padded character sequences for every vocabulary word, built once.
  std::vector<std::vector<uint32_t>> padded(model.vocab.size());
  for (uint32_t i = 0; i < model.vocab.size(); ++i) {
    padded[i] = model.chars.char_sequence(model.vocab.word(i), OnUnknownChar::kError);
  }

  // One gradient buffer per worker; the parameter tensors are shared.
  std::vector<EncoderGrads> worker_grads(cfg.workers, EncoderGrads(model));
  EncoderGrads adam_layout(model);
  std::vector<TensorRef> refs = char_tensor_refs(model, adam_layout);
  size_t context_slot = refs.size();
  Adam adam(cfg.adam);
  {
    std::vector<TensorRef> all = refs;
    all.push_back({"context", model.context_table.a.data(), nullptr,
                   model.context_table.size()});
    adam.register_params(all);
  }

  TraceCollector collector(trace, cfg.trace_every);

  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::atomic<bool> failed{false};
    std::string fail_msg;
    std::mutex fail_mu;

    run_workers(cfg.workers, [&](uint32_t w) {
      Rng rng(derive_seed(cfg.seed, kWorkerStream + 1024 + w));
      Shard shard = shard_of(ids.size(), cfg.workers, w);
      EncoderGrads& grads = worker_grads[w];
      std::vector<TensorRef> worker_refs = char_tensor_refs(model, grads);
      EncoderWorkspace ws;
      EncodeCache cache;
      AttentionResult att;
      Vec word_vec;
      Vec d_f(dim);
      std::vector<uint32_t> contexts;
      std::vector<uint32_t> negs;
      std::vector<std::pair<uint32_t, double>> row_coeffs;
      Vec row_grad(dim);

      try {
        for (size_t t = shard.begin; t < shard.end && !failed.load(); ++t) {
          uint32_t target = ids[t];
          window_contexts(ids, t, cfg.window, contexts);
          if (contexts.empty()) continue;

          encode_word(model, padded[target], attention, cache);
          if (attention) {
            attend(model, cache, att);
            word_vec = att.word_vec;
          } else {
            no_att_head(model, cache, word_vec, ws);
          }

          // One optimizer step per target position; the loss sums the
          // pair objective over every context in the window, each with
          // its own fresh negatives.
          std::fill(d_f.begin(), d_f.end(), 0.0);
          row_coeffs.clear();
          double loss = 0.0;
          for (uint32_t ctx : contexts) {
            noise.sample_k(rng, cfg.negatives, negs);
            loss += sgns_pair_loss(
                word_vec.data(), dim, model.context_table, ctx, negs, d_f.data(),
                update_context
                    ? std::function<void(uint32_t, double)>(
                          [&](uint32_t row, double coeff) { row_coeffs.emplace_back(row, coeff); })
                    : std::function<void(uint32_t, double)>());
          }
          if (!std::isfinite(loss)) {
            throw NumericError("char training: non-finite loss at position " +
                               std::to_string(t) + " (word '" +
                               model.vocab.word(target) + "')");
          }

          grads.zero();
          if (attention) {
            char2vec_backward(model, cache, att, d_f, grads, ws);
          } else {
            no_att_backward(model, cache, word_vec, d_f, grads, ws);
          }

          AdamScale scale = adam.next_step();
          for (size_t slot = 0; slot < worker_refs.size(); ++slot) {
            adam.update(slot, scale, worker_refs[slot]);
          }
          if (update_context && !row_coeffs.empty()) {
            std::sort(row_coeffs.begin(), row_coeffs.end());
            for (size_t i = 0; i < row_coeffs.size();) {
              uint32_t row = row_coeffs[i].first;
              double coeff = 0.0;
              while (i < row_coeffs.size() && row_coeffs[i].first == row) {
                coeff += row_coeffs[i++].second;
              }
              for (size_t j = 0; j < dim; ++j) row_grad[j] = coeff * word_vec[j];
              adam.update_row(context_slot, scale, model.context_table, row,
                              row_grad.data());
            }
          }
          collector.add(loss, contexts.size());
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(fail_mu);
        failed.store(true);
        if (fail_msg.empty()) fail_msg = e.what();
      }
    });

    if (failed.load()) throw NumericError(fail_msg);
    collector.finish_epoch();
  }
}

}  // namespace

void train_char_stage(ModelParams& model, const std::vector<uint32_t>& ids,
                      LossTrace& trace) {
  NoiseSampler noise = NoiseSampler::build(model.vocab.counts(), model.config.noise_alpha);
  char_stage(model, ids, noise, trace);
}

TrainResult train_on_text(const TrainConfig& config, std::string_view text) {
  config.validate();

  TrainResult result;
  ModelParams& model = result.model;
  model.kind = config.kind;
  model.config = config;
  model.config.kind = config.kind;

  uint64_t total_tokens = 0;
  auto counts = count_tokens(text, &total_tokens);
  model.vocab = Vocab::build(counts, config.min_count, total_tokens);
  std::vector<uint32_t> ids = ids_in_vocab(text, model.vocab);

  if (config.kind == ModelKind::kPpmiSvd) {
    ppmi_svd_train(model, ids);
    return result;
  }

  NoiseSampler noise = NoiseSampler::build(model.vocab.counts(), config.noise_alpha);

  // Stage 1: plain SGNS with both tables free.
  Rng init_rng(derive_seed(config.seed, kInitStream));
  model.allocate_tables();
  model.init_tables(init_rng);
  model.context_frozen = false;
  sgns_stage(model, ids, noise, result.stage1);

  if (config.kind == ModelKind::kSgns) return result;

  // Stage 2: freeze the stage-1 context table and train the character
  // parameters against it.
  model.chars = CharVocab::build(model.vocab);
  Rng stage2_rng(derive_seed(config.seed, kStage2InitStream));
  model.allocate_char_encoder();
  model.init_char_encoder(stage2_rng);
  model.context_frozen = config.freeze_context;
  char_stage(model, ids, noise, result.stage2);
  return result;
}

TrainResult train(const TrainConfig& config, const std::string& corpus_path,
                  uint64_t max_bytes) {
  std::string text = read_file(corpus_path);
  if (max_bytes > 0 && text.size() > max_bytes) {
    // Cut at a token boundary so no truncated word enters the counts.
    size_t cut = max_bytes;
    while (cut > 0 && !std::isspace(static_cast<unsigned char>(text[cut - 1]))) --cut;
    text.resize(cut);
  }
  return train_on_text(config, text);
}

}  // namespace c2v
