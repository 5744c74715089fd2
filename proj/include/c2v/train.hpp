// Two-stage training under the skip-gram negative-sampling objective:
// stage 1 trains word target/context tables; stage 2 freezes the context
// table and trains the character encoder against it. Single-worker runs
// are bit-reproducible; multi-worker runs share tensors lock-free and are
// only statistically equivalent.
#pragma once

#include <string>

#include "c2v/model.hpp"

namespace c2v {

struct TracePoint {
  uint64_t pairs_seen = 0;
  double mean_loss = 0.0;  // mean over the pairs since the previous point
};

struct LossTrace {
  std::vector<TracePoint> points;
  std::vector<double> epoch_mean;  // mean loss per epoch
  uint64_t total_pairs = 0;
};

struct TrainResult {
  ModelParams model;
  LossTrace stage1;
  LossTrace stage2;
};

// Trains on a corpus already loaded as text. Stages depend on the model
// kind: sgns stops after stage 1, the char models continue into stage 2,
// ppmi-svd takes the counting path instead.
TrainResult train_on_text(const TrainConfig& config, std::string_view text);

// Reads the corpus file (optionally only its first max_bytes, cut at a
// token boundary) and trains.
TrainResult train(const TrainConfig& config, const std::string& corpus_path,
                  uint64_t max_bytes = 0);

// Stage 2 only, continuing from an existing stage-1 table. Exposed for
// ablations and tests; `model` must carry vocab, chars and context table.
void train_char_stage(ModelParams& model, const std::vector<uint32_t>& ids,
                      LossTrace& trace);

}  // namespace c2v
