// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/optim.hpp"
#include "core/reader.hpp"
#include "core/rng.hpp"
#include "core/selector.hpp"

namespace spanqa {

enum class ModelKind { kReader, kPspr };

ModelKind parse_kind(const std::string& s);
std::string kind_name(ModelKind k);

struct TrainConfig {
  ModelKind kind = ModelKind::kReader;
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
  size_t hidden = 32;
  size_t emb_dim = 64;
  int layers = 3;  // reader encoder depth; the selector always uses one layer
  int eval_every = 0;
  int min_count = 1;
  int span_window = 15;
  bool pspr_sequential = false;  // selector and reader updated in separate steps

  void validate(bool allow_zero_epochs = false) const;

  static TrainConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  ReaderConfig reader_config() const { return {emb_dim, hidden, layers, span_window}; }
  SelectorConfig selector_config() const { return {emb_dim, hidden, 1}; }
};

struct Provenance {
  std::string pretrain_dataset;
  std::string finetune_dataset;  // empty means none
  int64_t steps = 0;
  uint64_t seed = 0;
};

// Serialized model: named tensors + vocabulary + config + provenance.
// JSON with base64 little-endian doubles; round-trips bit-exactly.
struct Checkpoint {
  static constexpr int kVersion = 1;
  ModelKind kind = ModelKind::kReader;
  TrainConfig config;
  Provenance provenance;
  Vocab vocab;
  ParamStore params;
};

std::string checkpoint_to_json(const Checkpoint& c);
void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

class Trainer;

// Per-epoch hook: (1-based epoch, mean item loss, trainer). Return false to
// stop before the configured epoch count.
using EpochCallback = std::function<bool(int, double, const Trainer&)>;

// Owns the parameters and optimizer for one training run. Reader runs
// consume span-annotated paragraphs in batches; pspr runs consume one whole
// question per step with the joint selector + weighted-reader objective.
class Trainer {
 public:
  // Fresh parameters from cfg.seed, vocabulary built from `ds`.
  Trainer(const QADataset& ds, const TrainConfig& cfg);

  // Continue from saved weights; vocabulary is extended by the union with
  // `ds` and only the new embedding rows are initialized.
  Trainer(const Checkpoint& ckpt, const QADataset& ds, const TrainConfig& cfg);

  double run_epoch();

  int64_t steps() const { return optimizer_.step_count(); }
  size_t skipped_questions() const { return skipped_; }
  const Vocab& vocab() const { return vocab_; }
  const ParamStore& params() const { return params_; }
  const TrainConfig& config() const { return cfg_; }

  Checkpoint to_checkpoint() const;

 private:
  struct ReaderItem {
    std::vector<int> q_ids;
    std::vector<int> p_ids;
    std::vector<std::pair<int, int>> spans;
  };
  struct PsprItem {
    std::vector<int> q_ids;
    std::vector<std::vector<int>> p_ids;
    std::vector<int> labels;
    std::vector<std::vector<std::pair<int, int>>> spans;
  };

  void build_items(const QADataset& ds);
  double reader_epoch();
  double pspr_epoch();

  TrainConfig cfg_;
  Vocab vocab_;
  ParamStore params_;
  Adam optimizer_;
  Rng shuffle_rng_;
  Provenance provenance_;
  std::vector<ReaderItem> reader_items_;
  std::vector<PsprItem> pspr_items_;
  size_t skipped_ = 0;
  int64_t prior_steps_ = 0;
};

// Type-1 orchestration: train from random initialization.
Checkpoint pretrain(const QADataset& ds, const TrainConfig& cfg, const EpochCallback& cb = {});

// Continue training from saved weights; never re-initializes existing
// parameters. Zero epochs is allowed and only extends the vocabulary.
Checkpoint finetune(const Checkpoint& ckpt, const QADataset& ds, const TrainConfig& cfg,
                    const EpochCallback& cb = {});

// Joint selector + reader training on a relevance-labeled dataset.
Checkpoint train_pspr(const QADataset& ds, const TrainConfig& cfg, const EpochCallback& cb = {});

}  // namespace spanqa
