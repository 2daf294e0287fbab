// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/metrics.hpp"
#include "core/ranking.hpp"
#include "core/train.hpp"

namespace spanqa {

struct ReaderModel {
  ReaderConfig cfg;
  Vocab vocab;
  ParamStore params;
  std::string prefix = "reader";
};

struct SelectorModel {
  SelectorConfig cfg;
  Vocab vocab;
  ParamStore params;
  std::string prefix = "selector";
};

// Both checkpoint kinds carry a reader; only pspr carries a selector.
ReaderModel reader_from_checkpoint(const Checkpoint& c);
std::optional<SelectorModel> selector_from_checkpoint(const Checkpoint& c);

struct PredictOptions {
  std::string strategy = kStrategyReaderOnly;
  int k = 5;
};

// Runs the reader (and selector when the strategy calls for one) over every
// non-empty paragraph of the question and assembles the answer list.
// Questions with no usable paragraph produce an empty list.
AnswerList predict_question(const ReaderModel& reader, const SelectorModel* selector,
                            const QAExample& ex, const PredictOptions& opt);

std::vector<AnswerList> predict_dataset(const ReaderModel& reader, const SelectorModel* selector,
                                        const QADataset& ds, const PredictOptions& opt);

std::map<std::string, std::vector<std::string>> gold_answers(const QADataset& ds);

// predict + evaluate in one step; used for training-time evaluation.
MetricsReport evaluate_model(const ReaderModel& reader, const SelectorModel* selector,
                             const QADataset& ds, const PredictOptions& opt);

}  // namespace spanqa
