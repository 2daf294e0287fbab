// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/reader.hpp"
#include "core/selector.hpp"

namespace spanqa {

// Per-paragraph candidate set as produced by span_probabilities.
struct ParagraphCandidates {
  std::string paragraph_id;
  std::vector<SpanCandidate> candidates;
};

struct AnswerEntry {
  std::string text;
  std::string norm;
  double score = 0;
  std::vector<std::string> paragraph_ids;  // contributors, best first
};

struct AnswerList {
  std::string question_id;
  std::string strategy;
  std::vector<AnswerEntry> answers;  // deduplicated, scores non-increasing, <= k
};

extern const char* const kStrategyReaderOnly;      // "reader_only"
extern const char* const kStrategyReaderSelector;  // "reader_times_selector"
extern const char* const kStrategyCombined;        // "combined"

// Answer probability marginalized over paragraphs: for every normalized
// candidate string, sum over paragraphs of P(answer | paragraph) *
// P(paragraph). Paragraph ids of the two inputs must agree.
std::map<std::string, double> combine(const std::vector<ParagraphCandidates>& per_paragraph,
                                      const ParagraphDistribution& dist);

// Top-k candidates of the marginalized distribution. Ties break by the
// largest single-paragraph contribution, then lexicographic string.
AnswerList topk_combined(const std::string& question_id,
                         const std::vector<ParagraphCandidates>& per_paragraph,
                         const ParagraphDistribution& dist, int k = 5);

// Reader-only pooling. With more than k paragraphs, the best candidate of
// each paragraph competes; otherwise all candidates pool. Probabilities are
// per-paragraph normalized.
AnswerList topk_reader_only(const std::string& question_id,
                            const std::vector<ParagraphCandidates>& per_paragraph, int k = 5);

// Rerank by multiplying each candidate's reader probability with its own
// paragraph's selector probability; dedup keeps the best product.
AnswerList topk_reranked(const std::string& question_id,
                         const std::vector<ParagraphCandidates>& per_paragraph,
                         const ParagraphDistribution& dist, int k = 5);

// Prediction file: {"strategy", "predictions":[{"question_id","answers":[...]}]}.
std::string predictions_to_json(const std::vector<AnswerList>& lists, const std::string& strategy);
void save_predictions(const std::vector<AnswerList>& lists, const std::string& strategy,
                      const std::string& path);
std::vector<AnswerList> load_predictions(const std::string& path);

}  // namespace spanqa
