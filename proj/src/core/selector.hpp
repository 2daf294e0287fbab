// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <string>
#include <vector>

#include "core/nn.hpp"

namespace spanqa {

struct SelectorConfig {
  size_t emb_dim = 64;
  size_t hidden = 32;
  int layers = 1;
};

// Parameter layout under `prefix` (usually "selector"):
//   .emb        V x D embedding table
//   .qlstm.*    question encoder (bidirectional)
//   .plstm.*    paragraph encoder (bidirectional)
//   .attn.w     self-attention weight vector, 2H
//   .bilinear.w relevance bilinear, 2H x 2H
void selector_init(ParamStore& ps, const std::string& prefix, const SelectorConfig& cfg,
                   size_t vocab_size, uint64_t seed);

void selector_extend_vocab(ParamStore& ps, const std::string& prefix, const SelectorConfig& cfg,
                           const std::vector<std::string>& new_tokens, uint64_t seed);

// Self-attended question summary: weights softmax(w_b . q_j), output the
// convex combination of states. (m x 2H) -> 2H.
int self_attend(Tape& t, int q_states, int w_b);

struct ParagraphDistribution {
  std::string question_id;
  std::vector<std::string> paragraph_ids;
  std::vector<double> probs;  // positive, sum to 1
};

struct SelectorNodes {
  int scores = -1;  // per-paragraph max-pooled bilinear scores, length P
  int dist = -1;    // softmax over scores
};

// Scores every paragraph of a question: max over paragraph tokens of the
// bilinear match against the attended question vector, then softmax across
// the paragraph set.
SelectorNodes selector_forward(Tape& t, const ParamStore& ps, const std::string& prefix,
                               const SelectorConfig& cfg, const std::vector<int>& q_ids,
                               const std::vector<std::vector<int>>& paragraphs);

// KL divergence from the uniform-over-positives target to the predicted
// distribution. Requires at least one positive label. For a single positive
// this is the negative log probability of that paragraph.
int selector_loss(Tape& t, int dist_node, const std::vector<int>& labels);

// Inference wrapper running its own tape.
ParagraphDistribution selector_distribution(const ParamStore& ps, const std::string& prefix,
                                            const SelectorConfig& cfg,
                                            const std::vector<int>& q_ids,
                                            const std::vector<std::vector<int>>& paragraphs,
                                            const std::string& question_id,
                                            const std::vector<std::string>& paragraph_ids);

}  // namespace spanqa
