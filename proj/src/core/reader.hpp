// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/nn.hpp"

namespace spanqa {

struct ReaderConfig {
  size_t emb_dim = 64;
  size_t hidden = 32;
  int layers = 3;
  int span_window = 15;  // decode constraint: start <= end <= start + window
};

// Parameter layout under `prefix` (usually "reader"):
//   .emb            V x D embedding table
//   .align.w/.b     shared dense+ReLU projection for the alignment feature
//   .qlstm.*        question encoder stack
//   .plstm.*        paragraph encoder stack (input D + D alignment feature)
//   .pool.w         question pooling weight
//   .start.w/.end.w bilinear span scorers, 2H x 2H
void reader_init(ParamStore& ps, const std::string& prefix, const ReaderConfig& cfg,
                 size_t vocab_size, uint64_t seed);

// Appends embedding rows for tokens added to the vocabulary. Existing rows
// are preserved bit-exactly; each new row draws from its own named stream.
void reader_extend_vocab(ParamStore& ps, const std::string& prefix, const ReaderConfig& cfg,
                         const std::vector<std::string>& new_tokens, uint64_t seed);

// Soft alignment of paragraph tokens over question embeddings: for each
// paragraph position, attention weights from the dot product of a shared
// dense+ReLU mapping of both embeddings, then a convex combination of
// question embeddings. (m x D, n x D) -> n x D.
int aligned_attention(Tape& t, int q_emb, int p_emb, int proj_w, int proj_b);

// Learned convex pooling of question states into a single vector:
// softmax(w . state_j) weights. (m x 2H) -> 2H.
int question_pool(Tape& t, int q_states, int w);

struct ReaderNodes {
  int start_logits = -1;
  int end_logits = -1;
};

// Full forward pass for one (question, paragraph) pair of token ids.
ReaderNodes reader_forward(Tape& t, const ParamStore& ps, const std::string& prefix,
                           const ReaderConfig& cfg, const std::vector<int>& q_ids,
                           const std::vector<int>& p_ids);

// Marginal span likelihood: -log sum of start softmax over gold starts,
// plus the same for ends. Requires at least one gold span.
int reader_loss(Tape& t, const ReaderNodes& nodes,
                const std::vector<std::pair<int, int>>& gold_spans);

struct SpanScores {
  std::string paragraph_id;
  std::vector<double> start;  // logits, length n
  std::vector<double> end;
};

// Convenience inference wrapper: runs a fresh tape and extracts logits.
SpanScores reader_score(const ParamStore& ps, const std::string& prefix, const ReaderConfig& cfg,
                        const std::vector<int>& q_ids, const std::vector<int>& p_ids,
                        const std::string& paragraph_id);

// Best span under the window constraint, maximizing start + end logit.
// Ties break toward the smaller start, then smaller end.
std::pair<int, int> decode_span(const SpanScores& scores, int max_window = 15);

struct SpanCandidate {
  std::string paragraph_id;
  int start = 0;
  int end = 0;
  std::string text;  // raw surface of the best-scoring occurrence
  std::string norm;  // normalized form, the dedup key
  double score = 0;  // log domain: start_logit + end_logit of best occurrence
  double prob = 0;   // within-paragraph probability, summed over occurrences
};

// Top-k valid spans by log score, deduplicated by normalized string
// (best-scoring occurrence kept). May return fewer than k.
std::vector<SpanCandidate> topk_spans(const SpanScores& scores, const TokenizedText& text, int k,
                                      int max_window = 15);

// Within-paragraph answer probabilities: start/end softmaxes over tokens,
// candidate probability = sum over occurrences of the same normalized
// string of P(start) * P(end). Sorted best first.
std::vector<SpanCandidate> span_probabilities(const SpanScores& scores, const TokenizedText& text,
                                              int max_window = 15);

}  // namespace spanqa
