// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/selector.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace spanqa {

void selector_init(ParamStore& ps, const std::string& prefix, const SelectorConfig& cfg,
                   size_t vocab_size, uint64_t seed) {
  const size_t D = cfg.emb_dim, H = cfg.hidden;
  ps.add(prefix + ".emb", init_uniform({vocab_size, D}, seed, prefix + ".emb"));
  bilstm_init(ps, prefix + ".qlstm", D, H, cfg.layers, seed);
  bilstm_init(ps, prefix + ".plstm", D, H, cfg.layers, seed);
  ps.add(prefix + ".attn.w", init_uniform({2 * H}, seed, prefix + ".attn.w"));
  ps.add(prefix + ".bilinear.w", init_uniform({2 * H, 2 * H}, seed, prefix + ".bilinear.w"));
}

void selector_extend_vocab(ParamStore& ps, const std::string& prefix, const SelectorConfig& cfg,
                           const std::vector<std::string>& new_tokens, uint64_t seed) {
  if (new_tokens.empty()) return;
  Tensor& emb = ps.at(prefix + ".emb");
  const size_t D = cfg.emb_dim;
  emb.data.reserve(emb.data.size() + new_tokens.size() * D);
  for (const auto& tok : new_tokens) {
    Rng rng = stream(seed, prefix + ".emb.row." + tok);
    for (size_t j = 0; j < D; ++j) emb.data.push_back(rng.uniform(-0.08, 0.08));
  }
  emb.shape[0] += new_tokens.size();
}

int self_attend(Tape& t, int q_states, int w_b) {
  int scores = t.matvec(q_states, w_b);
  int weights = t.softmax_vec(scores);
  return t.tmatvec(q_states, weights);
}

SelectorNodes selector_forward(Tape& t, const ParamStore& ps, const std::string& prefix,
                               const SelectorConfig& cfg, const std::vector<int>& q_ids,
                               const std::vector<std::vector<int>>& paragraphs) {
  if (paragraphs.empty()) throw argument_error("selector_forward: empty paragraph set");
  if (q_ids.empty()) throw argument_error("selector_forward: empty question");
  for (const auto& p : paragraphs)
    if (p.empty()) throw argument_error("selector_forward: empty paragraph");

  int emb = t.param(prefix + ".emb", ps.at(prefix + ".emb"));
  int q_emb = t.embed(emb, q_ids);
  int q_states = bilstm_encode(t, ps, prefix + ".qlstm", q_emb, cfg.hidden, cfg.layers);
  int attn_w = t.param(prefix + ".attn.w", ps.at(prefix + ".attn.w"));
  int q_vec = self_attend(t, q_states, attn_w);

  int bw = t.param(prefix + ".bilinear.w", ps.at(prefix + ".bilinear.w"));
  int wq = t.matvec(bw, q_vec);

  std::vector<int> scores;
  scores.reserve(paragraphs.size());
  for (const auto& p_ids : paragraphs) {
    int p_emb = t.embed(emb, p_ids);
    int p_states = bilstm_encode(t, ps, prefix + ".plstm", p_emb, cfg.hidden, cfg.layers);
    scores.push_back(t.max_vec(t.matvec(p_states, wq)));
  }
  SelectorNodes out;
  out.scores = t.stack_scalars(scores);
  out.dist = t.softmax_vec(out.scores);
  return out;
}

int selector_loss(Tape& t, int dist_node, const std::vector<int>& labels) {
  const size_t n = t.value(dist_node).numel();
  if (labels.size() != n)
    throw argument_error("selector_loss: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(n) + " paragraphs");
  std::vector<int> positives;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1)
      positives.push_back(static_cast<int>(i));
    else if (labels[i] != 0)
      throw argument_error("selector_loss: labels must be 0 or 1");
  }
  if (positives.empty()) throw argument_error("selector_loss: no positive paragraph");
  const double k = static_cast<double>(positives.size());
  // KL(uniform over positives || dist) = -log k - mean_pos log dist_i
  int mean_log = t.scale(t.sum_vec(t.log_(t.gather(dist_node, positives))), -1.0 / k);
  return t.add(mean_log, t.constant(Tensor::scalar(-std::log(k))));
}

ParagraphDistribution selector_distribution(const ParamStore& ps, const std::string& prefix,
                                            const SelectorConfig& cfg,
                                            const std::vector<int>& q_ids,
                                            const std::vector<std::vector<int>>& paragraphs,
                                            const std::string& question_id,
                                            const std::vector<std::string>& paragraph_ids) {
  if (paragraph_ids.size() != paragraphs.size())
    throw argument_error("selector_distribution: id/paragraph count mismatch");
  Tape t;
  SelectorNodes nodes = selector_forward(t, ps, prefix, cfg, q_ids, paragraphs);
  ParagraphDistribution out;
  out.question_id = question_id;
  out.paragraph_ids = paragraph_ids;
  out.probs = t.value(nodes.dist).data;
  if (!t.value(nodes.dist).all_finite())
    throw training_error("selector_distribution: non-finite probabilities for question '" +
                         question_id + "'");
  return out;
}

}  // namespace spanqa
