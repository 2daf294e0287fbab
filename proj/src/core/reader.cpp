// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/reader.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace spanqa {

void reader_init(ParamStore& ps, const std::string& prefix, const ReaderConfig& cfg,
                 size_t vocab_size, uint64_t seed) {
  const size_t D = cfg.emb_dim, H = cfg.hidden;
  ps.add(prefix + ".emb", init_uniform({vocab_size, D}, seed, prefix + ".emb"));
  ps.add(prefix + ".align.w", init_uniform({D, D}, seed, prefix + ".align.w"));
  ps.add(prefix + ".align.b", Tensor::zeros({D}));
  bilstm_init(ps, prefix + ".qlstm", D, H, cfg.layers, seed);
  bilstm_init(ps, prefix + ".plstm", 2 * D, H, cfg.layers, seed);
  ps.add(prefix + ".pool.w", init_uniform({2 * H}, seed, prefix + ".pool.w"));
  ps.add(prefix + ".start.w", init_uniform({2 * H, 2 * H}, seed, prefix + ".start.w"));
  ps.add(prefix + ".end.w", init_uniform({2 * H, 2 * H}, seed, prefix + ".end.w"));
}

void reader_extend_vocab(ParamStore& ps, const std::string& prefix, const ReaderConfig& cfg,
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

int aligned_attention(Tape& t, int q_emb, int p_emb, int proj_w, int proj_b) {
  if (t.value(q_emb).cols() != t.value(p_emb).cols())
    throw dimension_error("aligned_attention: embedding width mismatch " +
                          shape_str(t.value(q_emb).shape) + " vs " +
                          shape_str(t.value(p_emb).shape));
  int q_proj = t.relu(t.add_rowvec(t.matmul(q_emb, proj_w), proj_b));
  int p_proj = t.relu(t.add_rowvec(t.matmul(p_emb, proj_w), proj_b));
  int scores = t.matmul_nt(p_proj, q_proj);  // n x m
  int attn = t.softmax_rows(scores);
  return t.matmul(attn, q_emb);  // n x D
}

int question_pool(Tape& t, int q_states, int w) {
  int scores = t.matvec(q_states, w);
  int weights = t.softmax_vec(scores);
  return t.tmatvec(q_states, weights);
}

ReaderNodes reader_forward(Tape& t, const ParamStore& ps, const std::string& prefix,
                           const ReaderConfig& cfg, const std::vector<int>& q_ids,
                           const std::vector<int>& p_ids) {
  if (q_ids.empty()) throw argument_error("reader_forward: empty question");
  if (p_ids.empty()) throw argument_error("reader_forward: empty paragraph");

  int emb = t.param(prefix + ".emb", ps.at(prefix + ".emb"));
  int q_emb = t.embed(emb, q_ids);
  int p_emb = t.embed(emb, p_ids);

  int align_w = t.param(prefix + ".align.w", ps.at(prefix + ".align.w"));
  int align_b = t.param(prefix + ".align.b", ps.at(prefix + ".align.b"));
  int falign = aligned_attention(t, q_emb, p_emb, align_w, align_b);

  int q_states = bilstm_encode(t, ps, prefix + ".qlstm", q_emb, cfg.hidden, cfg.layers);
  int p_in = t.hconcat(p_emb, falign);
  int p_states = bilstm_encode(t, ps, prefix + ".plstm", p_in, cfg.hidden, cfg.layers);

  int pool_w = t.param(prefix + ".pool.w", ps.at(prefix + ".pool.w"));
  int q_vec = question_pool(t, q_states, pool_w);

  int ws = t.param(prefix + ".start.w", ps.at(prefix + ".start.w"));
  int we = t.param(prefix + ".end.w", ps.at(prefix + ".end.w"));
  ReaderNodes out;
  out.start_logits = t.matvec(p_states, t.matvec(ws, q_vec));
  out.end_logits = t.matvec(p_states, t.matvec(we, q_vec));
  return out;
}

int reader_loss(Tape& t, const ReaderNodes& nodes,
                const std::vector<std::pair<int, int>>& gold_spans) {
  if (gold_spans.empty()) throw argument_error("reader_loss: no gold span in paragraph");
  std::set<int> starts, ends;
  const int n = static_cast<int>(t.value(nodes.start_logits).numel());
  for (const auto& [s, e] : gold_spans) {
    if (s < 0 || e < s || e >= n)
      throw argument_error("reader_loss: gold span [" + std::to_string(s) + "," +
                           std::to_string(e) + "] out of range for " + std::to_string(n) +
                           " tokens");
    starts.insert(s);
    ends.insert(e);
  }
  // -log sum_g softmax(l)_g == logsumexp(l) - logsumexp(l[gold])
  auto marginal_nll = [&](int logits, const std::set<int>& gold) {
    std::vector<int> ids(gold.begin(), gold.end());
    int all = t.logsumexp(logits);
    int sub = t.logsumexp(t.gather(logits, ids));
    return t.add(all, t.scale(sub, -1.0));
  };
  return t.add(marginal_nll(nodes.start_logits, starts), marginal_nll(nodes.end_logits, ends));
}

SpanScores reader_score(const ParamStore& ps, const std::string& prefix, const ReaderConfig& cfg,
                        const std::vector<int>& q_ids, const std::vector<int>& p_ids,
                        const std::string& paragraph_id) {
  Tape t;
  ReaderNodes nodes = reader_forward(t, ps, prefix, cfg, q_ids, p_ids);
  SpanScores out;
  out.paragraph_id = paragraph_id;
  out.start = t.value(nodes.start_logits).data;
  out.end = t.value(nodes.end_logits).data;
  if (!t.value(nodes.start_logits).all_finite() || !t.value(nodes.end_logits).all_finite())
    throw training_error("reader_score: non-finite logits for paragraph '" + paragraph_id + "'");
  return out;
}

std::pair<int, int> decode_span(const SpanScores& scores, int max_window) {
  const int n = static_cast<int>(scores.start.size());
  if (n < 1) throw argument_error("decode_span: empty scores");
  int bi = 0, bj = 0;
  double best = scores.start[0] + scores.end[0];
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n && j <= i + max_window; ++j) {
      double v = scores.start[static_cast<size_t>(i)] + scores.end[static_cast<size_t>(j)];
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  return {bi, bj};
}

namespace {

struct RawSpan {
  int i, j;
  double score;
};

// Canonical ordering for spans within one paragraph: score desc, then
// position. Shared by all decode paths so ties resolve identically.
bool span_before(const RawSpan& a, const RawSpan& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

std::vector<RawSpan> enumerate_spans(const SpanScores& scores, int max_window) {
  const int n = static_cast<int>(scores.start.size());
  std::vector<RawSpan> out;
  out.reserve(static_cast<size_t>(n) * static_cast<size_t>(std::min(n, max_window + 1)));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n && j <= i + max_window; ++j)
      out.push_back({i, j, scores.start[static_cast<size_t>(i)] + scores.end[static_cast<size_t>(j)]});
  return out;
}

}  // namespace

std::vector<SpanCandidate> topk_spans(const SpanScores& scores, const TokenizedText& text, int k,
                                      int max_window) {
  if (k < 1) throw argument_error("topk_spans: k must be >= 1");
  if (scores.start.size() != text.size())
    throw dimension_error("topk_spans: scores length " + std::to_string(scores.start.size()) +
                          " vs " + std::to_string(text.size()) + " tokens");
  std::vector<RawSpan> all = enumerate_spans(scores, max_window);
  std::sort(all.begin(), all.end(), span_before);
  std::vector<SpanCandidate> out;
  std::set<std::string> seen;
  for (const auto& s : all) {
    std::string surface = text.surface(static_cast<size_t>(s.i), static_cast<size_t>(s.j));
    std::string norm = normalize_answer(surface);
    if (!seen.insert(norm).second) continue;
    SpanCandidate c;
    c.paragraph_id = scores.paragraph_id;
    c.start = s.i;
    c.end = s.j;
    c.text = std::move(surface);
    c.norm = std::move(norm);
    c.score = s.score;
    out.push_back(std::move(c));
    if (static_cast<int>(out.size()) == k) break;
  }
  return out;
}

std::vector<SpanCandidate> span_probabilities(const SpanScores& scores, const TokenizedText& text,
                                              int max_window) {
  if (scores.start.size() != text.size())
    throw dimension_error("span_probabilities: scores length " +
                          std::to_string(scores.start.size()) + " vs " +
                          std::to_string(text.size()) + " tokens");
  std::vector<double> ps = softmax_values(scores.start);
  std::vector<double> pe = softmax_values(scores.end);
  std::vector<RawSpan> all = enumerate_spans(scores, max_window);
  std::sort(all.begin(), all.end(), span_before);

  // Key by normalized string; the first (best) occurrence is representative.
  std::map<std::string, SpanCandidate> agg;
  for (const auto& s : all) {
    std::string surface = text.surface(static_cast<size_t>(s.i), static_cast<size_t>(s.j));
    std::string norm = normalize_answer(surface);
    double p = ps[static_cast<size_t>(s.i)] * pe[static_cast<size_t>(s.j)];
    auto it = agg.find(norm);
    if (it == agg.end()) {
      SpanCandidate c;
      c.paragraph_id = scores.paragraph_id;
      c.start = s.i;
      c.end = s.j;
      c.text = std::move(surface);
      c.norm = norm;
      c.score = s.score;
      c.prob = p;
      agg.emplace(std::move(norm), std::move(c));
    } else {
      it->second.prob += p;
    }
  }
  std::vector<SpanCandidate> out;
  out.reserve(agg.size());
  for (auto& [norm, c] : agg) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), [](const SpanCandidate& a, const SpanCandidate& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    return a.norm < b.norm;
  });
  return out;
}

}  // namespace spanqa
