// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/ranking.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace spanqa {

using ordered_json = nlohmann::ordered_json;

const char* const kStrategyReaderOnly = "reader_only";
const char* const kStrategyReaderSelector = "reader_times_selector";
const char* const kStrategyCombined = "combined";

namespace {

void check_alignment(const std::vector<ParagraphCandidates>& per_paragraph,
                     const ParagraphDistribution& dist) {
  if (per_paragraph.size() != dist.paragraph_ids.size() ||
      dist.paragraph_ids.size() != dist.probs.size())
    throw argument_error("combine: paragraph count mismatch between candidates (" +
                         std::to_string(per_paragraph.size()) + ") and distribution (" +
                         std::to_string(dist.paragraph_ids.size()) + ")");
  for (size_t i = 0; i < per_paragraph.size(); ++i) {
    if (per_paragraph[i].paragraph_id != dist.paragraph_ids[i])
      throw argument_error("combine: paragraph id mismatch at position " + std::to_string(i) +
                           ": '" + per_paragraph[i].paragraph_id + "' vs '" +
                           dist.paragraph_ids[i] + "'");
  }
}

struct Pooled {
  std::string text;
  std::string norm;
  double score = 0;
  size_t paragraph_index = 0;
  int start = 0, end = 0;
  std::vector<std::string> paragraph_ids;
};

// Pool ordering shared by reader_only and reranked: score desc, earlier
// paragraph, earlier span, then string.
bool pooled_before(const Pooled& a, const Pooled& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.paragraph_index != b.paragraph_index) return a.paragraph_index < b.paragraph_index;
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return a.norm < b.norm;
}

AnswerList finalize(const std::string& question_id, const char* strategy,
                    std::vector<Pooled> pool, int k) {
  std::sort(pool.begin(), pool.end(), pooled_before);
  AnswerList out;
  out.question_id = question_id;
  out.strategy = strategy;
  std::set<std::string> seen;
  for (auto& c : pool) {
    if (!seen.insert(c.norm).second) continue;
    AnswerEntry e;
    e.text = std::move(c.text);
    e.norm = std::move(c.norm);
    e.score = c.score;
    e.paragraph_ids = std::move(c.paragraph_ids);
    out.answers.push_back(std::move(e));
    if (static_cast<int>(out.answers.size()) == k) break;
  }
  return out;
}

}  // namespace

std::map<std::string, double> combine(const std::vector<ParagraphCandidates>& per_paragraph,
                                      const ParagraphDistribution& dist) {
  check_alignment(per_paragraph, dist);
  std::map<std::string, double> out;
  for (size_t pi = 0; pi < per_paragraph.size(); ++pi) {
    double pp = dist.probs[pi];
    for (const auto& c : per_paragraph[pi].candidates) out[c.norm] += c.prob * pp;
  }
  return out;
}

AnswerList topk_combined(const std::string& question_id,
                         const std::vector<ParagraphCandidates>& per_paragraph,
                         const ParagraphDistribution& dist, int k) {
  if (k < 1) throw argument_error("topk_combined: k must be >= 1");
  check_alignment(per_paragraph, dist);

  struct Entry {
    std::string text;
    double total = 0;
    double best_contrib = -1;
    std::vector<std::pair<double, std::string>> contribs;  // (contribution, paragraph id)
  };
  std::map<std::string, Entry> agg;
  for (size_t pi = 0; pi < per_paragraph.size(); ++pi) {
    double pp = dist.probs[pi];
    for (const auto& c : per_paragraph[pi].candidates) {
      double contrib = c.prob * pp;
      Entry& e = agg[c.norm];
      e.total += contrib;
      e.contribs.emplace_back(contrib, per_paragraph[pi].paragraph_id);
      if (contrib > e.best_contrib) {
        e.best_contrib = contrib;
        e.text = c.text;
      }
    }
  }

  struct Ranked {
    std::string norm;
    Entry e;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(agg.size());
  for (auto& [norm, e] : agg) ranked.push_back({norm, std::move(e)});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.e.total != b.e.total) return a.e.total > b.e.total;
    if (a.e.best_contrib != b.e.best_contrib) return a.e.best_contrib > b.e.best_contrib;
    return a.norm < b.norm;
  });

  AnswerList out;
  out.question_id = question_id;
  out.strategy = kStrategyCombined;
  for (auto& r : ranked) {
    if (static_cast<int>(out.answers.size()) == k) break;
    AnswerEntry e;
    e.text = std::move(r.e.text);
    e.norm = std::move(r.norm);
    e.score = r.e.total;
    std::stable_sort(r.e.contribs.begin(), r.e.contribs.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [contrib, pid] : r.e.contribs) e.paragraph_ids.push_back(pid);
    out.answers.push_back(std::move(e));
  }
  return out;
}

AnswerList topk_reader_only(const std::string& question_id,
                            const std::vector<ParagraphCandidates>& per_paragraph, int k) {
  if (k < 1) throw argument_error("topk_reader_only: k must be >= 1");
  if (per_paragraph.empty()) throw argument_error("topk_reader_only: no paragraphs");

  std::vector<Pooled> pool;
  const bool one_per_paragraph = static_cast<int>(per_paragraph.size()) > k;
  for (size_t pi = 0; pi < per_paragraph.size(); ++pi) {
    const auto& cands = per_paragraph[pi].candidates;
    size_t take = one_per_paragraph ? std::min<size_t>(1, cands.size()) : cands.size();
    for (size_t ci = 0; ci < take; ++ci) {
      const SpanCandidate& c = cands[ci];
      Pooled p;
      p.text = c.text;
      p.norm = c.norm;
      p.score = c.prob;
      p.paragraph_index = pi;
      p.start = c.start;
      p.end = c.end;
      p.paragraph_ids = {per_paragraph[pi].paragraph_id};
      pool.push_back(std::move(p));
    }
  }
  return finalize(question_id, kStrategyReaderOnly, std::move(pool), k);
}

AnswerList topk_reranked(const std::string& question_id,
                         const std::vector<ParagraphCandidates>& per_paragraph,
                         const ParagraphDistribution& dist, int k) {
  if (k < 1) throw argument_error("topk_reranked: k must be >= 1");
  check_alignment(per_paragraph, dist);

  std::vector<Pooled> pool;
  for (size_t pi = 0; pi < per_paragraph.size(); ++pi) {
    for (const auto& c : per_paragraph[pi].candidates) {
      Pooled p;
      p.text = c.text;
      p.norm = c.norm;
      p.score = c.prob * dist.probs[pi];
      p.paragraph_index = pi;
      p.start = c.start;
      p.end = c.end;
      p.paragraph_ids = {per_paragraph[pi].paragraph_id};
      pool.push_back(std::move(p));
    }
  }
  return finalize(question_id, kStrategyReaderSelector, std::move(pool), k);
}

std::string predictions_to_json(const std::vector<AnswerList>& lists,
                                const std::string& strategy) {
  ordered_json root;
  root["strategy"] = strategy;
  ordered_json preds = ordered_json::array();
  for (const auto& list : lists) {
    ordered_json lj;
    lj["question_id"] = list.question_id;
    ordered_json answers = ordered_json::array();
    for (const auto& a : list.answers) {
      ordered_json aj;
      aj["text"] = a.text;
      aj["score"] = a.score;
      answers.push_back(std::move(aj));
    }
    lj["answers"] = std::move(answers);
    preds.push_back(std::move(lj));
  }
  root["predictions"] = std::move(preds);
  return root.dump(1) + "\n";
}

void save_predictions(const std::vector<AnswerList>& lists, const std::string& strategy,
                      const std::string& path) {
  write_file_atomic(path, predictions_to_json(lists, strategy));
}

std::vector<AnswerList> load_predictions(const std::string& path) {
  ordered_json root;
  try {
    root = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error("parse error in " + path + " at byte " + std::to_string(e.byte) + ": " +
                       e.what());
  }
  if (!root.contains("predictions") || !root["predictions"].is_array())
    throw format_error(path + ": missing 'predictions' array");
  std::string strategy =
      root.contains("strategy") && root["strategy"].is_string() ? root["strategy"] : "";
  std::vector<AnswerList> out;
  for (const auto& lj : root["predictions"]) {
    AnswerList list;
    if (!lj.contains("question_id") || !lj["question_id"].is_string())
      throw format_error(path + ": prediction missing 'question_id'");
    list.question_id = lj["question_id"].get<std::string>();
    list.strategy = strategy;
    if (!lj.contains("answers") || !lj["answers"].is_array())
      throw format_error(path + ": prediction '" + list.question_id + "' missing 'answers'");
    for (const auto& aj : lj["answers"]) {
      AnswerEntry e;
      if (!aj.contains("text") || !aj["text"].is_string())
        throw format_error(path + ": answer without text in '" + list.question_id + "'");
      e.text = aj["text"].get<std::string>();
      e.norm = normalize_answer(e.text);
      e.score = aj.contains("score") && aj["score"].is_number() ? aj["score"].get<double>() : 0.0;
      list.answers.push_back(std::move(e));
    }
    out.push_back(std::move(list));
  }
  return out;
}

}  // namespace spanqa
