// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/metrics.hpp"

#include <cstdio>
#include <set>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/io_util.hpp"
#include "core/text.hpp"

namespace spanqa {

using ordered_json = nlohmann::ordered_json;

bool match_gold(const std::string& prediction, const std::vector<std::string>& golds) {
  if (golds.empty()) throw argument_error("match_gold: empty gold list");
  std::string p = normalize_answer(prediction);
  for (const auto& g : golds) {
    if (p == normalize_answer(g)) return true;
  }
  return false;
}

MetricsReport compute_metrics(const std::vector<AnswerList>& lists,
                              const std::map<std::string, std::vector<std::string>>& gold) {
  MetricsReport r;
  std::set<std::string> predicted;
  std::map<std::string, std::optional<int>> ranks;

  for (const auto& list : lists) {
    auto git = gold.find(list.question_id);
    if (git == gold.end())
      throw argument_error("compute_metrics: prediction for unknown question id '" +
                           list.question_id + "'");
    if (!predicted.insert(list.question_id).second)
      throw argument_error("compute_metrics: duplicate prediction for question id '" +
                           list.question_id + "'");
    std::optional<int> rank;
    const size_t horizon = std::min<size_t>(list.answers.size(), 5);
    for (size_t i = 0; i < horizon; ++i) {
      if (match_gold(list.answers[i].text, git->second)) {
        rank = static_cast<int>(i) + 1;
        break;
      }
    }
    ranks[list.question_id] = rank;
  }
  // Gold questions without predictions count as wrong with null rank.
  for (const auto& [id, answers] : gold) {
    if (!ranks.count(id)) ranks[id] = std::nullopt;
  }

  r.n = ranks.size();
  double strict = 0, lenient = 0, mrr = 0;
  for (const auto& [id, rank] : ranks) {
    r.per_question.push_back({id, rank});
    if (rank) {
      if (*rank == 1) strict += 1;
      lenient += 1;
      mrr += 1.0 / *rank;
    }
  }
  if (r.n > 0) {
    strict /= static_cast<double>(r.n);
    lenient /= static_cast<double>(r.n);
    mrr /= static_cast<double>(r.n);
  }
  r.strict_acc = strict;
  r.lenient_acc = lenient;
  r.mrr = mrr;
  return r;
}

std::string metrics_to_json(const MetricsReport& r) {
  ordered_json root;
  root["n"] = r.n;
  root["strict_acc"] = r.strict_acc;
  root["lenient_acc"] = r.lenient_acc;
  root["mrr"] = r.mrr;
  ordered_json pq = ordered_json::array();
  for (const auto& q : r.per_question) {
    ordered_json j;
    j["id"] = q.id;
    if (q.rank)
      j["rank"] = *q.rank;
    else
      j["rank"] = nullptr;
    pq.push_back(std::move(j));
  }
  root["per_question"] = std::move(pq);
  return root.dump(1) + "\n";
}

void save_metrics(const MetricsReport& r, const std::string& path) {
  write_file_atomic(path, metrics_to_json(r));
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

}  // namespace spanqa
