// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/ranking.hpp"

namespace spanqa {

struct QuestionRecord {
  std::string id;
  std::optional<int> rank;  // 1-based rank of first correct answer in top 5
};

struct MetricsReport {
  size_t n = 0;
  double strict_acc = 0;   // rank-1 correct
  double lenient_acc = 0;  // any correct in top 5
  double mrr = 0;          // mean 1/rank, 0 when absent
  std::vector<QuestionRecord> per_question;
};

// True iff the prediction normalizes to any gold synonym.
bool match_gold(const std::string& prediction, const std::vector<std::string>& golds);

// Scores answer lists against gold answers. Gold questions without a
// prediction count as incorrect; predictions for unknown ids are an error.
// Only the first five answers of each list are considered.
MetricsReport compute_metrics(const std::vector<AnswerList>& lists,
                              const std::map<std::string, std::vector<std::string>>& gold);

std::string metrics_to_json(const MetricsReport& r);
void save_metrics(const MetricsReport& r, const std::string& path);

// "33.33" style percentage with two decimals, as reported in result tables.
std::string format_percent(double fraction);

}  // namespace spanqa
