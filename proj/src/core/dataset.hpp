// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core/text.hpp"

namespace spanqa {

// Paragraph relevance: 1 answer-bearing, 0 not, unset before labeling.
enum class Relevance : int8_t { kUnlabeled = -1, kNegative = 0, kPositive = 1 };

struct Paragraph {
  std::string id;
  TokenizedText text;
  Relevance relevant = Relevance::kUnlabeled;
  std::vector<std::pair<int, int>> spans;  // inclusive token ranges of gold answers
};

struct QAExample {
  std::string id;
  TokenizedText question;
  std::vector<std::string> answers;  // gold strings, synonyms allowed
  std::vector<Paragraph> paragraphs;
};

struct QADataset {
  std::string split;
  std::string provenance;
  std::vector<QAExample> examples;

  size_t num_questions() const { return examples.size(); }
  size_t num_paragraphs() const;
  // Stable identity used in checkpoint provenance.
  std::string identity() const { return provenance + ":" + split; }
};

enum class DataFormat { kNative, kSquadV1, kBioasqFactoid, kQuasarT };

// Parses one of: native, squad_v1, bioasq_factoid, quasar_t.
DataFormat parse_format(const std::string& s);
std::string format_name(DataFormat f);

// Every token-aligned occurrence whose normalized surface equals the
// normalized answer. Nested matches collapse to the innermost span, so
// trailing punctuation never widens an occurrence. Inclusive ranges.
std::vector<std::pair<int, int>> find_answer_spans(const TokenizedText& paragraph,
                                                   const std::string& answer);

// Annotates spans against all gold answers, then drops paragraphs without
// any span and questions without any remaining paragraph.
QADataset transform_rc(const QADataset& ds);

// Annotates spans and labels every paragraph 1/0; nothing is dropped.
QADataset transform_openqa(const QADataset& ds);

QADataset load_dataset(const std::string& path, DataFormat format);
void save_dataset_native(const QADataset& ds, const std::string& path);
std::string dataset_to_native_json(const QADataset& ds);

struct Vocab {
  // tokens[id] = surface; ids 0 and 1 are reserved for padding and unknown.
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;

  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  static Vocab empty();
  // Frequency >= min_count, ids assigned by (frequency desc, token asc).
  static Vocab build(const std::vector<const QADataset*>& datasets, int min_count);
  static Vocab from_tokens(std::vector<std::string> toks);

  int id(const std::string& tok) const;
  size_t size() const { return tokens.size(); }
  bool contains(const std::string& tok) const { return index.count(tok) > 0; }
};

std::vector<int> to_ids(const Vocab& v, const TokenizedText& t);

}  // namespace spanqa
