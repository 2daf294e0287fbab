// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace spanqa {

using ordered_json = nlohmann::ordered_json;

size_t QADataset::num_paragraphs() const {
  size_t n = 0;
  for (const auto& ex : examples) n += ex.paragraphs.size();
  return n;
}

DataFormat parse_format(const std::string& s) {
  if (s == "native") return DataFormat::kNative;
  if (s == "squad_v1") return DataFormat::kSquadV1;
  if (s == "bioasq_factoid") return DataFormat::kBioasqFactoid;
  if (s == "quasar_t") return DataFormat::kQuasarT;
  throw argument_error("unknown dataset format '" + s +
                       "' (expected native|squad_v1|bioasq_factoid|quasar_t)");
}

std::string format_name(DataFormat f) {
  switch (f) {
    case DataFormat::kNative: return "native";
    case DataFormat::kSquadV1: return "squad_v1";
    case DataFormat::kBioasqFactoid: return "bioasq_factoid";
    case DataFormat::kQuasarT: return "quasar_t";
  }
  return "?";
}

std::vector<std::pair<int, int>> find_answer_spans(const TokenizedText& paragraph,
                                                   const std::string& answer) {
  if (answer.empty()) throw argument_error("find_answer_spans: empty answer");
  const std::string target = normalize_answer(answer);
  std::vector<std::pair<int, int>> hits;
  if (target.empty()) return hits;

  const int n = static_cast<int>(paragraph.size());
  // Window growth stops once the normalized surface cannot shrink back to
  // the target length; interior characters are never stripped.
  const size_t cap = target.size() + 2;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::string norm = normalize_answer(paragraph.surface(static_cast<size_t>(i),
                                                            static_cast<size_t>(j)));
      if (norm == target) {
        hits.emplace_back(i, j);
        break;  // longer windows from i are supersets of this match
      }
      if (norm.size() > cap) break;
    }
  }
  // Keep only innermost matches: drop any span strictly containing another.
  std::vector<std::pair<int, int>> out;
  for (const auto& s : hits) {
    bool contains_other = false;
    for (const auto& t : hits) {
      if (s == t) continue;
      if (s.first <= t.first && t.second <= s.second) {
        contains_other = true;
        break;
      }
    }
    if (!contains_other) out.push_back(s);
  }
  return out;
}

namespace {

void annotate_spans(QAExample& ex) {
  for (auto& p : ex.paragraphs) {
    std::set<std::pair<int, int>> spans;
    for (const auto& a : ex.answers) {
      if (a.empty()) continue;
      for (const auto& s : find_answer_spans(p.text, a)) spans.insert(s);
    }
    p.spans.assign(spans.begin(), spans.end());
  }
}

}  // namespace

QADataset transform_rc(const QADataset& ds) {
  QADataset out;
  out.split = ds.split;
  out.provenance = ds.provenance + " | rc";
  for (const auto& ex : ds.examples) {
    QAExample e = ex;
    annotate_spans(e);
    std::vector<Paragraph> kept;
    for (auto& p : e.paragraphs) {
      if (!p.spans.empty()) {
        p.relevant = Relevance::kPositive;
        kept.push_back(std::move(p));
      }
    }
    e.paragraphs = std::move(kept);
    if (!e.paragraphs.empty()) out.examples.push_back(std::move(e));
  }
  return out;
}

QADataset transform_openqa(const QADataset& ds) {
  QADataset out;
  out.split = ds.split;
  out.provenance = ds.provenance + " | openqa";
  for (const auto& ex : ds.examples) {
    QAExample e = ex;
    annotate_spans(e);
    for (auto& p : e.paragraphs)
      p.relevant = p.spans.empty() ? Relevance::kNegative : Relevance::kPositive;
    out.examples.push_back(std::move(e));
  }
  return out;
}

namespace {

ordered_json dataset_json(const QADataset& ds) {
  ordered_json root;
  root["version"] = 1;
  root["split"] = ds.split;
  root["provenance"] = ds.provenance;
  ordered_json questions = ordered_json::array();
  for (const auto& ex : ds.examples) {
    ordered_json q;
    q["id"] = ex.id;
    q["question"] = ex.question.raw;
    q["answers"] = ex.answers;
    ordered_json paras = ordered_json::array();
    for (const auto& p : ex.paragraphs) {
      ordered_json pj;
      pj["id"] = p.id;
      pj["text"] = p.text.raw;
      if (p.relevant == Relevance::kUnlabeled)
        pj["relevant"] = nullptr;
      else
        pj["relevant"] = static_cast<int>(p.relevant);
      ordered_json spans = ordered_json::array();
      for (const auto& s : p.spans) {
        ordered_json sj;
        sj["start_token"] = s.first;
        sj["end_token"] = s.second;
        spans.push_back(std::move(sj));
      }
      pj["spans"] = std::move(spans);
      paras.push_back(std::move(pj));
    }
    q["paragraphs"] = std::move(paras);
    questions.push_back(std::move(q));
  }
  root["questions"] = std::move(questions);
  return root;
}

// Wraps json exceptions into format_error that names the file and byte
// position where parsing stopped.
ordered_json parse_json(const std::string& text, const std::string& path) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error("parse error in " + path + " at byte " + std::to_string(e.byte) + ": " +
                       e.what());
  }
}

std::string require_string(const ordered_json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_string())
    throw format_error(path + ": missing or non-string field '" + std::string(key) + "'");
  return j[key].get<std::string>();
}

QADataset load_native(const std::string& text, const std::string& path) {
  ordered_json root = parse_json(text, path);
  if (!root.is_object()) throw format_error(path + ": expected a JSON object at top level");
  if (!root.contains("version") || !root["version"].is_number_integer())
    throw format_error(path + ": missing integer 'version'");
  int version = root["version"].get<int>();
  if (version != 1)
    throw format_error(path + ": unsupported native dataset version " + std::to_string(version));
  QADataset ds;
  ds.split = require_string(root, "split", path);
  ds.provenance = require_string(root, "provenance", path);
  if (!root.contains("questions") || !root["questions"].is_array())
    throw format_error(path + ": missing 'questions' array");
  std::set<std::string> seen_ids;
  for (const auto& q : root["questions"]) {
    QAExample ex;
    ex.id = require_string(q, "id", path);
    if (!seen_ids.insert(ex.id).second)
      throw format_error(path + ": duplicate question id '" + ex.id + "'");
    ex.question = tokenize(require_string(q, "question", path));
    if (!q.contains("answers") || !q["answers"].is_array())
      throw format_error(path + ": question '" + ex.id + "' missing 'answers'");
    for (const auto& a : q["answers"]) {
      if (!a.is_string()) throw format_error(path + ": non-string answer in '" + ex.id + "'");
      ex.answers.push_back(a.get<std::string>());
    }
    if (!q.contains("paragraphs") || !q["paragraphs"].is_array())
      throw format_error(path + ": question '" + ex.id + "' missing 'paragraphs'");
    for (const auto& pj : q["paragraphs"]) {
      Paragraph p;
      p.id = require_string(pj, "id", path);
      p.text = tokenize(require_string(pj, "text", path));
      if (pj.contains("relevant") && !pj["relevant"].is_null()) {
        int r = pj["relevant"].get<int>();
        if (r != 0 && r != 1)
          throw format_error(path + ": paragraph '" + p.id + "' relevance must be 0, 1 or null");
        p.relevant = static_cast<Relevance>(r);
      }
      if (pj.contains("spans")) {
        for (const auto& sj : pj["spans"]) {
          if (!sj.contains("start_token") || !sj.contains("end_token"))
            throw format_error(path + ": span in paragraph '" + p.id + "' missing token fields");
          int s = sj["start_token"].get<int>();
          int e = sj["end_token"].get<int>();
          if (s < 0 || e < s || static_cast<size_t>(e) >= p.text.size())
            throw format_error(path + ": span [" + std::to_string(s) + "," + std::to_string(e) +
                               "] out of range in paragraph '" + p.id + "'");
          p.spans.emplace_back(s, e);
        }
      }
      ex.paragraphs.push_back(std::move(p));
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

QADataset load_squad_v1(const std::string& text, const std::string& path) {
  ordered_json root = parse_json(text, path);
  if (!root.contains("data") || !root["data"].is_array())
    throw format_error(path + ": squad file missing 'data' array");
  QADataset ds;
  ds.split = "squad";
  ds.provenance = "squad_v1:" + path;
  std::set<std::string> seen_ids;
  size_t para_counter = 0;
  for (const auto& article : root["data"]) {
    if (!article.contains("paragraphs") || !article["paragraphs"].is_array())
      throw format_error(path + ": article missing 'paragraphs'");
    for (const auto& pj : article["paragraphs"]) {
      std::string context = require_string(pj, "context", path);
      std::string para_id = "p" + std::to_string(para_counter++);
      if (!pj.contains("qas") || !pj["qas"].is_array())
        throw format_error(path + ": paragraph missing 'qas'");
      for (const auto& qa : pj["qas"]) {
        QAExample ex;
        ex.id = require_string(qa, "id", path);
        if (!seen_ids.insert(ex.id).second)
          throw format_error(path + ": duplicate question id '" + ex.id + "'");
        ex.question = tokenize(require_string(qa, "question", path));
        if (!qa.contains("answers") || !qa["answers"].is_array())
          throw format_error(path + ": question '" + ex.id + "' missing 'answers'");
        std::vector<std::string> answers;
        for (const auto& a : qa["answers"]) {
          std::string t = require_string(a, "text", path);
          if (std::find(answers.begin(), answers.end(), t) == answers.end())
            answers.push_back(t);
        }
        ex.answers = std::move(answers);
        Paragraph p;
        p.id = para_id;
        p.text = tokenize(context);
        ex.paragraphs.push_back(std::move(p));
        ds.examples.push_back(std::move(ex));
      }
    }
  }
  return ds;
}

QADataset load_bioasq(const std::string& text, const std::string& path) {
  ordered_json root = parse_json(text, path);
  if (!root.contains("questions") || !root["questions"].is_array())
    throw format_error(path + ": bioasq file missing 'questions' array");
  QADataset ds;
  ds.split = "bioasq";
  ds.provenance = "bioasq_factoid:" + path;
  std::set<std::string> seen_ids;
  for (const auto& q : root["questions"]) {
    std::string type = q.contains("type") && q["type"].is_string() ? q["type"].get<std::string>()
                                                                   : std::string();
    if (type != "factoid") continue;
    QAExample ex;
    ex.id = require_string(q, "id", path);
    if (!seen_ids.insert(ex.id).second)
      throw format_error(path + ": duplicate question id '" + ex.id + "'");
    ex.question = tokenize(require_string(q, "body", path));
    if (!q.contains("exact_answer"))
      throw format_error(path + ": factoid question '" + ex.id + "' missing 'exact_answer'");
    // exact_answer is a list of synonyms, or a list of such lists.
    const auto& ea = q["exact_answer"];
    auto push_answer = [&](const ordered_json& a) {
      if (!a.is_string())
        throw format_error(path + ": non-string exact_answer entry in '" + ex.id + "'");
      std::string s = a.get<std::string>();
      if (std::find(ex.answers.begin(), ex.answers.end(), s) == ex.answers.end())
        ex.answers.push_back(s);
    };
    if (ea.is_string()) {
      push_answer(ea);
    } else if (ea.is_array()) {
      for (const auto& item : ea) {
        if (item.is_array())
          for (const auto& inner : item) push_answer(inner);
        else
          push_answer(item);
      }
    } else {
      throw format_error(path + ": malformed exact_answer in '" + ex.id + "'");
    }
    size_t snip = 0;
    if (q.contains("snippets") && q["snippets"].is_array()) {
      for (const auto& sj : q["snippets"]) {
        Paragraph p;
        p.id = ex.id + ":s" + std::to_string(snip++);
        p.text = tokenize(require_string(sj, "text", path));
        ex.paragraphs.push_back(std::move(p));
      }
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

// QUASAR-T adapter: JSON-lines, one question per line with its retrieved
// passages inlined: {"uid", "question", "answer", "contexts":[[score, text], ...]}.
QADataset load_quasar(const std::string& text, const std::string& path) {
  QADataset ds;
  ds.split = "quasar";
  ds.provenance = "quasar_t:" + path;
  std::set<std::string> seen_ids;
  size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    size_t line_start = pos;
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw format_error("parse error in " + path + " at byte " +
                         std::to_string(line_start + e.byte) + " (line " +
                         std::to_string(line_no) + "): " + e.what());
    }
    QAExample ex;
    ex.id = require_string(j, "uid", path);
    if (!seen_ids.insert(ex.id).second)
      throw format_error(path + ": duplicate question uid '" + ex.id + "'");
    ex.question = tokenize(require_string(j, "question", path));
    ex.answers.push_back(require_string(j, "answer", path));
    if (!j.contains("contexts") || !j["contexts"].is_array())
      throw format_error(path + ": question '" + ex.id + "' missing 'contexts'");
    size_t ci = 0;
    for (const auto& ctx : j["contexts"]) {
      std::string ctext;
      if (ctx.is_array() && ctx.size() == 2 && ctx[1].is_string())
        ctext = ctx[1].get<std::string>();
      else if (ctx.is_string())
        ctext = ctx.get<std::string>();
      else
        throw format_error(path + ": malformed context in '" + ex.id + "'");
      Paragraph p;
      p.id = ex.id + ":c" + std::to_string(ci++);
      p.text = tokenize(ctext);
      ex.paragraphs.push_back(std::move(p));
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace

QADataset load_dataset(const std::string& path, DataFormat format) {
  std::string text = read_file(path);
  switch (format) {
    case DataFormat::kNative: return load_native(text, path);
    case DataFormat::kSquadV1: return load_squad_v1(text, path);
    case DataFormat::kBioasqFactoid: return load_bioasq(text, path);
    case DataFormat::kQuasarT: return load_quasar(text, path);
  }
  throw argument_error("load_dataset: bad format");
}

std::string dataset_to_native_json(const QADataset& ds) { return dataset_json(ds).dump(1) + "\n"; }

void save_dataset_native(const QADataset& ds, const std::string& path) {
  write_file_atomic(path, dataset_to_native_json(ds));
}

Vocab Vocab::empty() { return from_tokens({"<pad>", "<unk>"}); }

Vocab Vocab::from_tokens(std::vector<std::string> toks) {
  Vocab v;
  v.tokens = std::move(toks);
  if (v.tokens.size() < 2 || v.tokens[0] != "<pad>" || v.tokens[1] != "<unk>")
    throw format_error("vocab must start with <pad>, <unk>");
  for (size_t i = 0; i < v.tokens.size(); ++i) {
    if (!v.index.emplace(v.tokens[i], static_cast<int>(i)).second)
      throw format_error("vocab: duplicate token '" + v.tokens[i] + "'");
  }
  return v;
}

Vocab Vocab::build(const std::vector<const QADataset*>& datasets, int min_count) {
  if (min_count < 1) throw argument_error("build_vocab: min_count must be >= 1");
  std::map<std::string, size_t> freq;
  for (const QADataset* ds : datasets) {
    for (const auto& ex : ds->examples) {
      for (const auto& t : ex.question.tokens) ++freq[t.text];
      for (const auto& p : ex.paragraphs)
        for (const auto& t : p.text.tokens) ++freq[t.text];
    }
  }
  std::vector<std::pair<std::string, size_t>> items(freq.begin(), freq.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> toks = {"<pad>", "<unk>"};
  for (const auto& [tok, count] : items) {
    if (count >= static_cast<size_t>(min_count)) toks.push_back(tok);
  }
  return from_tokens(std::move(toks));
}

int Vocab::id(const std::string& tok) const {
  auto it = index.find(tok);
  return it == index.end() ? kUnk : it->second;
}

std::vector<int> to_ids(const Vocab& v, const TokenizedText& t) {
  std::vector<int> out;
  out.reserve(t.size());
  for (const auto& tok : t.tokens) out.push_back(v.id(tok.text));
  return out;
}

}  // namespace spanqa
