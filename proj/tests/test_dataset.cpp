// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/io_util.hpp"
#include "test_util.hpp"

using namespace spanqa;

namespace {

std::string fixture(const std::string& name) {
  const char* dir = std::getenv("SPANQA_FIXTURES");
  REQUIRE_MESSAGE(dir != nullptr, "SPANQA_FIXTURES not set");
  return std::string(dir) + "/" + name;
}

// The worked two-paragraph ethosuximide question: P1 carries the exact
// answer string, P2 mentions the drug and channel family without it.
QADataset ethosuximide_example() {
  QADataset ds;
  ds.split = "dev";
  ds.provenance = "inline";
  QAExample ex;
  ex.id = "q-etho";
  ex.question = tokenize("Which calcium channels are targeted by ethosuximide?");
  ex.answers = {"T-type calcium channels"};
  Paragraph p1;
  p1.id = "p1";
  p1.text = tokenize("Studies report that neuropathic pain is reduced by ethosuximide, a drug "
                     "known to block T-type calcium channels, in animal models.");
  Paragraph p2;
  p2.id = "p2";
  p2.text = tokenize("Theta rhythms stayed abnormal during withdrawal but recovered after "
                     "treatment with the T-type channel blocker ethosuximide.");
  ex.paragraphs = {p1, p2};
  ds.examples.push_back(ex);
  return ds;
}

}  // namespace

TEST_CASE("find_answer_spans locates the exact-match paragraph only") {
  QADataset ds = ethosuximide_example();
  const auto& ex = ds.examples[0];
  auto spans1 = find_answer_spans(ex.paragraphs[0].text, "T-type calcium channels");
  REQUIRE(spans1.size() == 1);
  auto [s, e] = spans1[0];
  CHECK(normalize_answer(ex.paragraphs[0].text.surface(static_cast<size_t>(s),
                                                       static_cast<size_t>(e))) ==
        "t-type calcium channels");
  CHECK(find_answer_spans(ex.paragraphs[1].text, "T-type calcium channels").empty());
}

TEST_CASE("find_answer_spans finds repeated occurrences") {
  TokenizedText t = tokenize("x y x y");
  auto spans = find_answer_spans(t, "x y");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == std::pair<int, int>(0, 1));
  CHECK(spans[1] == std::pair<int, int>(2, 3));
}

TEST_CASE("find_answer_spans is punctuation-insensitive at the edges") {
  TokenizedText t = tokenize("it binds (T-type channels), strongly");
  auto spans = find_answer_spans(t, "t-type channels");
  REQUIRE(spans.size() == 1);
  CHECK(t.surface(static_cast<size_t>(spans[0].first), static_cast<size_t>(spans[0].second)) ==
        "T-type channels");
}

TEST_CASE("find_answer_spans rejects empty answers") {
  TokenizedText t = tokenize("a b c");
  CHECK_THROWS_AS(find_answer_spans(t, ""), argument_error);
  CHECK(find_answer_spans(t, "...").empty());  // normalizes to nothing
}

TEST_CASE("transform_rc keeps only answer-bearing paragraphs") {
  QADataset rc = transform_rc(ethosuximide_example());
  REQUIRE(rc.examples.size() == 1);
  REQUIRE(rc.examples[0].paragraphs.size() == 1);
  CHECK(rc.examples[0].paragraphs[0].id == "p1");
  CHECK(rc.examples[0].paragraphs[0].relevant == Relevance::kPositive);
  CHECK_FALSE(rc.examples[0].paragraphs[0].spans.empty());
}

TEST_CASE("transform_rc drops questions whose answer appears nowhere") {
  QADataset ds = ethosuximide_example();
  ds.examples[0].answers = {"completely absent phrase"};
  QADataset rc = transform_rc(ds);
  CHECK(rc.examples.empty());
}

TEST_CASE("transform_rc is a fixed point on answer-bearing data") {
  QADataset once = transform_rc(ethosuximide_example());
  QADataset twice = transform_rc(once);
  CHECK(twice.num_questions() == once.num_questions());
  CHECK(twice.num_paragraphs() == once.num_paragraphs());
}

TEST_CASE("transform_openqa labels both paragraphs and keeps them") {
  QADataset oq = transform_openqa(ethosuximide_example());
  REQUIRE(oq.examples.size() == 1);
  REQUIRE(oq.examples[0].paragraphs.size() == 2);
  CHECK(oq.examples[0].paragraphs[0].relevant == Relevance::kPositive);
  CHECK(oq.examples[0].paragraphs[1].relevant == Relevance::kNegative);
}

TEST_CASE("transform_openqa retains all-negative questions") {
  QADataset ds = ethosuximide_example();
  ds.examples[0].answers = {"completely absent phrase"};
  QADataset oq = transform_openqa(ds);
  REQUIRE(oq.examples.size() == 1);
  for (const auto& p : oq.examples[0].paragraphs) CHECK(p.relevant == Relevance::kNegative);
}

TEST_CASE("rc paragraphs are exactly the openqa-positive paragraphs") {
  QADataset base = ethosuximide_example();
  QADataset rc = transform_rc(base);
  QADataset oq = transform_openqa(base);
  size_t oq_positive = 0;
  for (const auto& ex : oq.examples)
    for (const auto& p : ex.paragraphs)
      if (p.relevant == Relevance::kPositive) ++oq_positive;
  CHECK(rc.num_paragraphs() == oq_positive);
}

TEST_CASE("label agrees with span search on random synthetic-ish data") {
  Rng rng(1234);
  std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "eps"};
  for (int trial = 0; trial < 100; ++trial) {
    QADataset ds;
    ds.split = "t";
    ds.provenance = "t";
    QAExample ex;
    ex.id = "q";
    ex.question = tokenize("what is it ?");
    std::string answer = words[rng.next_below(words.size())];
    ex.answers = {answer};
    for (int pi = 0; pi < 4; ++pi) {
      Paragraph p;
      p.id = "p" + std::to_string(pi);
      std::string text;
      size_t len = 1 + rng.next_below(8);
      for (size_t i = 0; i < len; ++i) {
        if (i) text += " ";
        text += words[rng.next_below(words.size())];
      }
      p.text = tokenize(text);
      ex.paragraphs.push_back(p);
    }
    ds.examples.push_back(ex);
    QADataset oq = transform_openqa(ds);
    for (const auto& p : oq.examples[0].paragraphs) {
      bool has = !find_answer_spans(p.text, answer).empty();
      CHECK((p.relevant == Relevance::kPositive) == has);
    }
  }
}

TEST_CASE("vocab build: empty corpus keeps only pad and unk") {
  QADataset empty;
  empty.split = "e";
  empty.provenance = "e";
  Vocab v = Vocab::build({&empty}, 1);
  CHECK(v.size() == 2);
  CHECK(v.id("anything") == Vocab::kUnk);
}

TEST_CASE("vocab build honors min_count") {
  QADataset ds;
  ds.split = "t";
  ds.provenance = "t";
  QAExample ex;
  ex.id = "q";
  ex.question = tokenize("a a b");
  ds.examples.push_back(ex);
  Vocab v = Vocab::build({&ds}, 2);
  CHECK(v.contains("a"));
  CHECK_FALSE(v.contains("b"));
  CHECK(v.id("b") == Vocab::kUnk);
}

TEST_CASE("vocab assignment is deterministic") {
  QADataset ds;
  ds.split = "t";
  ds.provenance = "t";
  QAExample ex;
  ex.id = "q";
  ex.question = tokenize("c b a c b c");
  ds.examples.push_back(ex);
  Vocab v1 = Vocab::build({&ds}, 1);
  Vocab v2 = Vocab::build({&ds}, 1);
  CHECK(v1.tokens == v2.tokens);
  // frequency desc, then lexicographic
  CHECK(v1.tokens[2] == "c");
  CHECK(v1.tokens[3] == "b");
  CHECK(v1.tokens[4] == "a");
}

TEST_CASE("native save/load round trip preserves content") {
  testutil::TempDir tmp;
  QADataset ds = transform_openqa(ethosuximide_example());
  std::string path = tmp.file("ds.json");
  save_dataset_native(ds, path);
  QADataset back = load_dataset(path, DataFormat::kNative);
  CHECK(back.split == ds.split);
  CHECK(back.provenance == ds.provenance);
  REQUIRE(back.examples.size() == ds.examples.size());
  const auto &a = ds.examples[0], &b = back.examples[0];
  CHECK(a.id == b.id);
  CHECK(a.question.raw == b.question.raw);
  CHECK(a.answers == b.answers);
  REQUIRE(a.paragraphs.size() == b.paragraphs.size());
  for (size_t i = 0; i < a.paragraphs.size(); ++i) {
    CHECK(a.paragraphs[i].id == b.paragraphs[i].id);
    CHECK(a.paragraphs[i].text.raw == b.paragraphs[i].text.raw);
    CHECK(a.paragraphs[i].relevant == b.paragraphs[i].relevant);
    CHECK(a.paragraphs[i].spans == b.paragraphs[i].spans);
  }
  // save -> load -> save is byte identical
  std::string path2 = tmp.file("ds2.json");
  save_dataset_native(back, path2);
  CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("bioasq loader keeps factoid questions and synonym lists") {
  QADataset ds = load_dataset(fixture("bioasq_small.json"), DataFormat::kBioasqFactoid);
  REQUIRE(ds.examples.size() == 2);  // the yesno question is skipped
  CHECK(ds.examples[0].id == "etho-1");
  CHECK(ds.examples[0].paragraphs.size() == 2);
  CHECK(ds.examples[1].answers.size() == 2);  // flattened synonyms
}

TEST_CASE("squad loader emits one single-paragraph example per qa") {
  QADataset ds = load_dataset(fixture("squad_small.json"), DataFormat::kSquadV1);
  REQUIRE(ds.examples.size() == 3);
  for (const auto& ex : ds.examples) CHECK(ex.paragraphs.size() == 1);
  // Two questions share a context paragraph.
  CHECK(ds.examples[0].paragraphs[0].id == ds.examples[1].paragraphs[0].id);
}

TEST_CASE("quasar loader reads json lines with inline contexts") {
  QADataset ds = load_dataset(fixture("quasar_small.jsonl"), DataFormat::kQuasarT);
  REQUIRE(ds.examples.size() == 2);
  CHECK(ds.examples[0].paragraphs.size() == 3);
  CHECK(ds.examples[0].answers == std::vector<std::string>{"mitochondria"});
}

TEST_CASE("minimal native file with one question loads") {
  testutil::TempDir tmp;
  std::string path = tmp.file("mini.json");
  write_file_atomic(path,
                    R"({"version":1,"split":"t","provenance":"x","questions":[)"
                    R"({"id":"q1","question":"who ?","answers":["bob"],)"
                    R"("paragraphs":[{"id":"p1","text":"bob was here","relevant":null,"spans":[]}]}]})");
  QADataset ds = load_dataset(path, DataFormat::kNative);
  REQUIRE(ds.examples.size() == 1);
  CHECK(ds.examples[0].paragraphs[0].relevant == Relevance::kUnlabeled);
}

TEST_CASE("truncated file raises format_error with position info") {
  testutil::TempDir tmp;
  std::string path = tmp.file("broken.json");
  write_file_atomic(path, R"({"version":1,"split":"t","provenance":"x","question)");
  try {
    load_dataset(path, DataFormat::kNative);
    FAIL("expected format_error");
  } catch (const format_error& e) {
    std::string msg = e.what();
    CHECK(msg.find(path) != std::string::npos);
    CHECK(msg.find("byte") != std::string::npos);
  }
}

TEST_CASE("missing file raises format_error") {
  CHECK_THROWS_AS(load_dataset("/nonexistent/nope.json", DataFormat::kNative), format_error);
}

TEST_CASE("unknown format tag raises argument_error") {
  CHECK_THROWS_AS(parse_format("tsv"), argument_error);
}

TEST_CASE("future native version is rejected") {
  testutil::TempDir tmp;
  std::string path = tmp.file("v9.json");
  write_file_atomic(path, R"({"version":9,"split":"t","provenance":"x","questions":[]})");
  CHECK_THROWS_AS(load_dataset(path, DataFormat::kNative), format_error);
}
