// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include <doctest.h>

#include "core/rng.hpp"
#include "core/text.hpp"

using namespace spanqa;

TEST_CASE("tokenize splits words and punctuation") {
  TokenizedText t = tokenize("T-type calcium channels");
  std::vector<std::string> expect = {"t", "-", "type", "calcium", "channels"};
  REQUIRE(t.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i) CHECK(t.tokens[i].text == expect[i]);
}

TEST_CASE("tokenize of empty and whitespace-only strings") {
  CHECK(tokenize("").size() == 0);
  CHECK(tokenize("   \t\n ").size() == 0);
}

TEST_CASE("token offsets point at the lowercased raw substring") {
  Rng rng(77);
  const std::string alphabet = "abC .,-XY z?'(7\xc3\xa9";
  for (int trial = 0; trial < 1000; ++trial) {
    std::string s;
    size_t len = rng.next_below(30);
    for (size_t i = 0; i < len; ++i) s.push_back(alphabet[rng.next_below(alphabet.size())]);
    TokenizedText t = tokenize(s);
    size_t prev_end = 0;
    for (const auto& tok : t.tokens) {
      CHECK(tok.begin >= prev_end);  // non-overlapping, increasing
      CHECK(tok.end > tok.begin);
      std::string raw = s.substr(tok.begin, tok.end - tok.begin);
      for (char& c : raw)
        if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(c));
      CHECK(tok.text == raw);
      prev_end = tok.end;
    }
  }
}

TEST_CASE("surface reconstructs original casing") {
  TokenizedText t = tokenize("The T-type Calcium channels");
  CHECK(t.surface(1, 5) == "T-type Calcium");
}

TEST_CASE("normalize_answer applies the stated rules") {
  CHECK(normalize_answer("T-type calcium channels") == "t-type calcium channels");
  CHECK(normalize_answer("  ion   channel. ") == "ion channel");
  CHECK(normalize_answer("...") == "");
  CHECK(normalize_answer("(foo)") == "foo");
  CHECK(normalize_answer("A\tB\nC") == "a b c");
}

TEST_CASE("normalize_answer is idempotent on random strings") {
  Rng rng(99);
  const std::string alphabet = "aB c.,!-  z;:'";
  for (int trial = 0; trial < 1000; ++trial) {
    std::string s;
    size_t len = rng.next_below(24);
    for (size_t i = 0; i < len; ++i) s.push_back(alphabet[rng.next_below(alphabet.size())]);
    std::string once = normalize_answer(s);
    CHECK(normalize_answer(once) == once);
  }
}
