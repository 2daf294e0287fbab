// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace spanqa {

struct Token {
  std::string text;  // lowercased surface
  size_t begin = 0;  // byte offsets into the raw text, [begin, end)
  size_t end = 0;
};

struct TokenizedText {
  std::string raw;
  std::vector<Token> tokens;

  size_t size() const { return tokens.size(); }

  // Raw surface covering tokens [i, j], original casing and spacing.
  std::string surface(size_t i, size_t j) const;
};

// Rule-based tokenizer: lowercase, split on whitespace, ASCII punctuation
// becomes single-character tokens. Bytes >= 0x80 are treated as word
// characters and left unchanged, so UTF-8 text passes through intact.
TokenizedText tokenize(const std::string& text);

// Lowercase, collapse whitespace runs to single spaces, strip leading and
// trailing whitespace and punctuation. Idempotent.
std::string normalize_answer(const std::string& s);

bool is_ascii_punct(unsigned char c);

}  // namespace spanqa
