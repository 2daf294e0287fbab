// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/text.hpp"

#include <cctype>

namespace spanqa {

namespace {

inline bool is_space_byte(unsigned char c) { return c < 0x80 && std::isspace(c); }

inline char lower_byte(unsigned char c) {
  return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
}

}  // namespace

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

std::string TokenizedText::surface(size_t i, size_t j) const {
  return raw.substr(tokens[i].begin, tokens[j].end - tokens[i].begin);
}

TokenizedText tokenize(const std::string& text) {
  TokenizedText out;
  out.raw = text;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    if (is_ascii_punct(c)) {
      out.tokens.push_back({std::string(1, lower_byte(c)), i, i + 1});
      ++i;
      continue;
    }
    size_t j = i;
    std::string tok;
    while (j < n) {
      unsigned char cj = static_cast<unsigned char>(text[j]);
      if (is_space_byte(cj) || is_ascii_punct(cj)) break;
      tok.push_back(lower_byte(cj));
      ++j;
    }
    out.tokens.push_back({std::move(tok), i, j});
    i = j;
  }
  return out;
}

std::string normalize_answer(const std::string& s) {
  std::string collapsed;
  collapsed.reserve(s.size());
  bool in_space = false;
  for (unsigned char c : s) {
    if (is_space_byte(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !collapsed.empty()) collapsed.push_back(' ');
    in_space = false;
    collapsed.push_back(lower_byte(c));
  }
  size_t b = 0, e = collapsed.size();
  while (b < e) {
    unsigned char c = static_cast<unsigned char>(collapsed[b]);
    if (c == ' ' || is_ascii_punct(c))
      ++b;
    else
      break;
  }
  while (e > b) {
    unsigned char c = static_cast<unsigned char>(collapsed[e - 1]);
    if (c == ' ' || is_ascii_punct(c))
      --e;
    else
      break;
  }
  return collapsed.substr(b, e - b);
}

}  // namespace spanqa
