// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <string>

#include "core/dataset.hpp"

namespace spanqa {

// Shape of a generated corpus. The three stock profiles mirror the regimes
// the pipeline is exercised in: a single always-relevant paragraph, a few
// mixed paragraphs, and many mostly-irrelevant passages.
struct SynthProfile {
  int num_questions = 100;
  int paragraphs_per_question = 1;
  double distractor_rate = 0.0;  // probability a paragraph carries no answer
  int vocab_size = 200;          // content words (subjects + entities)

  static SynthProfile squad_like(int n);
  static SynthProfile bioasq_like(int n);
  static SynthProfile quasar_like(int n);
};

// Deterministic factoid corpus: templated single-fact questions whose
// answers are planted verbatim in answer-bearing paragraphs. Distractor
// paragraphs reuse the question's subject or relation but never contain the
// answer string. The content vocabulary is a function of `seed` alone, so
// different splits of the same seed share one world while drawing disjoint
// questions. Emits both relevance labels and token spans.
QADataset synth_generate(uint64_t seed, const SynthProfile& profile,
                         const std::string& split = "train");

}  // namespace spanqa
