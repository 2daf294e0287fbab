// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/synth.hpp"

#include <algorithm>
#include <set>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace spanqa {

namespace {

const char* const kRelations[] = {"color",  "size",  "shape",   "origin", "weight", "length",
                                  "sound",  "taste", "height",  "speed",  "texture", "age"};
constexpr size_t kNumRelations = sizeof(kRelations) / sizeof(kRelations[0]);

// Pseudo-word generator for content vocabulary: 2-3 CV syllables.
std::string make_word(Rng& rng) {
  static const char* cons = "bdfgklmnprstvz";
  static const char* vowels = "aeiou";
  size_t syllables = 2 + rng.next_below(2);
  std::string w;
  for (size_t i = 0; i < syllables; ++i) {
    w.push_back(cons[rng.next_below(14)]);
    w.push_back(vowels[rng.next_below(5)]);
  }
  return w;
}

struct World {
  std::vector<std::string> subjects;
  std::vector<std::string> entities;  // answer word pool
};

World build_world(uint64_t seed, int vocab_size) {
  World w;
  Rng rng = stream(seed, "synth.vocab");
  std::set<std::string> used;
  for (size_t i = 0; i < kNumRelations; ++i) used.insert(kRelations[i]);
  auto draw = [&]() {
    for (;;) {
      std::string word = make_word(rng);
      if (used.insert(word).second) return word;
    }
  };
  int n_subjects = vocab_size / 2;
  int n_entities = vocab_size - n_subjects;
  for (int i = 0; i < n_subjects; ++i) w.subjects.push_back(draw());
  for (int i = 0; i < n_entities; ++i) w.entities.push_back(draw());
  return w;
}

std::string fact_sentence(Rng& rng, const std::string& subj, const std::string& rel,
                          const std::string& ans) {
  switch (rng.next_below(3)) {
    case 0: return "the " + rel + " of the " + subj + " is " + ans + " .";
    case 1: return "researchers report that the " + rel + " of the " + subj + " is " + ans + " .";
    default: return "it is known that the " + subj + " has " + ans + " as its " + rel + " .";
  }
}

std::string filler_sentence(Rng& rng, const World& w) {
  const std::string& a = w.subjects[rng.next_below(w.subjects.size())];
  const std::string& b = w.subjects[rng.next_below(w.subjects.size())];
  if (rng.next_below(2) == 0) return "the " + a + " was observed near the " + b + " .";
  return "many studies discuss the " + a + " in the field .";
}

// Answer distinct from `avoid` at the word level, so it can never produce a
// token-aligned occurrence of the avoided string.
std::string draw_entity_avoiding(Rng& rng, const World& w, const std::set<std::string>& avoid,
                                 bool allow_two_words) {
  for (;;) {
    std::string e = w.entities[rng.next_below(w.entities.size())];
    if (avoid.count(e)) continue;
    if (allow_two_words && rng.next_below(2) == 0) {
      std::string e2 = w.entities[rng.next_below(w.entities.size())];
      if (avoid.count(e2) || e2 == e) continue;
      return e + " " + e2;
    }
    return e;
  }
}

std::set<std::string> words_of(const std::string& s) {
  std::set<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    size_t j = s.find(' ', i);
    if (j == std::string::npos) j = s.size();
    if (j > i) out.insert(s.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

}  // namespace

SynthProfile SynthProfile::squad_like(int n) { return {n, 1, 0.0, 600}; }
SynthProfile SynthProfile::bioasq_like(int n) { return {n, 3, 0.4, 120}; }
SynthProfile SynthProfile::quasar_like(int n) { return {n, 10, 0.7, 240}; }

QADataset synth_generate(uint64_t seed, const SynthProfile& profile, const std::string& split) {
  if (profile.num_questions <= 0 || profile.paragraphs_per_question <= 0)
    throw argument_error("synth_generate: counts must be positive");
  if (profile.distractor_rate < 0.0 || profile.distractor_rate > 1.0)
    throw argument_error("synth_generate: distractor_rate must be in [0, 1]");
  if (profile.vocab_size < 8) throw argument_error("synth_generate: vocab_size must be >= 8");

  World world = build_world(seed, profile.vocab_size);

  QADataset ds;
  ds.split = split;
  ds.provenance = "synth(seed=" + std::to_string(seed) + ",q=" +
                  std::to_string(profile.num_questions) + ",ppq=" +
                  std::to_string(profile.paragraphs_per_question) + ",dr=" +
                  std::to_string(profile.distractor_rate) + ",v=" +
                  std::to_string(profile.vocab_size) + ")";

  for (int qi = 0; qi < profile.num_questions; ++qi) {
    Rng rng = stream(seed, "synth." + split + ".q" + std::to_string(qi));

    const std::string& subj = world.subjects[rng.next_below(world.subjects.size())];
    const std::string rel = kRelations[rng.next_below(kNumRelations)];
    const std::string answer = draw_entity_avoiding(rng, world, {}, true);
    const std::set<std::string> answer_words = words_of(answer);

    QAExample ex;
    ex.id = split + "-q" + std::to_string(qi);
    ex.answers.push_back(answer);
    if (rng.next_below(2) == 0)
      ex.question = tokenize("what is the " + rel + " of the " + subj + " ?");
    else
      ex.question = tokenize("which " + rel + " does the " + subj + " have ?");

    for (int pi = 0; pi < profile.paragraphs_per_question; ++pi) {
      bool positive = rng.next_double() >= profile.distractor_rate;
      if (pi == profile.paragraphs_per_question - 1) {
        // Every question keeps at least one answer-bearing paragraph.
        bool any = positive;
        for (const auto& p : ex.paragraphs)
          if (p.relevant == Relevance::kPositive) any = true;
        if (!any) positive = true;
      }

      std::vector<std::string> sentences;
      if (positive) {
        sentences.push_back(fact_sentence(rng, subj, rel, answer));
        if (rng.next_below(5) < 3) {
          // Confounder fact forcing real subject/relation disambiguation.
          if (rng.next_below(2) == 0) {
            std::string rel2 = rel;
            while (rel2 == rel) rel2 = kRelations[rng.next_below(kNumRelations)];
            sentences.push_back(fact_sentence(
                rng, subj, rel2, draw_entity_avoiding(rng, world, answer_words, true)));
          } else {
            std::string subj2 = subj;
            while (subj2 == subj) subj2 = world.subjects[rng.next_below(world.subjects.size())];
            sentences.push_back(fact_sentence(
                rng, subj2, rel, draw_entity_avoiding(rng, world, answer_words, true)));
          }
        }
      } else {
        // Distractor: shares the subject or the relation, never the answer.
        if (rng.next_below(2) == 0) {
          std::string rel2 = rel;
          while (rel2 == rel) rel2 = kRelations[rng.next_below(kNumRelations)];
          sentences.push_back(fact_sentence(rng, subj, rel2,
                                            draw_entity_avoiding(rng, world, answer_words, true)));
        } else {
          std::string subj2 = subj;
          while (subj2 == subj) subj2 = world.subjects[rng.next_below(world.subjects.size())];
          sentences.push_back(fact_sentence(rng, subj2, rel,
                                            draw_entity_avoiding(rng, world, answer_words, true)));
        }
      }
      if (rng.next_below(5) < 3) sentences.push_back(filler_sentence(rng, world));
      rng.shuffle(sentences);

      std::string text;
      for (size_t si = 0; si < sentences.size(); ++si) {
        if (si) text += " ";
        text += sentences[si];
      }

      Paragraph p;
      p.id = ex.id + ":p" + std::to_string(pi);
      p.text = tokenize(text);
      p.spans = find_answer_spans(p.text, answer);
      p.relevant = p.spans.empty() ? Relevance::kNegative : Relevance::kPositive;
      ex.paragraphs.push_back(std::move(p));
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace spanqa
