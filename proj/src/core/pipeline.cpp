// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/pipeline.hpp"

#include "core/errors.hpp"

namespace spanqa {

ReaderModel reader_from_checkpoint(const Checkpoint& c) {
  ReaderModel m;
  m.cfg = c.config.reader_config();
  m.vocab = c.vocab;
  m.params = c.params;
  if (!m.params.has("reader.emb"))
    throw format_error("checkpoint has no reader parameters");
  return m;
}

std::optional<SelectorModel> selector_from_checkpoint(const Checkpoint& c) {
  if (c.kind != ModelKind::kPspr) return std::nullopt;
  SelectorModel m;
  m.cfg = c.config.selector_config();
  m.vocab = c.vocab;
  m.params = c.params;
  if (!m.params.has("selector.emb"))
    throw format_error("pspr checkpoint has no selector parameters");
  return m;
}

AnswerList predict_question(const ReaderModel& reader, const SelectorModel* selector,
                            const QAExample& ex, const PredictOptions& opt) {
  const bool needs_selector = opt.strategy != kStrategyReaderOnly;
  if (opt.strategy != kStrategyReaderOnly && opt.strategy != kStrategyReaderSelector &&
      opt.strategy != kStrategyCombined)
    throw argument_error("predict: unknown strategy '" + opt.strategy + "'");
  if (needs_selector && selector == nullptr)
    throw argument_error("predict: strategy '" + opt.strategy + "' requires a selector model");
  if (opt.k < 1) throw argument_error("predict: k must be >= 1");

  AnswerList empty;
  empty.question_id = ex.id;
  empty.strategy = opt.strategy;

  if (ex.question.size() == 0) return empty;

  std::vector<const Paragraph*> usable;
  for (const auto& p : ex.paragraphs)
    if (p.text.size() > 0) usable.push_back(&p);
  if (usable.empty()) return empty;

  std::vector<int> q_ids = to_ids(reader.vocab, ex.question);
  std::vector<ParagraphCandidates> per_paragraph;
  per_paragraph.reserve(usable.size());
  for (const Paragraph* p : usable) {
    SpanScores scores = reader_score(reader.params, reader.prefix, reader.cfg, q_ids,
                                     to_ids(reader.vocab, p->text), p->id);
    ParagraphCandidates pc;
    pc.paragraph_id = p->id;
    pc.candidates = span_probabilities(scores, p->text, reader.cfg.span_window);
    per_paragraph.push_back(std::move(pc));
  }

  if (opt.strategy == kStrategyReaderOnly)
    return topk_reader_only(ex.id, per_paragraph, opt.k);

  std::vector<int> sq_ids = to_ids(selector->vocab, ex.question);
  std::vector<std::vector<int>> sp_ids;
  std::vector<std::string> pids;
  for (const Paragraph* p : usable) {
    sp_ids.push_back(to_ids(selector->vocab, p->text));
    pids.push_back(p->id);
  }
  ParagraphDistribution dist = selector_distribution(selector->params, selector->prefix,
                                                     selector->cfg, sq_ids, sp_ids, ex.id, pids);
  if (opt.strategy == kStrategyCombined) return topk_combined(ex.id, per_paragraph, dist, opt.k);
  return topk_reranked(ex.id, per_paragraph, dist, opt.k);
}

std::vector<AnswerList> predict_dataset(const ReaderModel& reader, const SelectorModel* selector,
                                        const QADataset& ds, const PredictOptions& opt) {
  std::vector<AnswerList> out;
  out.reserve(ds.examples.size());
  for (const auto& ex : ds.examples) out.push_back(predict_question(reader, selector, ex, opt));
  return out;
}

std::map<std::string, std::vector<std::string>> gold_answers(const QADataset& ds) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& ex : ds.examples) out[ex.id] = ex.answers;
  return out;
}

MetricsReport evaluate_model(const ReaderModel& reader, const SelectorModel* selector,
                             const QADataset& ds, const PredictOptions& opt) {
  return compute_metrics(predict_dataset(reader, selector, ds, opt), gold_answers(ds));
}

}  // namespace spanqa
