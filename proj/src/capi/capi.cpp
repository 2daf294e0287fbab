// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "spanqa/spanqa.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/io_util.hpp"
#include "core/pipeline.hpp"
#include "core/synth.hpp"
#include "core/train.hpp"

using nlohmann::ordered_json;

struct sq_dataset {
  spanqa::QADataset ds;
};

struct sq_model {
  spanqa::Checkpoint ckpt;
  std::string kind_str;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sq_status fail(sq_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs `fn`, translating the library's exception taxonomy onto status codes.
template <typename Fn>
sq_status guarded(Fn&& fn) {
  try {
    fn();
    return SQ_OK;
  } catch (const spanqa::format_error& e) {
    return fail(SQ_ERR_DATA, e.what());
  } catch (const spanqa::training_error& e) {
    return fail(SQ_ERR_TRAIN, e.what());
  } catch (const spanqa::argument_error& e) {
    return fail(SQ_ERR_USAGE, e.what());
  } catch (const std::exception& e) {
    return fail(SQ_ERR_TRAIN, std::string("internal error: ") + e.what());
  }
}

sq_status require_arg(bool ok, const char* msg) {
  return ok ? SQ_OK : fail(SQ_ERR_USAGE, msg);
}

spanqa::TrainConfig parse_config(const char* config_json) {
  if (config_json == nullptr || *config_json == '\0') return spanqa::TrainConfig{};
  return spanqa::TrainConfig::from_json_text(config_json);
}

spanqa::EpochCallback wrap_callback(sq_epoch_fn cb, void* user) {
  if (!cb) return {};
  return [cb, user](int epoch, double loss, const spanqa::Trainer&) {
    return cb(epoch, loss, user) != 0;
  };
}

}  // namespace

extern "C" {

const char* sq_version(void) { return "0.1.0"; }

const char* sq_last_error(void) { return g_last_error.c_str(); }

void sq_string_free(char* s) { ::free(s); }

sq_status sq_dataset_open(const char* path, const char* format, sq_dataset** out) {
  if (require_arg(path && format && out, "sq_dataset_open: null argument") != SQ_OK)
    return SQ_ERR_USAGE;
  *out = nullptr;
  return guarded([&] {
    auto ds = std::make_unique<sq_dataset>();
    ds->ds = spanqa::load_dataset(path, spanqa::parse_format(format));
    *out = ds.release();
  });
}

sq_status sq_dataset_save(const sq_dataset* ds, const char* path) {
  if (require_arg(ds && path, "sq_dataset_save: null argument") != SQ_OK) return SQ_ERR_USAGE;
  return guarded([&] { spanqa::save_dataset_native(ds->ds, path); });
}

sq_status sq_dataset_transform(const sq_dataset* ds, const char* mode, sq_dataset** out) {
  if (require_arg(ds && mode && out, "sq_dataset_transform: null argument") != SQ_OK)
    return SQ_ERR_USAGE;
  *out = nullptr;
  return guarded([&] {
    std::string m(mode);
    auto result = std::make_unique<sq_dataset>();
    if (m == "rc")
      result->ds = spanqa::transform_rc(ds->ds);
    else if (m == "openqa")
      result->ds = spanqa::transform_openqa(ds->ds);
    else
      throw spanqa::argument_error("unknown transform mode '" + m + "' (expected rc|openqa)");
    *out = result.release();
  });
}

sq_status sq_dataset_synth(const char* profile_json, uint64_t seed, const char* split,
                           sq_dataset** out) {
  if (require_arg(out, "sq_dataset_synth: null output") != SQ_OK) return SQ_ERR_USAGE;
  *out = nullptr;
  return guarded([&] {
    spanqa::SynthProfile profile;
    if (profile_json && *profile_json) {
      ordered_json j;
      try {
        j = ordered_json::parse(profile_json);
      } catch (const nlohmann::json::parse_error& e) {
        throw spanqa::argument_error(std::string("bad profile json: ") + e.what());
      }
      if (j.contains("preset")) {
        std::string preset = j["preset"].get<std::string>();
        int n = profile.num_questions;
        if (preset == "squad_like")
          profile = spanqa::SynthProfile::squad_like(n);
        else if (preset == "bioasq_like")
          profile = spanqa::SynthProfile::bioasq_like(n);
        else if (preset == "quasar_like")
          profile = spanqa::SynthProfile::quasar_like(n);
        else
          throw spanqa::argument_error("unknown synth preset '" + preset + "'");
      }
      for (const auto& [key, val] : j.items()) {
        if (key == "preset")
          continue;
        else if (key == "num_questions")
          profile.num_questions = val.get<int>();
        else if (key == "paragraphs_per_question")
          profile.paragraphs_per_question = val.get<int>();
        else if (key == "distractor_rate")
          profile.distractor_rate = val.get<double>();
        else if (key == "vocab_size")
          profile.vocab_size = val.get<int>();
        else
          throw spanqa::argument_error("unknown profile field '" + key + "'");
      }
    }
    auto result = std::make_unique<sq_dataset>();
    result->ds = spanqa::synth_generate(seed, profile, split && *split ? split : "train");
    *out = result.release();
  });
}

long long sq_dataset_num_questions(const sq_dataset* ds) {
  return ds ? static_cast<long long>(ds->ds.num_questions()) : -1;
}

long long sq_dataset_num_paragraphs(const sq_dataset* ds) {
  return ds ? static_cast<long long>(ds->ds.num_paragraphs()) : -1;
}

sq_status sq_dataset_summary_json(const sq_dataset* ds, char** out_json) {
  if (require_arg(ds && out_json, "sq_dataset_summary_json: null argument") != SQ_OK)
    return SQ_ERR_USAGE;
  *out_json = nullptr;
  return guarded([&] {
    size_t pos = 0, neg = 0, unl = 0, spanned = 0;
    for (const auto& ex : ds->ds.examples) {
      for (const auto& p : ex.paragraphs) {
        switch (p.relevant) {
          case spanqa::Relevance::kPositive: ++pos; break;
          case spanqa::Relevance::kNegative: ++neg; break;
          case spanqa::Relevance::kUnlabeled: ++unl; break;
        }
        if (!p.spans.empty()) ++spanned;
      }
    }
    ordered_json j;
    j["split"] = ds->ds.split;
    j["provenance"] = ds->ds.provenance;
    j["questions"] = ds->ds.num_questions();
    j["paragraphs"] = ds->ds.num_paragraphs();
    j["positive_paragraphs"] = pos;
    j["negative_paragraphs"] = neg;
    j["unlabeled_paragraphs"] = unl;
    j["paragraphs_with_spans"] = spanned;
    *out_json = dup_string(j.dump());
  });
}

void sq_dataset_close(sq_dataset* ds) { delete ds; }

sq_status sq_model_open(const char* path, sq_model** out) {
  if (require_arg(path && out, "sq_model_open: null argument") != SQ_OK) return SQ_ERR_USAGE;
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<sq_model>();
    m->ckpt = spanqa::load_checkpoint(path);
    m->kind_str = spanqa::kind_name(m->ckpt.kind);
    *out = m.release();
  });
}

sq_status sq_model_save(const sq_model* m, const char* path) {
  if (require_arg(m && path, "sq_model_save: null argument") != SQ_OK) return SQ_ERR_USAGE;
  return guarded([&] { spanqa::save_checkpoint(m->ckpt, path); });
}

const char* sq_model_kind(const sq_model* m) { return m ? m->kind_str.c_str() : nullptr; }

sq_status sq_model_inspect_json(const sq_model* m, char** out_json) {
  if (require_arg(m && out_json, "sq_model_inspect_json: null argument") != SQ_OK)
    return SQ_ERR_USAGE;
  *out_json = nullptr;
  return guarded([&] {
    ordered_json j;
    j["version"] = spanqa::Checkpoint::kVersion;
    j["kind"] = m->kind_str;
    j["config"] = ordered_json::parse(m->ckpt.config.to_json_text());
    ordered_json prov;
    prov["pretrain_dataset"] = m->ckpt.provenance.pretrain_dataset;
    if (m->ckpt.provenance.finetune_dataset.empty())
      prov["finetune_dataset"] = nullptr;
    else
      prov["finetune_dataset"] = m->ckpt.provenance.finetune_dataset;
    prov["steps"] = m->ckpt.provenance.steps;
    prov["seed"] = m->ckpt.provenance.seed;
    j["provenance"] = std::move(prov);
    j["vocab_size"] = m->ckpt.vocab.size();
    ordered_json tensors = ordered_json::array();
    for (const auto& [name, t] : m->ckpt.params.tensors) {
      ordered_json tj;
      tj["name"] = name;
      tj["shape"] = t.shape;
      tensors.push_back(std::move(tj));
    }
    j["tensors"] = std::move(tensors);
    j["total_params"] = m->ckpt.params.total_elements();
    *out_json = dup_string(j.dump(1));
  });
}

void sq_model_close(sq_model* m) { delete m; }

sq_status sq_pretrain(const sq_dataset* ds, const char* config_json, sq_epoch_fn cb, void* user,
                      sq_model** out) {
  if (require_arg(ds && out, "sq_pretrain: null argument") != SQ_OK) return SQ_ERR_USAGE;
  *out = nullptr;
  return guarded([&] {
    spanqa::TrainConfig cfg = parse_config(config_json);
    auto m = std::make_unique<sq_model>();
    m->ckpt = spanqa::pretrain(ds->ds, cfg, wrap_callback(cb, user));
    m->kind_str = spanqa::kind_name(m->ckpt.kind);
    *out = m.release();
  });
}

sq_status sq_finetune(const sq_model* base, const sq_dataset* ds, const char* config_json,
                      sq_epoch_fn cb, void* user, sq_model** out) {
  if (require_arg(base && ds && out, "sq_finetune: null argument") != SQ_OK) return SQ_ERR_USAGE;
  *out = nullptr;
  return guarded([&] {
    spanqa::TrainConfig cfg = parse_config(config_json);
    auto m = std::make_unique<sq_model>();
    m->ckpt = spanqa::finetune(base->ckpt, ds->ds, cfg, wrap_callback(cb, user));
    m->kind_str = spanqa::kind_name(m->ckpt.kind);
    *out = m.release();
  });
}

sq_status sq_predict(const sq_model* reader, const sq_model* selector_or_null,
                     const sq_dataset* ds, const char* strategy, int k, const char* out_path,
                     char** summary_json) {
  if (require_arg(reader && ds && strategy && out_path, "sq_predict: null argument") != SQ_OK)
    return SQ_ERR_USAGE;
  if (summary_json) *summary_json = nullptr;
  return guarded([&] {
    spanqa::PredictOptions opt;
    opt.strategy = strategy;
    opt.k = k;

    spanqa::ReaderModel rm = spanqa::reader_from_checkpoint(reader->ckpt);
    std::optional<spanqa::SelectorModel> sel;
    if (selector_or_null != nullptr) {
      sel = spanqa::selector_from_checkpoint(selector_or_null->ckpt);
      if (!sel)
        throw spanqa::argument_error(
            "sq_predict: selector checkpoint has kind 'reader'; a pspr checkpoint is required");
    } else {
      sel = spanqa::selector_from_checkpoint(reader->ckpt);
    }
    if (opt.strategy != spanqa::kStrategyReaderOnly && !sel)
      throw spanqa::argument_error("sq_predict: strategy '" + opt.strategy +
                                   "' requires a selector checkpoint");

    auto lists =
        spanqa::predict_dataset(rm, sel ? &*sel : nullptr, ds->ds, opt);
    spanqa::save_predictions(lists, opt.strategy, out_path);
    if (summary_json) {
      ordered_json j;
      j["strategy"] = opt.strategy;
      j["questions"] = lists.size();
      j["k"] = k;
      j["out"] = out_path;
      *summary_json = dup_string(j.dump());
    }
  });
}

sq_status sq_evaluate(const char* predictions_path, const sq_dataset* gold, const char* out_path,
                      char** summary_json) {
  if (require_arg(predictions_path && gold, "sq_evaluate: null argument") != SQ_OK)
    return SQ_ERR_USAGE;
  if (summary_json) *summary_json = nullptr;
  return guarded([&] {
    auto lists = spanqa::load_predictions(predictions_path);
    spanqa::MetricsReport report =
        spanqa::compute_metrics(lists, spanqa::gold_answers(gold->ds));
    if (out_path && *out_path) spanqa::save_metrics(report, out_path);
    if (summary_json) {
      ordered_json j;
      j["n"] = report.n;
      j["strict_acc"] = report.strict_acc;
      j["lenient_acc"] = report.lenient_acc;
      j["mrr"] = report.mrr;
      *summary_json = dup_string(j.dump());
    }
  });
}

sq_status sq_file_digest(const char* path, char** out_hex) {
  if (require_arg(path && out_hex, "sq_file_digest: null argument") != SQ_OK) return SQ_ERR_USAGE;
  *out_hex = nullptr;
  return guarded([&] { *out_hex = dup_string(spanqa::sha256_file_hex(path)); });
}

}  // extern "C"
