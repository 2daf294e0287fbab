// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.
//
// Command-line front end. Everything goes through the shared-library C API;
// this file only parses arguments, prints summaries, and writes run
// manifests next to the outputs it produces.

#include <chrono>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spanqa/spanqa.h"

using nlohmann::ordered_json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Deleters so handles clean up on every exit path.
struct DatasetCloser {
  void operator()(sq_dataset* d) const { sq_dataset_close(d); }
};
struct ModelCloser {
  void operator()(sq_model* m) const { sq_model_close(m); }
};
using DatasetPtr = std::unique_ptr<sq_dataset, DatasetCloser>;
using ModelPtr = std::unique_ptr<sq_model, ModelCloser>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  sq_string_free(s);
  return out;
}

int fail(sq_status st) {
  std::fprintf(stderr, "error: %s\n", sq_last_error());
  return static_cast<int>(st);
}

std::string file_digest(const std::string& path) {
  char* hex = nullptr;
  if (sq_file_digest(path.c_str(), &hex) != SQ_OK) return "";
  return take_string(hex);
}

void write_manifest(const std::string& command, const ordered_json& config,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                    uint64_t seed, double duration_s) {
  if (outputs.empty()) return;
  ordered_json m;
  m["command"] = command;
  m["config"] = config;
  ordered_json in;
  for (const auto& p : inputs) in[p] = file_digest(p);
  m["inputs"] = std::move(in);
  ordered_json out = ordered_json::array();
  for (const auto& p : outputs) out.push_back(p);
  m["outputs"] = std::move(out);
  m["seed"] = seed;
  m["duration_s"] = duration_s;
  std::string path = outputs.front() + ".manifest.json";
  std::string text = m.dump(1) + "\n";
  std::string tmp = path + ".tmp";
  if (FILE* f = std::fopen(tmp.c_str(), "wb")) {
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
    std::rename(tmp.c_str(), path.c_str());
  }
}

ordered_json parse_or_empty(const std::string& text) {
  if (text.empty()) return ordered_json::object();
  return ordered_json::parse(text, nullptr, false);
}

std::string read_text_file(const std::string& path, bool& ok) {
  ok = false;
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) return "";
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, n);
  std::fclose(f);
  ok = true;
  return out;
}

// Loads the training config file and applies the --seed override.
std::string resolve_config_text(const std::string& config_path, bool seed_set, uint64_t seed,
                                std::string& err) {
  ordered_json j = ordered_json::object();
  if (!config_path.empty()) {
    bool ok = false;
    std::string text = read_text_file(config_path, ok);
    if (!ok) {
      err = "cannot read config file: " + config_path;
      return "";
    }
    j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) {
      err = "config file is not valid JSON: " + config_path;
      return "";
    }
  }
  if (seed_set) j["seed"] = seed;
  return j.dump();
}

int epoch_logger(int epoch, double loss, void*) {
  std::printf("epoch %d loss %.6f\n", epoch, loss);
  std::fflush(stdout);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spanqa: extractive question answering pipeline"};
  app.require_subcommand(1);

  // ---- transform ----
  std::string t_in, t_format = "native", t_mode, t_out;
  auto* t_cmd = app.add_subcommand("transform", "Annotate answer spans and relabel paragraphs");
  t_cmd->add_option("input", t_in, "input dataset file")->required();
  t_cmd->add_option("--format", t_format, "native|squad_v1|bioasq_factoid|quasar_t");
  t_cmd->add_option("--mode", t_mode, "rc|openqa")->required();
  t_cmd->add_option("--out", t_out, "output native dataset path")->required();

  // ---- synth ----
  std::string s_profile, s_split = "train", s_out;
  uint64_t s_seed = 0;
  std::string s_preset;
  int s_questions = -1;
  auto* s_cmd = app.add_subcommand("synth", "Generate a deterministic synthetic corpus");
  s_cmd->add_option("--profile", s_profile, "profile JSON object");
  s_cmd->add_option("--preset", s_preset, "squad_like|bioasq_like|quasar_like");
  s_cmd->add_option("--questions", s_questions, "question count override");
  s_cmd->add_option("--split", s_split, "split name (default train)");
  s_cmd->add_option("--seed", s_seed, "generator seed");
  s_cmd->add_option("--out", s_out, "output native dataset path")->required();

  // ---- pretrain ----
  std::string p_data, p_format = "native", p_config, p_out;
  uint64_t p_seed = 0;
  bool p_seed_set = false;
  auto* p_cmd = app.add_subcommand("pretrain", "Train a model from random initialization");
  p_cmd->add_option("data", p_data, "training dataset")->required();
  p_cmd->add_option("--format", p_format, "dataset format");
  p_cmd->add_option("--config", p_config, "training config JSON file");
  p_cmd->add_option("--seed", p_seed, "seed override")->each([&](const std::string&) {
    p_seed_set = true;
  });
  p_cmd->add_option("--out", p_out, "checkpoint output path")->required();

  // ---- finetune ----
  std::string f_data, f_format = "native", f_config, f_ckpt, f_out;
  uint64_t f_seed = 0;
  bool f_seed_set = false;
  auto* f_cmd = app.add_subcommand("finetune", "Continue training from a checkpoint");
  f_cmd->add_option("data", f_data, "training dataset")->required();
  f_cmd->add_option("--format", f_format, "dataset format");
  f_cmd->add_option("--config", f_config, "training config JSON file");
  f_cmd->add_option("--ckpt", f_ckpt, "input checkpoint")->required();
  f_cmd->add_option("--seed", f_seed, "seed override")->each([&](const std::string&) {
    f_seed_set = true;
  });
  f_cmd->add_option("--out", f_out, "checkpoint output path")->required();

  // ---- predict ----
  std::string pr_data, pr_format = "native", pr_ckpt, pr_selector, pr_strategy = "reader_only",
              pr_out;
  int pr_k = 5;
  auto* pr_cmd = app.add_subcommand("predict", "Write top-k answer lists for a dataset");
  pr_cmd->add_option("data", pr_data, "dataset to answer")->required();
  pr_cmd->add_option("--format", pr_format, "dataset format");
  pr_cmd->add_option("--ckpt", pr_ckpt, "reader (or pspr) checkpoint")->required();
  pr_cmd->add_option("--selector", pr_selector, "selector checkpoint (pspr kind)");
  pr_cmd->add_option("--strategy", pr_strategy, "reader_only|reader_times_selector|combined");
  pr_cmd->add_option("--k", pr_k, "answers per question (default 5)");
  pr_cmd->add_option("--out", pr_out, "prediction output path")->required();

  // ---- evaluate ----
  std::string e_pred, e_gold, e_format = "native", e_out;
  auto* e_cmd = app.add_subcommand("evaluate", "Score predictions against gold answers");
  e_cmd->add_option("predictions", e_pred, "prediction file")->required();
  e_cmd->add_option("--gold", e_gold, "gold dataset file")->required();
  e_cmd->add_option("--format", e_format, "gold dataset format");
  e_cmd->add_option("--out", e_out, "metrics report output path");

  // ---- inspect-checkpoint ----
  std::string i_ckpt;
  auto* i_cmd = app.add_subcommand("inspect-checkpoint", "Print a checkpoint header");
  i_cmd->add_option("checkpoint", i_ckpt, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  Timer timer;

  if (t_cmd->parsed()) {
    DatasetPtr in;
    sq_dataset* raw = nullptr;
    sq_status st = sq_dataset_open(t_in.c_str(), t_format.c_str(), &raw);
    if (st != SQ_OK) return fail(st);
    in.reset(raw);
    sq_dataset* transformed = nullptr;
    st = sq_dataset_transform(in.get(), t_mode.c_str(), &transformed);
    if (st != SQ_OK) return fail(st);
    DatasetPtr out(transformed);
    st = sq_dataset_save(out.get(), t_out.c_str());
    if (st != SQ_OK) return fail(st);

    char* before_json = nullptr;
    char* after_json = nullptr;
    sq_dataset_summary_json(in.get(), &before_json);
    sq_dataset_summary_json(out.get(), &after_json);
    ordered_json before = parse_or_empty(take_string(before_json));
    ordered_json after = parse_or_empty(take_string(after_json));
    std::printf("questions kept %lld/%lld\n", sq_dataset_num_questions(out.get()),
                sq_dataset_num_questions(in.get()));
    std::printf("paragraphs kept %lld/%lld\n", sq_dataset_num_paragraphs(out.get()),
                sq_dataset_num_paragraphs(in.get()));
    std::printf("paragraphs labeled positive %lld\n",
                after.value("positive_paragraphs", 0LL));
    ordered_json cfg;
    cfg["format"] = t_format;
    cfg["mode"] = t_mode;
    write_manifest("transform", cfg, {t_in}, {t_out}, 0, timer.seconds());
    return 0;
  }

  if (s_cmd->parsed()) {
    ordered_json profile = ordered_json::object();
    if (!s_profile.empty()) {
      profile = ordered_json::parse(s_profile, nullptr, false);
      if (profile.is_discarded()) {
        std::fprintf(stderr, "error: --profile is not valid JSON\n");
        return 1;
      }
    }
    if (!s_preset.empty()) profile["preset"] = s_preset;
    if (s_questions > 0) profile["num_questions"] = s_questions;
    sq_dataset* raw = nullptr;
    sq_status st = sq_dataset_synth(profile.dump().c_str(), s_seed, s_split.c_str(), &raw);
    if (st != SQ_OK) return fail(st);
    DatasetPtr ds(raw);
    st = sq_dataset_save(ds.get(), s_out.c_str());
    if (st != SQ_OK) return fail(st);
    char* summary = nullptr;
    sq_dataset_summary_json(ds.get(), &summary);
    std::printf("%s\n", take_string(summary).c_str());
    write_manifest("synth", profile, {}, {s_out}, s_seed, timer.seconds());
    return 0;
  }

  if (p_cmd->parsed() || f_cmd->parsed()) {
    const bool is_pre = p_cmd->parsed();
    const std::string data = is_pre ? p_data : f_data;
    const std::string format = is_pre ? p_format : f_format;
    const std::string config_path = is_pre ? p_config : f_config;
    const std::string out_path = is_pre ? p_out : f_out;
    const bool seed_set = is_pre ? p_seed_set : f_seed_set;
    const uint64_t seed = is_pre ? p_seed : f_seed;

    std::string err;
    std::string config_text = resolve_config_text(config_path, seed_set, seed, err);
    if (!err.empty()) {
      std::fprintf(stderr, "error: %s\n", err.c_str());
      return 2;
    }

    sq_dataset* raw = nullptr;
    sq_status st = sq_dataset_open(data.c_str(), format.c_str(), &raw);
    if (st != SQ_OK) return fail(st);
    DatasetPtr ds(raw);

    ModelPtr model;
    if (is_pre) {
      sq_model* m = nullptr;
      st = sq_pretrain(ds.get(), config_text.c_str(), epoch_logger, nullptr, &m);
      if (st != SQ_OK) return fail(st);
      model.reset(m);
    } else {
      sq_model* base = nullptr;
      st = sq_model_open(f_ckpt.c_str(), &base);
      if (st != SQ_OK) return fail(st);
      ModelPtr base_ptr(base);
      sq_model* m = nullptr;
      st = sq_finetune(base_ptr.get(), ds.get(), config_text.c_str(), epoch_logger, nullptr, &m);
      if (st != SQ_OK) return fail(st);
      model.reset(m);
    }
    st = sq_model_save(model.get(), out_path.c_str());
    if (st != SQ_OK) return fail(st);

    char* inspect = nullptr;
    sq_model_inspect_json(model.get(), &inspect);
    ordered_json header = parse_or_empty(take_string(inspect));
    ordered_json resolved = header.value("config", ordered_json::object());
    std::printf("saved %s checkpoint to %s (%lld steps)\n",
                header.value("kind", std::string("?")).c_str(), out_path.c_str(),
                header["provenance"].value("steps", 0LL));
    std::vector<std::string> inputs = {data};
    if (!config_path.empty()) inputs.push_back(config_path);
    if (!is_pre) inputs.push_back(f_ckpt);
    write_manifest(is_pre ? "pretrain" : "finetune", resolved, inputs, {out_path},
                   resolved.value("seed", 0ULL), timer.seconds());
    return 0;
  }

  if (pr_cmd->parsed()) {
    sq_dataset* raw = nullptr;
    sq_status st = sq_dataset_open(pr_data.c_str(), pr_format.c_str(), &raw);
    if (st != SQ_OK) return fail(st);
    DatasetPtr ds(raw);
    sq_model* mr = nullptr;
    st = sq_model_open(pr_ckpt.c_str(), &mr);
    if (st != SQ_OK) return fail(st);
    ModelPtr reader(mr);
    ModelPtr selector;
    if (!pr_selector.empty()) {
      sq_model* ms = nullptr;
      st = sq_model_open(pr_selector.c_str(), &ms);
      if (st != SQ_OK) return fail(st);
      selector.reset(ms);
    }
    char* summary = nullptr;
    st = sq_predict(reader.get(), selector.get(), ds.get(), pr_strategy.c_str(), pr_k,
                    pr_out.c_str(), &summary);
    if (st != SQ_OK) return fail(st);
    std::printf("%s\n", take_string(summary).c_str());
    ordered_json cfg;
    cfg["strategy"] = pr_strategy;
    cfg["k"] = pr_k;
    std::vector<std::string> inputs = {pr_data, pr_ckpt};
    if (!pr_selector.empty()) inputs.push_back(pr_selector);
    write_manifest("predict", cfg, inputs, {pr_out}, 0, timer.seconds());
    return 0;
  }

  if (e_cmd->parsed()) {
    sq_dataset* raw = nullptr;
    sq_status st = sq_dataset_open(e_gold.c_str(), e_format.c_str(), &raw);
    if (st != SQ_OK) return fail(st);
    DatasetPtr gold(raw);
    char* summary = nullptr;
    st = sq_evaluate(e_pred.c_str(), gold.get(), e_out.empty() ? nullptr : e_out.c_str(),
                     &summary);
    if (st != SQ_OK) return fail(st);
    ordered_json j = parse_or_empty(take_string(summary));
    std::printf("S.Acc %.2f  L.Acc %.2f  MRR %.2f\n", j.value("strict_acc", 0.0) * 100.0,
                j.value("lenient_acc", 0.0) * 100.0, j.value("mrr", 0.0) * 100.0);
    if (!e_out.empty()) {
      ordered_json cfg;
      cfg["gold_format"] = e_format;
      write_manifest("evaluate", cfg, {e_pred, e_gold}, {e_out}, 0, timer.seconds());
    }
    return 0;
  }

  if (i_cmd->parsed()) {
    sq_model* m = nullptr;
    sq_status st = sq_model_open(i_ckpt.c_str(), &m);
    if (st != SQ_OK) return fail(st);
    ModelPtr model(m);
    char* inspect = nullptr;
    st = sq_model_inspect_json(model.get(), &inspect);
    if (st != SQ_OK) return fail(st);
    std::printf("%s\n", take_string(inspect).c_str());
    return 0;
  }

  return 1;
}
