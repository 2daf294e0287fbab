// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/train.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/io_util.hpp"

namespace spanqa {

using ordered_json = nlohmann::ordered_json;

ModelKind parse_kind(const std::string& s) {
  if (s == "reader") return ModelKind::kReader;
  if (s == "pspr") return ModelKind::kPspr;
  throw argument_error("unknown model kind '" + s + "' (expected reader|pspr)");
}

std::string kind_name(ModelKind k) { return k == ModelKind::kReader ? "reader" : "pspr"; }

void TrainConfig::validate(bool allow_zero_epochs) const {
  if (epochs < (allow_zero_epochs ? 0 : 1))
    throw argument_error("config: epochs must be " +
                         std::string(allow_zero_epochs ? ">= 0" : ">= 1"));
  if (batch_size < 1) throw argument_error("config: batch_size must be >= 1");
  if (learning_rate <= 0) throw argument_error("config: learning_rate must be positive");
  if (hidden < 1) throw argument_error("config: hidden must be >= 1");
  if (emb_dim < 1) throw argument_error("config: emb_dim must be >= 1");
  if (layers < 1) throw argument_error("config: layers must be >= 1");
  if (eval_every < 0) throw argument_error("config: eval_every must be >= 0");
  if (min_count < 1) throw argument_error("config: min_count must be >= 1");
  if (span_window < 0) throw argument_error("config: span_window must be >= 0");
}

namespace {

ordered_json config_json(const TrainConfig& c) {
  ordered_json j;
  j["kind"] = kind_name(c.kind);
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["seed"] = c.seed;
  j["hidden"] = c.hidden;
  j["emb_dim"] = c.emb_dim;
  j["layers"] = c.layers;
  j["eval_every"] = c.eval_every;
  j["min_count"] = c.min_count;
  j["span_window"] = c.span_window;
  j["pspr_sequential"] = c.pspr_sequential;
  return j;
}

TrainConfig config_from_json(const ordered_json& j) {
  TrainConfig c;
  if (!j.is_object()) throw format_error("config: expected a JSON object");
  for (const auto& [key, val] : j.items()) {
    if (key == "kind")
      c.kind = parse_kind(val.get<std::string>());
    else if (key == "epochs")
      c.epochs = val.get<int>();
    else if (key == "batch_size")
      c.batch_size = val.get<int>();
    else if (key == "learning_rate")
      c.learning_rate = val.get<double>();
    else if (key == "seed")
      c.seed = val.get<uint64_t>();
    else if (key == "hidden")
      c.hidden = val.get<size_t>();
    else if (key == "emb_dim")
      c.emb_dim = val.get<size_t>();
    else if (key == "layers")
      c.layers = val.get<int>();
    else if (key == "eval_every")
      c.eval_every = val.get<int>();
    else if (key == "min_count")
      c.min_count = val.get<int>();
    else if (key == "span_window")
      c.span_window = val.get<int>();
    else if (key == "pspr_sequential")
      c.pspr_sequential = val.get<bool>();
    else
      throw format_error("config: unknown field '" + key + "'");
  }
  return c;
}

}  // namespace

TrainConfig TrainConfig::from_json_text(const std::string& text) {
  try {
    return config_from_json(ordered_json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error(std::string("config parse error at byte ") + std::to_string(e.byte) + ": " +
                       e.what());
  } catch (const nlohmann::json::type_error& e) {
    throw format_error(std::string("config type error: ") + e.what());
  }
}

std::string TrainConfig::to_json_text() const { return config_json(*this).dump(1) + "\n"; }

std::string checkpoint_to_json(const Checkpoint& c) {
  ordered_json root;
  root["version"] = Checkpoint::kVersion;
  root["kind"] = kind_name(c.kind);
  root["config"] = config_json(c.config);
  ordered_json prov;
  prov["pretrain_dataset"] = c.provenance.pretrain_dataset;
  if (c.provenance.finetune_dataset.empty())
    prov["finetune_dataset"] = nullptr;
  else
    prov["finetune_dataset"] = c.provenance.finetune_dataset;
  prov["steps"] = c.provenance.steps;
  prov["seed"] = c.provenance.seed;
  root["provenance"] = std::move(prov);
  root["vocab"] = c.vocab.tokens;
  ordered_json tensors = ordered_json::array();
  for (const auto& [name, t] : c.params.tensors) {
    ordered_json tj;
    tj["name"] = name;
    tj["shape"] = t.shape;
    tj["data_b64"] = doubles_to_b64(t.data);
    tensors.push_back(std::move(tj));
  }
  root["tensors"] = std::move(tensors);
  return root.dump(1) + "\n";
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  write_file_atomic(path, checkpoint_to_json(c));
}

Checkpoint load_checkpoint(const std::string& path) {
  ordered_json root;
  try {
    root = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error("checkpoint parse error in " + path + " at byte " + std::to_string(e.byte) +
                       ": " + e.what());
  }
  Checkpoint c;
  if (!root.contains("version") || !root["version"].is_number_integer())
    throw format_error(path + ": checkpoint missing integer 'version'");
  int version = root["version"].get<int>();
  if (version != Checkpoint::kVersion)
    throw format_error(path + ": checkpoint version " + std::to_string(version) +
                       " not supported (expected " + std::to_string(Checkpoint::kVersion) + ")");
  if (!root.contains("kind") || !root["kind"].is_string())
    throw format_error(path + ": checkpoint missing 'kind'");
  c.kind = parse_kind(root["kind"].get<std::string>());
  if (!root.contains("config")) throw format_error(path + ": checkpoint missing 'config'");
  try {
    c.config = config_from_json(root["config"]);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(path + ": bad config: " + e.what());
  }
  if (!root.contains("provenance") || !root["provenance"].is_object())
    throw format_error(path + ": checkpoint missing 'provenance'");
  const auto& prov = root["provenance"];
  c.provenance.pretrain_dataset =
      prov.contains("pretrain_dataset") && prov["pretrain_dataset"].is_string()
          ? prov["pretrain_dataset"].get<std::string>()
          : "";
  if (prov.contains("finetune_dataset") && prov["finetune_dataset"].is_string())
    c.provenance.finetune_dataset = prov["finetune_dataset"].get<std::string>();
  if (prov.contains("steps")) c.provenance.steps = prov["steps"].get<int64_t>();
  if (prov.contains("seed")) c.provenance.seed = prov["seed"].get<uint64_t>();
  if (!root.contains("vocab") || !root["vocab"].is_array())
    throw format_error(path + ": checkpoint missing 'vocab'");
  try {
    c.vocab = Vocab::from_tokens(root["vocab"].get<std::vector<std::string>>());
  } catch (const format_error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw format_error(path + ": bad vocab: " + e.what());
  }
  if (!root.contains("tensors") || !root["tensors"].is_array())
    throw format_error(path + ": checkpoint missing 'tensors'");
  for (const auto& tj : root["tensors"]) {
    if (!tj.contains("name") || !tj["name"].is_string())
      throw format_error(path + ": tensor without name");
    std::string name = tj["name"].get<std::string>();
    if (!tj.contains("shape") || !tj["shape"].is_array())
      throw format_error(path + ": tensor '" + name + "' missing shape");
    std::vector<size_t> shape = tj["shape"].get<std::vector<size_t>>();
    if (!tj.contains("data_b64") || !tj["data_b64"].is_string())
      throw format_error(path + ": tensor '" + name + "' missing data_b64");
    std::vector<double> data;
    try {
      data = b64_to_doubles(tj["data_b64"].get<std::string>());
    } catch (const format_error& e) {
      throw format_error(path + ": tensor '" + name + "': " + e.what());
    }
    size_t expect = 1;
    for (size_t d : shape) expect *= d;
    if (shape.empty() || expect != data.size())
      throw format_error(path + ": tensor '" + name + "' shape " + shape_str(shape) +
                         " does not match " + std::to_string(data.size()) + " values");
    c.params.add(name, Tensor(std::move(shape), std::move(data)));
  }
  return c;
}

namespace {

void validate_dataset_for(ModelKind kind, const QADataset& ds) {
  if (ds.examples.empty()) throw argument_error("training: dataset has no questions");
  if (kind == ModelKind::kPspr) {
    for (const auto& ex : ds.examples)
      for (const auto& p : ex.paragraphs)
        if (p.relevant == Relevance::kUnlabeled)
          throw argument_error("training: pspr requires relevance labels on every paragraph "
                               "(question '" + ex.id + "'); run the openqa transform first");
  }
}

}  // namespace

Trainer::Trainer(const QADataset& ds, const TrainConfig& cfg)
    : cfg_(cfg),
      vocab_(Vocab::empty()),
      optimizer_(AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8, 10.0}),
      shuffle_rng_(stream(cfg.seed, "train.shuffle")) {
  cfg_.validate();
  validate_dataset_for(cfg_.kind, ds);
  vocab_ = Vocab::build({&ds}, cfg_.min_count);
  if (cfg_.kind == ModelKind::kReader) {
    reader_init(params_, "reader", cfg_.reader_config(), vocab_.size(), cfg_.seed);
  } else {
    selector_init(params_, "selector", cfg_.selector_config(), vocab_.size(), cfg_.seed);
    reader_init(params_, "reader", cfg_.reader_config(), vocab_.size(), cfg_.seed);
  }
  provenance_.pretrain_dataset = ds.identity();
  provenance_.seed = cfg_.seed;
  build_items(ds);
}

Trainer::Trainer(const Checkpoint& ckpt, const QADataset& ds, const TrainConfig& cfg)
    : cfg_(cfg),
      vocab_(ckpt.vocab),
      params_(ckpt.params),
      optimizer_(AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8, 10.0}),
      shuffle_rng_(stream(cfg.seed, "train.shuffle")) {
  if (cfg_.kind != ckpt.kind)
    throw argument_error("finetune: config kind '" + kind_name(cfg_.kind) +
                         "' does not match checkpoint kind '" + kind_name(ckpt.kind) + "'");
  // Model structure is fixed by the saved weights.
  cfg_.hidden = ckpt.config.hidden;
  cfg_.emb_dim = ckpt.config.emb_dim;
  cfg_.layers = ckpt.config.layers;
  cfg_.span_window = ckpt.config.span_window;
  cfg_.validate(/*allow_zero_epochs=*/true);
  validate_dataset_for(cfg_.kind, ds);

  // Vocabulary union: tokens of the target dataset that the checkpoint has
  // never seen are appended; existing rows stay bit-identical.
  Vocab ds_vocab = Vocab::build({&ds}, cfg_.min_count);
  std::vector<std::string> new_tokens;
  for (size_t i = 2; i < ds_vocab.tokens.size(); ++i) {
    if (!vocab_.contains(ds_vocab.tokens[i])) new_tokens.push_back(ds_vocab.tokens[i]);
  }
  for (const auto& tok : new_tokens) {
    vocab_.index.emplace(tok, static_cast<int>(vocab_.tokens.size()));
    vocab_.tokens.push_back(tok);
  }
  reader_extend_vocab(params_, "reader", cfg_.reader_config(), new_tokens, cfg_.seed);
  if (cfg_.kind == ModelKind::kPspr)
    selector_extend_vocab(params_, "selector", cfg_.selector_config(), new_tokens, cfg_.seed);

  provenance_ = ckpt.provenance;
  if (provenance_.finetune_dataset.empty())
    provenance_.finetune_dataset = ds.identity();
  else
    provenance_.finetune_dataset += " + " + ds.identity();
  prior_steps_ = ckpt.provenance.steps;
  build_items(ds);
}

void Trainer::build_items(const QADataset& ds) {
  if (cfg_.kind == ModelKind::kReader) {
    for (const auto& ex : ds.examples) {
      std::vector<int> q_ids = to_ids(vocab_, ex.question);
      if (q_ids.empty()) continue;
      for (const auto& p : ex.paragraphs) {
        if (p.spans.empty() || p.text.size() == 0) continue;
        reader_items_.push_back({q_ids, to_ids(vocab_, p.text), p.spans});
      }
    }
    if (reader_items_.empty())
      throw argument_error("training: no span-annotated paragraphs to train the reader on; "
                           "run the rc transform first");
  } else {
    for (const auto& ex : ds.examples) {
      PsprItem item;
      item.q_ids = to_ids(vocab_, ex.question);
      bool any_positive = false;
      for (const auto& p : ex.paragraphs) {
        if (p.text.size() == 0) continue;
        item.p_ids.push_back(to_ids(vocab_, p.text));
        item.labels.push_back(p.relevant == Relevance::kPositive ? 1 : 0);
        item.spans.push_back(p.spans);
        if (p.relevant == Relevance::kPositive) any_positive = true;
      }
      // The softmax over paragraphs cannot represent "no relevant
      // paragraph"; such questions are skipped and reported.
      if (!any_positive || item.q_ids.empty() || item.p_ids.empty()) {
        ++skipped_;
        continue;
      }
      pspr_items_.push_back(std::move(item));
    }
    if (pspr_items_.empty())
      throw argument_error("training: no questions with a positive paragraph for pspr training");
  }
}

double Trainer::run_epoch() {
  return cfg_.kind == ModelKind::kReader ? reader_epoch() : pspr_epoch();
}

double Trainer::reader_epoch() {
  std::vector<size_t> order(reader_items_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle_rng_.shuffle(order);

  double total_loss = 0;
  size_t done = 0;
  const size_t batch = static_cast<size_t>(cfg_.batch_size);
  ReaderConfig rcfg = cfg_.reader_config();
  while (done < order.size()) {
    size_t take = std::min(batch, order.size() - done);
    Tape t;
    int loss = -1;
    for (size_t k = 0; k < take; ++k) {
      const ReaderItem& item = reader_items_[order[done + k]];
      ReaderNodes nodes = reader_forward(t, params_, "reader", rcfg, item.q_ids, item.p_ids);
      int item_loss = reader_loss(t, nodes, item.spans);
      loss = loss < 0 ? item_loss : t.add(loss, item_loss);
    }
    loss = t.scale(loss, 1.0 / static_cast<double>(take));
    double loss_value = t.value(loss).data[0];
    if (!std::isfinite(loss_value)) throw training_error("reader training: non-finite loss");
    t.backward(loss);
    optimizer_.step(params_, collect_grads(t));
    total_loss += loss_value * static_cast<double>(take);
    done += take;
  }
  return total_loss / static_cast<double>(order.size());
}

double Trainer::pspr_epoch() {
  std::vector<size_t> order(pspr_items_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle_rng_.shuffle(order);

  ReaderConfig rcfg = cfg_.reader_config();
  SelectorConfig scfg = cfg_.selector_config();
  double total_loss = 0;

  auto reader_part = [&](Tape& t, const PsprItem& item, const std::vector<double>& probs) {
    int loss = -1;
    for (size_t pi = 0; pi < item.p_ids.size(); ++pi) {
      if (item.labels[pi] != 1 || item.spans[pi].empty()) continue;
      ReaderNodes nodes = reader_forward(t, params_, "reader", rcfg, item.q_ids, item.p_ids[pi]);
      // Selector probability enters as a detached weight: the reader is
      // guided by paragraph confidence without letting its loss push the
      // selector toward muting hard paragraphs.
      int weighted = t.scale(reader_loss(t, nodes, item.spans[pi]), probs[pi]);
      loss = loss < 0 ? weighted : t.add(loss, weighted);
    }
    return loss;
  };

  for (size_t oi : order) {
    const PsprItem& item = pspr_items_[oi];
    if (cfg_.pspr_sequential) {
      {
        Tape t;
        SelectorNodes sel = selector_forward(t, params_, "selector", scfg, item.q_ids, item.p_ids);
        int loss = selector_loss(t, sel.dist, item.labels);
        double lv = t.value(loss).data[0];
        if (!std::isfinite(lv)) throw training_error("pspr training: non-finite selector loss");
        total_loss += lv;
        t.backward(loss);
        optimizer_.step(params_, collect_grads(t));
      }
      {
        Tape t;
        SelectorNodes sel = selector_forward(t, params_, "selector", scfg, item.q_ids, item.p_ids);
        std::vector<double> probs = t.value(sel.dist).data;
        Tape rt;
        int loss = reader_part(rt, item, probs);
        if (loss < 0) continue;
        double lv = rt.value(loss).data[0];
        if (!std::isfinite(lv)) throw training_error("pspr training: non-finite reader loss");
        total_loss += lv;
        rt.backward(loss);
        optimizer_.step(params_, collect_grads(rt));
      }
    } else {
      Tape t;
      SelectorNodes sel = selector_forward(t, params_, "selector", scfg, item.q_ids, item.p_ids);
      int loss = selector_loss(t, sel.dist, item.labels);
      std::vector<double> probs = t.value(sel.dist).data;
      int rl = reader_part(t, item, probs);
      if (rl >= 0) loss = t.add(loss, rl);
      double lv = t.value(loss).data[0];
      if (!std::isfinite(lv)) throw training_error("pspr training: non-finite loss");
      total_loss += lv;
      t.backward(loss);
      optimizer_.step(params_, collect_grads(t));
    }
  }
  return total_loss / static_cast<double>(order.size());
}

Checkpoint Trainer::to_checkpoint() const {
  Checkpoint c;
  c.kind = cfg_.kind;
  c.config = cfg_;
  c.provenance = provenance_;
  c.provenance.steps = prior_steps_ + steps();
  c.vocab = vocab_;
  c.params = params_;
  return c;
}

namespace {

Checkpoint run_training(Trainer& trainer, int epochs, const EpochCallback& cb) {
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    double loss = trainer.run_epoch();
    if (cb && !cb(epoch, loss, trainer)) break;
  }
  return trainer.to_checkpoint();
}

}  // namespace

Checkpoint pretrain(const QADataset& ds, const TrainConfig& cfg, const EpochCallback& cb) {
  cfg.validate();
  Trainer trainer(ds, cfg);
  return run_training(trainer, cfg.epochs, cb);
}

Checkpoint finetune(const Checkpoint& ckpt, const QADataset& ds, const TrainConfig& cfg,
                    const EpochCallback& cb) {
  cfg.validate(/*allow_zero_epochs=*/true);
  Trainer trainer(ckpt, ds, cfg);
  return run_training(trainer, cfg.epochs, cb);
}

Checkpoint train_pspr(const QADataset& ds, const TrainConfig& cfg, const EpochCallback& cb) {
  if (cfg.kind != ModelKind::kPspr)
    throw argument_error("train_pspr: config kind must be pspr");
  return pretrain(ds, cfg, cb);
}

}  // namespace spanqa
