// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "core/params.hpp"

namespace spanqa {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 10.0;  // global-norm gradient clip, <= 0 disables
};

double global_grad_norm(const std::map<std::string, Tensor>& grads);

// Adam with bias correction, applied after global-norm clipping. Moment
// accumulators are allocated lazily per parameter and the step counter
// increases by one per step() call.
class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  // Updates every parameter that has an entry in `grads`. Non-finite
  // gradients raise training_error naming the parameter.
  void step(ParamStore& params, const std::map<std::string, Tensor>& grads);

  int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::map<std::string, Tensor> m_, v_;
  int64_t t_ = 0;
};

}  // namespace spanqa
