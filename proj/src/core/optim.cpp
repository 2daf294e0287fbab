// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/optim.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace spanqa {

double global_grad_norm(const std::map<std::string, Tensor>& grads) {
  double ss = 0.0;
  for (const auto& [name, g] : grads)
    for (double v : g.data) ss += v * v;
  return std::sqrt(ss);
}

void Adam::step(ParamStore& params, const std::map<std::string, Tensor>& grads) {
  for (const auto& [name, g] : grads) {
    if (!g.all_finite())
      throw training_error("adam: non-finite gradient for parameter '" + name + "'");
    if (!params.at(name).same_shape(g))
      throw dimension_error("adam: gradient shape " + shape_str(g.shape) +
                            " does not match parameter '" + name + "' " +
                            shape_str(params.at(name).shape));
  }

  double factor = 1.0;
  if (cfg_.clip_norm > 0.0) {
    double norm = global_grad_norm(grads);
    if (norm > cfg_.clip_norm) factor = cfg_.clip_norm / norm;
  }

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

  for (const auto& [name, g] : grads) {
    Tensor& p = params.at(name);
    auto mit = m_.find(name);
    if (mit == m_.end()) {
      mit = m_.emplace(name, Tensor::zeros(p.shape)).first;
      v_.emplace(name, Tensor::zeros(p.shape));
    }
    Tensor& m = mit->second;
    Tensor& v = v_.at(name);
    for (size_t i = 0; i < p.data.size(); ++i) {
      double gi = g.data[i] * factor;
      m.data[i] = cfg_.beta1 * m.data[i] + (1.0 - cfg_.beta1) * gi;
      v.data[i] = cfg_.beta2 * v.data[i] + (1.0 - cfg_.beta2) * gi * gi;
      double mhat = m.data[i] / bc1;
      double vhat = v.data[i] / bc2;
      p.data[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace spanqa
