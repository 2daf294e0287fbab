// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "core/params.hpp"
#include "core/rng.hpp"
#include "core/tape.hpp"

namespace testutil {

inline double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-8});
}

// Central finite-difference gradient check. `forward` must rebuild the
// computation from scratch on every call (given the current store) and
// return the scalar loss value; `backward_grads` computes the analytic
// gradients once. Returns the worst relative error over all elements.
struct GradCheck {
  double max_rel_err = 0.0;
  std::string worst_param;
  size_t worst_index = 0;
};

inline GradCheck gradcheck(spanqa::ParamStore& store,
                           const std::function<double(const spanqa::ParamStore&)>& forward,
                           const std::map<std::string, spanqa::Tensor>& analytic,
                           double eps = 1e-5) {
  GradCheck result;
  for (auto& [name, tensor] : store.tensors) {
    auto git = analytic.find(name);
    for (size_t i = 0; i < tensor.data.size(); ++i) {
      double saved = tensor.data[i];
      tensor.data[i] = saved + eps;
      double up = forward(store);
      tensor.data[i] = saved - eps;
      double down = forward(store);
      tensor.data[i] = saved;
      double numeric = (up - down) / (2 * eps);
      double a = git == analytic.end() ? 0.0 : git->second.data[i];
      double err = rel_err(a, numeric);
      if (err > result.max_rel_err) {
        result.max_rel_err = err;
        result.worst_param = name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

// Convenience: builds a tape via `build` (which binds every tensor in the
// store as a parameter), runs backward, and compares against central
// differences.
inline GradCheck gradcheck_tape(
    spanqa::ParamStore& store,
    const std::function<int(spanqa::Tape&, const spanqa::ParamStore&)>& build, double eps = 1e-5) {
  spanqa::Tape tape;
  int loss = build(tape, store);
  tape.backward(loss);
  auto grads = spanqa::collect_grads(tape);
  auto forward = [&build](const spanqa::ParamStore& ps) {
    spanqa::Tape t;
    int l = build(t, ps);
    return t.value(l).data[0];
  };
  return gradcheck(store, forward, grads, eps);
}

inline spanqa::Tensor random_tensor(std::vector<size_t> shape, spanqa::Rng& rng, double r = 1.0) {
  spanqa::Tensor t = spanqa::Tensor::zeros(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-r, r);
  return t;
}

// Unique scratch directory under the system temp dir; removed on
// destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("spanqa_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testutil
