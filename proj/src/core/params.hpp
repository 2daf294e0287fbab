// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>
#include <string>

#include "core/tensor.hpp"

namespace spanqa {

// Named parameter tensors. std::map keeps iteration order deterministic,
// which fixes the accumulation order of the optimizer and serialization.
struct ParamStore {
  std::map<std::string, Tensor> tensors;

  bool has(const std::string& name) const { return tensors.count(name) > 0; }

  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;

  void add(const std::string& name, Tensor t);

  size_t total_elements() const;
};

// Fresh tensor drawn from the (seed, name) stream, uniform in [-r, r].
Tensor init_uniform(std::vector<size_t> shape, uint64_t seed, const std::string& name,
                    double r = 0.08);

}  // namespace spanqa
