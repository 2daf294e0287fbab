// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/params.hpp"

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace spanqa {

Tensor& ParamStore::at(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw argument_error("ParamStore: unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw argument_error("ParamStore: unknown parameter '" + name + "'");
  return it->second;
}

void ParamStore::add(const std::string& name, Tensor t) {
  auto [it, inserted] = tensors.emplace(name, std::move(t));
  if (!inserted) throw argument_error("ParamStore: duplicate parameter '" + name + "'");
}

size_t ParamStore::total_elements() const {
  size_t n = 0;
  for (const auto& [name, t] : tensors) n += t.numel();
  return n;
}

Tensor init_uniform(std::vector<size_t> shape, uint64_t seed, const std::string& name, double r) {
  Tensor t = Tensor::zeros(std::move(shape));
  Rng rng = stream(seed, name);
  for (double& v : t.data) v = rng.uniform(-r, r);
  return t;
}

}  // namespace spanqa
