// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/tensor.hpp"

#include <cmath>
#include <utility>

#include "core/errors.hpp"

namespace spanqa {

Tensor::Tensor(std::vector<size_t> shape_, std::vector<double> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
  size_t n = 1;
  for (size_t d : shape) {
    if (d == 0) throw dimension_error("Tensor: zero dimension in shape " + shape_str(shape));
    n *= d;
  }
  if (shape.empty() || n != data.size()) {
    throw dimension_error("Tensor: shape " + shape_str(shape) + " does not match data length " +
                          std::to_string(data.size()));
  }
}

Tensor Tensor::zeros(std::vector<size_t> shape_) {
  size_t n = 1;
  for (size_t d : shape_) n *= d;
  return Tensor(std::move(shape_), std::vector<double>(n, 0.0));
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::vec(std::vector<double> v) {
  size_t n = v.size();
  return Tensor({n}, std::move(v));
}

Tensor Tensor::matrix(size_t rows, size_t cols, std::vector<double> v) {
  return Tensor({rows, cols}, std::move(v));
}

size_t Tensor::rows() const { return shape.empty() ? 0 : shape[0]; }

size_t Tensor::cols() const {
  if (shape.size() == 1) return shape[0];
  return shape.size() >= 2 ? shape[1] : 0;
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string shape_str(const std::vector<size_t>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::vector<double> softmax_values(const std::vector<double>& v) {
  if (v.empty()) throw argument_error("softmax: empty input");
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

double logsumexp_values(const std::vector<double>& v) {
  if (v.empty()) throw argument_error("logsumexp: empty input");
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - mx);
  return mx + std::log(sum);
}

}  // namespace spanqa
