// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace spanqa {

// Dense row-major tensor of doubles. All model math runs in double
// precision; shapes are validated on construction.
class Tensor {
 public:
  std::vector<size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<size_t> shape_, std::vector<double> data_);

  static Tensor zeros(std::vector<size_t> shape_);
  static Tensor scalar(double v);
  static Tensor vec(std::vector<double> v);
  static Tensor matrix(size_t rows, size_t cols, std::vector<double> v);

  size_t rank() const { return shape.size(); }
  size_t numel() const { return data.size(); }
  bool is_scalar() const { return shape.size() == 1 && shape[0] == 1; }
  bool is_vector() const { return shape.size() == 1; }
  bool is_matrix() const { return shape.size() == 2; }

  size_t rows() const;
  size_t cols() const;

  double& at(size_t i) { return data[i]; }
  double at(size_t i) const { return data[i]; }
  double& at(size_t i, size_t j) { return data[i * cols() + j]; }
  double at(size_t i, size_t j) const { return data[i * cols() + j]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const;
};

std::string shape_str(const std::vector<size_t>& shape);

// Value-level stable softmax (max-subtracted). Throws argument_error on
// empty input. Shared by the tape op and the span-probability path so both
// produce bit-identical results.
std::vector<double> softmax_values(const std::vector<double>& v);
double logsumexp_values(const std::vector<double>& v);

}  // namespace spanqa
