// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <stdexcept>
#include <string>

namespace spanqa {

// Error taxonomy for the whole library. The C API maps these onto stable
// status codes; the CLI maps them onto exit codes.

// Bad call: invalid argument values, empty inputs, mismatched model kinds.
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Tensor shape disagreement. Messages name both shapes.
class dimension_error : public argument_error {
 public:
  using argument_error::argument_error;
};

// File parse or serialization failure (datasets, checkpoints, predictions).
class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training-time failure: non-finite gradients or losses.
class training_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spanqa
