// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace spanqa {

// Primitive operations recorded on the tape. Each op knows how to compute
// its value from its inputs (forward / replay) and how to push an output
// gradient back to them (backward).
enum class Op : uint8_t {
  Leaf,
  MatMul,       // (m x k, k x n) -> m x n
  MatMulNT,     // (m x k, n x k) -> m x n, A * B^T
  MatVec,       // (m x n, n) -> m
  TMatVec,      // (m x n, m) -> n, A^T * x
  Add,          // same shape
  AddRowVec,    // (m x n, n) -> m x n, row broadcast
  Mul,          // same shape, elementwise
  Scale,        // (any, c) -> any
  Sigmoid,
  TanhOp,
  Relu,
  LogOp,        // elementwise natural log
  SoftmaxVec,   // (n) -> n
  SoftmaxRows,  // (m x n) -> m x n, softmax per row
  LogSumExp,    // (n) -> scalar
  Gather,       // (n, ids) -> len(ids)
  SumVec,       // (n) -> scalar
  MaxVec,       // (n) -> scalar, grad to first argmax
  HConcat,      // (m x a, m x b) -> m x (a+b)
  Row,          // (m x n, i) -> n
  StackRows,    // list of (n) -> m x n
  StackScalars, // list of scalars -> (m)
  Slice,        // (n, off, len) -> len
  Embed,        // (V x D table, ids) -> len(ids) x D
};

struct Node {
  Op op = Op::Leaf;
  Tensor value;
  int a = -1;              // first input
  int b = -1;              // second input
  std::vector<int> list;   // StackRows / StackScalars inputs
  std::vector<int> idx;    // Gather/Embed ids, Row {i}, Slice {off,len}, MaxVec argmax cache
  double c = 0.0;          // Scale factor
  bool needs_grad = false;
};

// Reverse-mode differentiation tape. Ops execute eagerly in topological
// order; backward() walks the record in reverse and accumulates exact
// gradients into every parameter leaf reachable from a scalar loss.
// replay() recomputes every non-leaf value from the recorded ops and must
// reproduce the original forward bit-exactly.
class Tape {
 public:
  int constant(Tensor v);

  // Parameter leaf. Repeated calls with the same name return the same node.
  int param(const std::string& name, const Tensor& v);

  int matmul(int a, int b);
  int matmul_nt(int a, int b);
  int matvec(int a, int x);
  int tmatvec(int a, int x);
  int add(int a, int b);
  int add_rowvec(int a, int b);
  int mul(int a, int b);
  int scale(int a, double c);
  int sigmoid(int a);
  int tanh_(int a);
  int relu(int a);
  int log_(int a);
  int softmax_vec(int a);
  int softmax_rows(int a);
  int logsumexp(int a);
  int gather(int a, std::vector<int> ids);
  int sum_vec(int a);
  int max_vec(int a);
  int hconcat(int a, int b);
  int row(int a, int i);
  int stack_rows(const std::vector<int>& rows);
  int stack_scalars(const std::vector<int>& scalars);
  int slice(int a, int off, int len);
  int embed(int table, std::vector<int> ids);

  const Tensor& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  size_t size() const { return nodes_.size(); }

  // Reverse pass from a scalar loss node. May be called once per tape.
  void backward(int loss_id);

  bool has_grad(int id) const;
  const Tensor& grad(int id) const;

  // Recompute all non-leaf values in recording order.
  void replay();

  const std::map<std::string, int>& params() const { return params_; }

 private:
  int push(Node n);
  void forward_one(Node& n);
  Tensor& grad_buf(int id);

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::map<std::string, int> params_;
};

// Gradients of all named parameters on a tape, keyed by name. Parameters
// never reached by the backward pass get zero tensors of matching shape.
std::map<std::string, Tensor> collect_grads(const Tape& tape);

}  // namespace spanqa
