// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/tape.hpp"

#include <cmath>
#include <utility>

#include "core/errors.hpp"

namespace spanqa {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw dimension_error(msg);
}

}  // namespace

int Tape::push(Node n) {
  if (n.op != Op::Leaf) {
    bool ng = false;
    if (n.a >= 0) ng = ng || nodes_[static_cast<size_t>(n.a)].needs_grad;
    if (n.b >= 0) ng = ng || nodes_[static_cast<size_t>(n.b)].needs_grad;
    for (int i : n.list) ng = ng || nodes_[static_cast<size_t>(i)].needs_grad;
    n.needs_grad = ng;
    forward_one(n);
  }
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::constant(Tensor v) {
  Node n;
  n.value = std::move(v);
  return push(std::move(n));
}

int Tape::param(const std::string& name, const Tensor& v) {
  auto it = params_.find(name);
  if (it != params_.end()) return it->second;
  Node n;
  n.value = v;
  n.needs_grad = true;
  int id = push(std::move(n));
  params_.emplace(name, id);
  return id;
}

int Tape::matmul(int a, int b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.is_matrix() && B.is_matrix() && A.cols() == B.rows(),
          "matmul: incompatible shapes " + shape_str(A.shape) + " and " + shape_str(B.shape));
  Node n;
  n.op = Op::MatMul;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::matmul_nt(int a, int b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.is_matrix() && B.is_matrix() && A.cols() == B.cols(),
          "matmul_nt: incompatible shapes " + shape_str(A.shape) + " and " + shape_str(B.shape));
  Node n;
  n.op = Op::MatMulNT;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::matvec(int a, int x) {
  const Tensor& A = value(a);
  const Tensor& X = value(x);
  require(A.is_matrix() && X.is_vector() && A.cols() == X.numel(),
          "matvec: incompatible shapes " + shape_str(A.shape) + " and " + shape_str(X.shape));
  Node n;
  n.op = Op::MatVec;
  n.a = a;
  n.b = x;
  return push(std::move(n));
}

int Tape::tmatvec(int a, int x) {
  const Tensor& A = value(a);
  const Tensor& X = value(x);
  require(A.is_matrix() && X.is_vector() && A.rows() == X.numel(),
          "tmatvec: incompatible shapes " + shape_str(A.shape) + " and " + shape_str(X.shape));
  Node n;
  n.op = Op::TMatVec;
  n.a = a;
  n.b = x;
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  require(value(a).same_shape(value(b)), "add: shape mismatch " + shape_str(value(a).shape) +
                                             " vs " + shape_str(value(b).shape));
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::add_rowvec(int a, int b) {
  const Tensor& A = value(a);
  const Tensor& r = value(b);
  require(A.is_matrix() && r.is_vector() && A.cols() == r.numel(),
          "add_rowvec: incompatible shapes " + shape_str(A.shape) + " and " + shape_str(r.shape));
  Node n;
  n.op = Op::AddRowVec;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  require(value(a).same_shape(value(b)), "mul: shape mismatch " + shape_str(value(a).shape) +
                                             " vs " + shape_str(value(b).shape));
  Node n;
  n.op = Op::Mul;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::scale(int a, double c) {
  Node n;
  n.op = Op::Scale;
  n.a = a;
  n.c = c;
  return push(std::move(n));
}

int Tape::sigmoid(int a) {
  Node n;
  n.op = Op::Sigmoid;
  n.a = a;
  return push(std::move(n));
}

int Tape::tanh_(int a) {
  Node n;
  n.op = Op::TanhOp;
  n.a = a;
  return push(std::move(n));
}

int Tape::relu(int a) {
  Node n;
  n.op = Op::Relu;
  n.a = a;
  return push(std::move(n));
}

int Tape::log_(int a) {
  Node n;
  n.op = Op::LogOp;
  n.a = a;
  return push(std::move(n));
}

int Tape::softmax_vec(int a) {
  require(value(a).is_vector(), "softmax_vec: expected vector, got " + shape_str(value(a).shape));
  Node n;
  n.op = Op::SoftmaxVec;
  n.a = a;
  return push(std::move(n));
}

int Tape::softmax_rows(int a) {
  require(value(a).is_matrix(), "softmax_rows: expected matrix, got " + shape_str(value(a).shape));
  Node n;
  n.op = Op::SoftmaxRows;
  n.a = a;
  return push(std::move(n));
}

int Tape::logsumexp(int a) {
  require(value(a).is_vector(), "logsumexp: expected vector, got " + shape_str(value(a).shape));
  Node n;
  n.op = Op::LogSumExp;
  n.a = a;
  return push(std::move(n));
}

int Tape::gather(int a, std::vector<int> ids) {
  const Tensor& v = value(a);
  require(v.is_vector(), "gather: expected vector, got " + shape_str(v.shape));
  if (ids.empty()) throw argument_error("gather: empty index list");
  for (int i : ids) {
    if (i < 0 || static_cast<size_t>(i) >= v.numel())
      throw argument_error("gather: index " + std::to_string(i) + " out of range for " +
                           shape_str(v.shape));
  }
  Node n;
  n.op = Op::Gather;
  n.a = a;
  n.idx = std::move(ids);
  return push(std::move(n));
}

int Tape::sum_vec(int a) {
  require(value(a).is_vector(), "sum_vec: expected vector, got " + shape_str(value(a).shape));
  Node n;
  n.op = Op::SumVec;
  n.a = a;
  return push(std::move(n));
}

int Tape::max_vec(int a) {
  require(value(a).is_vector(), "max_vec: expected vector, got " + shape_str(value(a).shape));
  Node n;
  n.op = Op::MaxVec;
  n.a = a;
  return push(std::move(n));
}

int Tape::hconcat(int a, int b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.is_matrix() && B.is_matrix() && A.rows() == B.rows(),
          "hconcat: incompatible shapes " + shape_str(A.shape) + " and " + shape_str(B.shape));
  Node n;
  n.op = Op::HConcat;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::row(int a, int i) {
  const Tensor& A = value(a);
  require(A.is_matrix(), "row: expected matrix, got " + shape_str(A.shape));
  if (i < 0 || static_cast<size_t>(i) >= A.rows())
    throw argument_error("row: index " + std::to_string(i) + " out of range for " +
                         shape_str(A.shape));
  Node n;
  n.op = Op::Row;
  n.a = a;
  n.idx = {i};
  return push(std::move(n));
}

int Tape::stack_rows(const std::vector<int>& rows) {
  if (rows.empty()) throw argument_error("stack_rows: empty row list");
  size_t w = value(rows[0]).numel();
  for (int r : rows) {
    require(value(r).is_vector() && value(r).numel() == w,
            "stack_rows: row shape mismatch " + shape_str(value(r).shape));
  }
  Node n;
  n.op = Op::StackRows;
  n.list = rows;
  return push(std::move(n));
}

int Tape::stack_scalars(const std::vector<int>& scalars) {
  if (scalars.empty()) throw argument_error("stack_scalars: empty list");
  for (int s : scalars) {
    require(value(s).is_scalar(), "stack_scalars: expected scalar, got " + shape_str(value(s).shape));
  }
  Node n;
  n.op = Op::StackScalars;
  n.list = scalars;
  return push(std::move(n));
}

int Tape::slice(int a, int off, int len) {
  const Tensor& v = value(a);
  require(v.is_vector(), "slice: expected vector, got " + shape_str(v.shape));
  if (off < 0 || len <= 0 || static_cast<size_t>(off + len) > v.numel())
    throw argument_error("slice: range [" + std::to_string(off) + ", " + std::to_string(off + len) +
                         ") out of bounds for " + shape_str(v.shape));
  Node n;
  n.op = Op::Slice;
  n.a = a;
  n.idx = {off, len};
  return push(std::move(n));
}

int Tape::embed(int table, std::vector<int> ids) {
  const Tensor& T = value(table);
  require(T.is_matrix(), "embed: expected matrix table, got " + shape_str(T.shape));
  if (ids.empty()) throw argument_error("embed: empty id list");
  for (int i : ids) {
    if (i < 0 || static_cast<size_t>(i) >= T.rows())
      throw argument_error("embed: id " + std::to_string(i) + " out of range for table " +
                           shape_str(T.shape));
  }
  Node n;
  n.op = Op::Embed;
  n.a = table;
  n.idx = std::move(ids);
  return push(std::move(n));
}

void Tape::forward_one(Node& n) {
  auto A = [&]() -> const Tensor& { return nodes_[static_cast<size_t>(n.a)].value; };
  auto B = [&]() -> const Tensor& { return nodes_[static_cast<size_t>(n.b)].value; };

  switch (n.op) {
    case Op::Leaf:
      break;
    case Op::MatMul: {
      const Tensor &a = A(), &b = B();
      size_t m = a.rows(), k = a.cols(), p = b.cols();
      Tensor out = Tensor::zeros({m, p});
      for (size_t i = 0; i < m; ++i) {
        for (size_t t = 0; t < k; ++t) {
          double av = a.data[i * k + t];
          const double* brow = &b.data[t * p];
          double* orow = &out.data[i * p];
          for (size_t j = 0; j < p; ++j) orow[j] += av * brow[j];
        }
      }
      n.value = std::move(out);
      break;
    }
    case Op::MatMulNT: {
      const Tensor &a = A(), &b = B();
      size_t m = a.rows(), k = a.cols(), p = b.rows();
      Tensor out = Tensor::zeros({m, p});
      for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < p; ++j) {
          const double* ar = &a.data[i * k];
          const double* br = &b.data[j * k];
          double s = 0.0;
          for (size_t t = 0; t < k; ++t) s += ar[t] * br[t];
          out.data[i * p + j] = s;
        }
      }
      n.value = std::move(out);
      break;
    }
    case Op::MatVec: {
      const Tensor &a = A(), &x = B();
      size_t m = a.rows(), k = a.cols();
      Tensor out = Tensor::zeros({m});
      for (size_t i = 0; i < m; ++i) {
        const double* ar = &a.data[i * k];
        double s = 0.0;
        for (size_t t = 0; t < k; ++t) s += ar[t] * x.data[t];
        out.data[i] = s;
      }
      n.value = std::move(out);
      break;
    }
    case Op::TMatVec: {
      const Tensor &a = A(), &x = B();
      size_t m = a.rows(), k = a.cols();
      Tensor out = Tensor::zeros({k});
      for (size_t i = 0; i < m; ++i) {
        const double* ar = &a.data[i * k];
        double xv = x.data[i];
        for (size_t t = 0; t < k; ++t) out.data[t] += xv * ar[t];
      }
      n.value = std::move(out);
      break;
    }
    case Op::Add: {
      Tensor out = A();
      const Tensor& b = B();
      for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
      n.value = std::move(out);
      break;
    }
    case Op::AddRowVec: {
      Tensor out = A();
      const Tensor& r = B();
      size_t m = out.rows(), k = out.cols();
      for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < k; ++j) out.data[i * k + j] += r.data[j];
      n.value = std::move(out);
      break;
    }
    case Op::Mul: {
      Tensor out = A();
      const Tensor& b = B();
      for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
      n.value = std::move(out);
      break;
    }
    case Op::Scale: {
      Tensor out = A();
      for (double& v : out.data) v *= n.c;
      n.value = std::move(out);
      break;
    }
    case Op::Sigmoid: {
      Tensor out = A();
      for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
      n.value = std::move(out);
      break;
    }
    case Op::TanhOp: {
      Tensor out = A();
      for (double& v : out.data) v = std::tanh(v);
      n.value = std::move(out);
      break;
    }
    case Op::Relu: {
      Tensor out = A();
      for (double& v : out.data) v = v > 0.0 ? v : 0.0;
      n.value = std::move(out);
      break;
    }
    case Op::LogOp: {
      Tensor out = A();
      for (double& v : out.data) v = std::log(v);
      n.value = std::move(out);
      break;
    }
    case Op::SoftmaxVec: {
      n.value = Tensor::vec(softmax_values(A().data));
      break;
    }
    case Op::SoftmaxRows: {
      const Tensor& a = A();
      size_t m = a.rows(), k = a.cols();
      Tensor out = Tensor::zeros({m, k});
      std::vector<double> rowbuf(k);
      for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < k; ++j) rowbuf[j] = a.data[i * k + j];
        auto sm = softmax_values(rowbuf);
        for (size_t j = 0; j < k; ++j) out.data[i * k + j] = sm[j];
      }
      n.value = std::move(out);
      break;
    }
    case Op::LogSumExp: {
      n.value = Tensor::scalar(logsumexp_values(A().data));
      break;
    }
    case Op::Gather: {
      const Tensor& v = A();
      std::vector<double> out(n.idx.size());
      for (size_t i = 0; i < n.idx.size(); ++i) out[i] = v.data[static_cast<size_t>(n.idx[i])];
      n.value = Tensor::vec(std::move(out));
      break;
    }
    case Op::SumVec: {
      double s = 0.0;
      for (double v : A().data) s += v;
      n.value = Tensor::scalar(s);
      break;
    }
    case Op::MaxVec: {
      const Tensor& v = A();
      size_t arg = 0;
      for (size_t i = 1; i < v.data.size(); ++i)
        if (v.data[i] > v.data[arg]) arg = i;
      n.idx.assign(1, static_cast<int>(arg));
      n.value = Tensor::scalar(v.data[arg]);
      break;
    }
    case Op::HConcat: {
      const Tensor &a = A(), &b = B();
      size_t m = a.rows(), ka = a.cols(), kb = b.cols();
      Tensor out = Tensor::zeros({m, ka + kb});
      for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < ka; ++j) out.data[i * (ka + kb) + j] = a.data[i * ka + j];
        for (size_t j = 0; j < kb; ++j) out.data[i * (ka + kb) + ka + j] = b.data[i * kb + j];
      }
      n.value = std::move(out);
      break;
    }
    case Op::Row: {
      const Tensor& a = A();
      size_t k = a.cols(), i = static_cast<size_t>(n.idx[0]);
      std::vector<double> out(a.data.begin() + static_cast<long>(i * k),
                              a.data.begin() + static_cast<long>((i + 1) * k));
      n.value = Tensor::vec(std::move(out));
      break;
    }
    case Op::StackRows: {
      size_t m = n.list.size();
      size_t k = nodes_[static_cast<size_t>(n.list[0])].value.numel();
      Tensor out = Tensor::zeros({m, k});
      for (size_t i = 0; i < m; ++i) {
        const Tensor& r = nodes_[static_cast<size_t>(n.list[i])].value;
        for (size_t j = 0; j < k; ++j) out.data[i * k + j] = r.data[j];
      }
      n.value = std::move(out);
      break;
    }
    case Op::StackScalars: {
      std::vector<double> out(n.list.size());
      for (size_t i = 0; i < n.list.size(); ++i)
        out[i] = nodes_[static_cast<size_t>(n.list[i])].value.data[0];
      n.value = Tensor::vec(std::move(out));
      break;
    }
    case Op::Slice: {
      const Tensor& v = A();
      size_t off = static_cast<size_t>(n.idx[0]), len = static_cast<size_t>(n.idx[1]);
      std::vector<double> out(v.data.begin() + static_cast<long>(off),
                              v.data.begin() + static_cast<long>(off + len));
      n.value = Tensor::vec(std::move(out));
      break;
    }
    case Op::Embed: {
      const Tensor& t = A();
      size_t d = t.cols();
      Tensor out = Tensor::zeros({n.idx.size(), d});
      for (size_t i = 0; i < n.idx.size(); ++i) {
        const double* src = &t.data[static_cast<size_t>(n.idx[i]) * d];
        for (size_t j = 0; j < d; ++j) out.data[i * d + j] = src[j];
      }
      n.value = std::move(out);
      break;
    }
  }
}

Tensor& Tape::grad_buf(int id) {
  Tensor& g = grads_[static_cast<size_t>(id)];
  if (g.data.empty()) g = Tensor::zeros(nodes_[static_cast<size_t>(id)].value.shape);
  return g;
}

void Tape::backward(int loss_id) {
  if (loss_id < 0 || static_cast<size_t>(loss_id) >= nodes_.size())
    throw argument_error("backward: loss node out of range");
  if (!value(loss_id).is_scalar())
    throw argument_error("backward: loss must be scalar, got " + shape_str(value(loss_id).shape));

  grads_.assign(nodes_.size(), Tensor());
  grad_buf(loss_id).data[0] = 1.0;

  for (int id = loss_id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.needs_grad) continue;
    Tensor& gy = grads_[static_cast<size_t>(id)];
    if (gy.data.empty()) continue;

    auto wants = [&](int in) { return in >= 0 && nodes_[static_cast<size_t>(in)].needs_grad; };
    auto val = [&](int in) -> const Tensor& { return nodes_[static_cast<size_t>(in)].value; };

    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul: {
        // C = A*B: dA += dC*B^T, dB += A^T*dC
        const Tensor &a = val(n.a), &b = val(n.b);
        size_t m = a.rows(), k = a.cols(), p = b.cols();
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < m; ++i)
            for (size_t t = 0; t < k; ++t) {
              double s = 0.0;
              for (size_t j = 0; j < p; ++j) s += gy.data[i * p + j] * b.data[t * p + j];
              ga.data[i * k + t] += s;
            }
        }
        if (wants(n.b)) {
          Tensor& gb = grad_buf(n.b);
          for (size_t t = 0; t < k; ++t)
            for (size_t j = 0; j < p; ++j) {
              double s = 0.0;
              for (size_t i = 0; i < m; ++i) s += a.data[i * k + t] * gy.data[i * p + j];
              gb.data[t * p + j] += s;
            }
        }
        break;
      }
      case Op::MatMulNT: {
        // C = A*B^T: dA += dC*B, dB += dC^T*A
        const Tensor &a = val(n.a), &b = val(n.b);
        size_t m = a.rows(), k = a.cols(), p = b.rows();
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < p; ++j) {
              double gv = gy.data[i * p + j];
              for (size_t t = 0; t < k; ++t) ga.data[i * k + t] += gv * b.data[j * k + t];
            }
        }
        if (wants(n.b)) {
          Tensor& gb = grad_buf(n.b);
          for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < p; ++j) {
              double gv = gy.data[i * p + j];
              for (size_t t = 0; t < k; ++t) gb.data[j * k + t] += gv * a.data[i * k + t];
            }
        }
        break;
      }
      case Op::MatVec: {
        // y = A*x: dA += dy (x)^T outer, dx += A^T*dy
        const Tensor &a = val(n.a), &x = val(n.b);
        size_t m = a.rows(), k = a.cols();
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < m; ++i) {
            double gv = gy.data[i];
            for (size_t t = 0; t < k; ++t) ga.data[i * k + t] += gv * x.data[t];
          }
        }
        if (wants(n.b)) {
          Tensor& gx = grad_buf(n.b);
          for (size_t i = 0; i < m; ++i) {
            double gv = gy.data[i];
            for (size_t t = 0; t < k; ++t) gx.data[t] += gv * a.data[i * k + t];
          }
        }
        break;
      }
      case Op::TMatVec: {
        // y = A^T*x: dA += x (dy)^T outer, dx += A*dy
        const Tensor &a = val(n.a), &x = val(n.b);
        size_t m = a.rows(), k = a.cols();
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < m; ++i) {
            double xv = x.data[i];
            for (size_t t = 0; t < k; ++t) ga.data[i * k + t] += xv * gy.data[t];
          }
        }
        if (wants(n.b)) {
          Tensor& gx = grad_buf(n.b);
          for (size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (size_t t = 0; t < k; ++t) s += a.data[i * k + t] * gy.data[t];
            gx.data[i] += s;
          }
        }
        break;
      }
      case Op::Add: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < gy.data.size(); ++i) ga.data[i] += gy.data[i];
        }
        if (wants(n.b)) {
          Tensor& gb = grad_buf(n.b);
          for (size_t i = 0; i < gy.data.size(); ++i) gb.data[i] += gy.data[i];
        }
        break;
      }
      case Op::AddRowVec: {
        const Tensor& a = val(n.a);
        size_t m = a.rows(), k = a.cols();
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < gy.data.size(); ++i) ga.data[i] += gy.data[i];
        }
        if (wants(n.b)) {
          Tensor& gr = grad_buf(n.b);
          for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < k; ++j) gr.data[j] += gy.data[i * k + j];
        }
        break;
      }
      case Op::Mul: {
        const Tensor &a = val(n.a), &b = val(n.b);
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < gy.data.size(); ++i) ga.data[i] += gy.data[i] * b.data[i];
        }
        if (wants(n.b)) {
          Tensor& gb = grad_buf(n.b);
          for (size_t i = 0; i < gy.data.size(); ++i) gb.data[i] += gy.data[i] * a.data[i];
        }
        break;
      }
      case Op::Scale: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < gy.data.size(); ++i) ga.data[i] += n.c * gy.data[i];
        }
        break;
      }
      case Op::Sigmoid: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < gy.data.size(); ++i) {
            double y = n.value.data[i];
            ga.data[i] += gy.data[i] * y * (1.0 - y);
          }
        }
        break;
      }
      case Op::TanhOp: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < gy.data.size(); ++i) {
            double y = n.value.data[i];
            ga.data[i] += gy.data[i] * (1.0 - y * y);
          }
        }
        break;
      }
      case Op::Relu: {
        if (wants(n.a)) {
          const Tensor& a = val(n.a);
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < gy.data.size(); ++i)
            if (a.data[i] > 0.0) ga.data[i] += gy.data[i];
        }
        break;
      }
      case Op::LogOp: {
        if (wants(n.a)) {
          const Tensor& a = val(n.a);
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < gy.data.size(); ++i) ga.data[i] += gy.data[i] / a.data[i];
        }
        break;
      }
      case Op::SoftmaxVec: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          double dot = 0.0;
          for (size_t i = 0; i < gy.data.size(); ++i) dot += gy.data[i] * n.value.data[i];
          for (size_t i = 0; i < gy.data.size(); ++i)
            ga.data[i] += n.value.data[i] * (gy.data[i] - dot);
        }
        break;
      }
      case Op::SoftmaxRows: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          size_t m = n.value.rows(), k = n.value.cols();
          for (size_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (size_t j = 0; j < k; ++j) dot += gy.data[i * k + j] * n.value.data[i * k + j];
            for (size_t j = 0; j < k; ++j)
              ga.data[i * k + j] += n.value.data[i * k + j] * (gy.data[i * k + j] - dot);
          }
        }
        break;
      }
      case Op::LogSumExp: {
        if (wants(n.a)) {
          const Tensor& a = val(n.a);
          Tensor& ga = grad_buf(n.a);
          double L = n.value.data[0], g = gy.data[0];
          for (size_t i = 0; i < a.data.size(); ++i) ga.data[i] += g * std::exp(a.data[i] - L);
        }
        break;
      }
      case Op::Gather: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < n.idx.size(); ++i)
            ga.data[static_cast<size_t>(n.idx[i])] += gy.data[i];
        }
        break;
      }
      case Op::SumVec: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          double g = gy.data[0];
          for (double& v : ga.data) v += g;
        }
        break;
      }
      case Op::MaxVec: {
        if (wants(n.a)) grad_buf(n.a).data[static_cast<size_t>(n.idx[0])] += gy.data[0];
        break;
      }
      case Op::HConcat: {
        const Tensor &a = val(n.a), &b = val(n.b);
        size_t m = a.rows(), ka = a.cols(), kb = b.cols();
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < ka; ++j) ga.data[i * ka + j] += gy.data[i * (ka + kb) + j];
        }
        if (wants(n.b)) {
          Tensor& gb = grad_buf(n.b);
          for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < kb; ++j) gb.data[i * kb + j] += gy.data[i * (ka + kb) + ka + j];
        }
        break;
      }
      case Op::Row: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          size_t k = n.value.numel(), i = static_cast<size_t>(n.idx[0]);
          for (size_t j = 0; j < k; ++j) ga.data[i * k + j] += gy.data[j];
        }
        break;
      }
      case Op::StackRows: {
        size_t k = n.value.cols();
        for (size_t i = 0; i < n.list.size(); ++i) {
          int in = n.list[i];
          if (!wants(in)) continue;
          Tensor& g = grad_buf(in);
          for (size_t j = 0; j < k; ++j) g.data[j] += gy.data[i * k + j];
        }
        break;
      }
      case Op::StackScalars: {
        for (size_t i = 0; i < n.list.size(); ++i) {
          int in = n.list[i];
          if (wants(in)) grad_buf(in).data[0] += gy.data[i];
        }
        break;
      }
      case Op::Slice: {
        if (wants(n.a)) {
          Tensor& ga = grad_buf(n.a);
          size_t off = static_cast<size_t>(n.idx[0]);
          for (size_t i = 0; i < gy.data.size(); ++i) ga.data[off + i] += gy.data[i];
        }
        break;
      }
      case Op::Embed: {
        if (wants(n.a)) {
          Tensor& gt = grad_buf(n.a);
          size_t d = n.value.cols();
          for (size_t i = 0; i < n.idx.size(); ++i) {
            double* dst = &gt.data[static_cast<size_t>(n.idx[i]) * d];
            for (size_t j = 0; j < d; ++j) dst[j] += gy.data[i * d + j];
          }
        }
        break;
      }
    }
  }
}

bool Tape::has_grad(int id) const {
  return static_cast<size_t>(id) < grads_.size() && !grads_[static_cast<size_t>(id)].data.empty();
}

const Tensor& Tape::grad(int id) const {
  static const Tensor empty;
  if (!has_grad(id)) return empty;
  return grads_[static_cast<size_t>(id)];
}

void Tape::replay() {
  for (Node& n : nodes_) {
    if (n.op != Op::Leaf) forward_one(n);
  }
}

std::map<std::string, Tensor> collect_grads(const Tape& tape) {
  std::map<std::string, Tensor> out;
  for (const auto& [name, id] : tape.params()) {
    if (tape.has_grad(id)) {
      out.emplace(name, tape.grad(id));
    } else {
      out.emplace(name, Tensor::zeros(tape.value(id).shape));
    }
  }
  return out;
}

}  // namespace spanqa
