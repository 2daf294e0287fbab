// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include "core/nn.hpp"

#include "core/errors.hpp"

namespace spanqa {

void lstm_init(ParamStore& ps, const std::string& prefix, size_t input_dim, size_t hidden,
               uint64_t seed) {
  ps.add(prefix + ".wx", init_uniform({4 * hidden, input_dim}, seed, prefix + ".wx"));
  ps.add(prefix + ".wh", init_uniform({4 * hidden, hidden}, seed, prefix + ".wh"));
  Tensor b = Tensor::zeros({4 * hidden});
  for (size_t i = hidden; i < 2 * hidden; ++i) b.data[i] = 1.0;  // forget gate
  ps.add(prefix + ".b", std::move(b));
}

LstmParamIds lstm_bind(Tape& t, const ParamStore& ps, const std::string& prefix) {
  LstmParamIds ids;
  ids.wx = t.param(prefix + ".wx", ps.at(prefix + ".wx"));
  ids.wh = t.param(prefix + ".wh", ps.at(prefix + ".wh"));
  ids.b = t.param(prefix + ".b", ps.at(prefix + ".b"));
  return ids;
}

std::pair<int, int> lstm_cell(Tape& t, const LstmParamIds& p, int x, int h, int c) {
  const size_t hidden = t.value(h).numel();
  if (t.value(p.wh).cols() != hidden || t.value(c).numel() != hidden)
    throw dimension_error("lstm_cell: state width mismatch, params expect " +
                          shape_str(t.value(p.wh).shape) + ", got h " +
                          shape_str(t.value(h).shape) + " c " + shape_str(t.value(c).shape));
  if (t.value(p.wx).cols() != t.value(x).numel())
    throw dimension_error("lstm_cell: input width mismatch, params expect " +
                          shape_str(t.value(p.wx).shape) + ", got x " +
                          shape_str(t.value(x).shape));

  int z = t.add(t.add(t.matvec(p.wx, x), t.matvec(p.wh, h)), p.b);
  const int H = static_cast<int>(hidden);
  int gi = t.sigmoid(t.slice(z, 0, H));
  int gf = t.sigmoid(t.slice(z, H, H));
  int gg = t.tanh_(t.slice(z, 2 * H, H));
  int go = t.sigmoid(t.slice(z, 3 * H, H));
  int c2 = t.add(t.mul(gf, c), t.mul(gi, gg));
  int h2 = t.mul(go, t.tanh_(c2));
  return {h2, c2};
}

int lstm_run(Tape& t, const LstmParamIds& p, int seq, size_t hidden, bool reversed) {
  const size_t n = t.value(seq).rows();
  int h = t.constant(Tensor::zeros({hidden}));
  int c = t.constant(Tensor::zeros({hidden}));
  std::vector<int> states(n);
  for (size_t k = 0; k < n; ++k) {
    size_t pos = reversed ? n - 1 - k : k;
    int x = t.row(seq, static_cast<int>(pos));
    auto [h2, c2] = lstm_cell(t, p, x, h, c);
    h = h2;
    c = c2;
    states[pos] = h;
  }
  return t.stack_rows(states);
}

void bilstm_init(ParamStore& ps, const std::string& prefix, size_t input_dim, size_t hidden,
                 int layers, uint64_t seed) {
  if (layers < 1) throw argument_error("bilstm_init: layers must be >= 1");
  size_t dim = input_dim;
  for (int l = 0; l < layers; ++l) {
    std::string lp = prefix + ".l" + std::to_string(l);
    lstm_init(ps, lp + ".fw", dim, hidden, seed);
    lstm_init(ps, lp + ".bw", dim, hidden, seed);
    dim = 2 * hidden;
  }
}

int bilstm_encode(Tape& t, const ParamStore& ps, const std::string& prefix, int seq, size_t hidden,
                  int layers) {
  if (t.value(seq).rows() == 0) throw argument_error("bilstm_encode: empty sequence");
  if (layers < 1) throw argument_error("bilstm_encode: layers must be >= 1");
  int cur = seq;
  for (int l = 0; l < layers; ++l) {
    std::string lp = prefix + ".l" + std::to_string(l);
    LstmParamIds fw = lstm_bind(t, ps, lp + ".fw");
    LstmParamIds bw = lstm_bind(t, ps, lp + ".bw");
    int f = lstm_run(t, fw, cur, hidden, false);
    int b = lstm_run(t, bw, cur, hidden, true);
    cur = t.hconcat(f, b);
  }
  return cur;
}

}  // namespace spanqa
