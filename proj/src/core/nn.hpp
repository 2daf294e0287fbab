// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <string>
#include <utility>

#include "core/params.hpp"
#include "core/tape.hpp"

namespace spanqa {

// LSTM parameter node ids on a tape. Gate blocks in wx/wh/b are packed
// [input; forget; candidate; output], each of height `hidden`.
struct LstmParamIds {
  int wx = -1;  // 4H x input_dim
  int wh = -1;  // 4H x H
  int b = -1;   // 4H
};

// Registers wx/wh/b under `prefix` (".wx", ".wh", ".b"). Weights uniform in
// [-0.08, 0.08] from the per-name stream; bias zero except the forget block,
// which starts at 1.0.
void lstm_init(ParamStore& ps, const std::string& prefix, size_t input_dim, size_t hidden,
               uint64_t seed);

LstmParamIds lstm_bind(Tape& t, const ParamStore& ps, const std::string& prefix);

// One LSTM step. Returns (h', c').
std::pair<int, int> lstm_cell(Tape& t, const LstmParamIds& p, int x, int h, int c);

// Runs a unidirectional LSTM over the rows of `seq` (n x d). `reversed`
// walks the sequence back to front; outputs are always stacked in original
// position order. Returns an n x H matrix of hidden states.
int lstm_run(Tape& t, const LstmParamIds& p, int seq, size_t hidden, bool reversed);

// Registers parameters for a stacked bidirectional LSTM under `prefix`
// (".l<k>.fw"/".l<k>.bw"). Layer 0 consumes input_dim, deeper layers 2H.
void bilstm_init(ParamStore& ps, const std::string& prefix, size_t input_dim, size_t hidden,
                 int layers, uint64_t seed);

// Stacked bidirectional encoding: per position, forward and backward states
// of the final layer concatenated. (n x d) -> (n x 2H).
int bilstm_encode(Tape& t, const ParamStore& ps, const std::string& prefix, int seq, size_t hidden,
                  int layers);

}  // namespace spanqa
