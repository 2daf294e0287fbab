// Copyright 2026 the spanqa authors.
// Licensed under the Apache License, Version 2.0.

#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/tape.hpp"
#include "core/tensor.hpp"
#include "test_util.hpp"

using namespace spanqa;
using testutil::gradcheck_tape;
using testutil::random_tensor;

TEST_CASE("tensor shape validation") {
  CHECK_THROWS_AS(Tensor({2, 3}, {1.0, 2.0}), dimension_error);
  CHECK_THROWS_AS(Tensor({0}, {}), dimension_error);
  Tensor t = Tensor::matrix(2, 2, {1, 2, 3, 4});
  CHECK(t.at(1, 0) == 3);
  CHECK(t.all_finite());
  t.at(0, 1) = std::nan("");
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("matmul identity and annihilator") {
  Tape t;
  int m = t.constant(Tensor::matrix(3, 2, {1, 2, 3, 4, 5, 6}));
  int eye = t.constant(Tensor::matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
  int prod = t.matmul(eye, m);
  CHECK(t.value(prod).data == t.value(m).data);

  int zero = t.constant(Tensor::zeros({2, 3}));
  int z = t.matmul(zero, m);
  for (double v : t.value(z).data) CHECK(v == 0.0);
}

TEST_CASE("matmul matches triple-loop recomputation") {
  Rng rng(42);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({4, 2}, rng);
  Tape t;
  int p = t.matmul(t.constant(a), t.constant(b));
  for (size_t i = 0; i < 3; ++i) {
    for (size_t j = 0; j < 2; ++j) {
      double expect = 0;
      for (size_t k = 0; k < 4; ++k) expect += a.at(i, k) * b.at(k, j);
      CHECK(t.value(p).at(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Tape t;
  int a = t.constant(Tensor::zeros({2, 3}));
  int b = t.constant(Tensor::zeros({2, 3}));
  try {
    t.matmul(a, b);
    FAIL("expected dimension_error");
  } catch (const dimension_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
  }
}

TEST_CASE("softmax trivial cases") {
  auto u = softmax_values({0, 0, 0});
  for (double v : u) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));
  auto w = softmax_values({std::log(2.0), 0.0});
  CHECK(w[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK_THROWS_AS(softmax_values({}), argument_error);
}

TEST_CASE("softmax matches extended-precision oracle on random vectors") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(16);
    for (double& x : v) x = rng.uniform(-30, 30);
    auto got = softmax_values(v);
    long double total = 0;
    std::vector<long double> e(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
      e[i] = expl(static_cast<long double>(v[i]));
      total += e[i];
    }
    double sum = 0;
    for (size_t i = 0; i < v.size(); ++i) {
      CHECK(testutil::rel_err(got[i], static_cast<double>(e[i] / total)) < 1e-12);
      sum += got[i];
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("softmax shift invariance") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(8), shifted(8);
    double c = rng.uniform(-100, 100);
    for (size_t i = 0; i < v.size(); ++i) {
      v[i] = rng.uniform(-5, 5);
      shifted[i] = v[i] + c;
    }
    auto a = softmax_values(v);
    auto b = softmax_values(shifted);
    for (size_t i = 0; i < v.size(); ++i) CHECK(std::fabs(a[i] - b[i]) < 1e-12);
  }
}

TEST_CASE("backward requires scalar loss") {
  Tape t;
  ParamStore ps;
  ps.add("w", Tensor::vec({1, 2}));
  int w = t.param("w", ps.at("w"));
  CHECK_THROWS_AS(t.backward(w), argument_error);
}

TEST_CASE("backward of constant loss leaves zero gradients") {
  Tape t;
  ParamStore ps;
  ps.add("w", Tensor::vec({1, 2, 3}));
  int w = t.param("w", ps.at("w"));
  (void)w;
  int loss = t.constant(Tensor::scalar(5.0));
  t.backward(loss);
  auto grads = collect_grads(t);
  for (double v : grads.at("w").data) CHECK(v == 0.0);
}

TEST_CASE("backward of sum of squares gives 2w") {
  Tape t;
  ParamStore ps;
  ps.add("w", Tensor::vec({1.5, -2.0, 0.25}));
  int w = t.param("w", ps.at("w"));
  int loss = t.sum_vec(t.mul(w, w));
  t.backward(loss);
  const Tensor& g = t.grad(w);
  for (size_t i = 0; i < 3; ++i) CHECK(g.data[i] == doctest::Approx(2 * ps.at("w").data[i]));
}

TEST_CASE("elementwise and reduction ops pass finite-difference checks") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    ParamStore ps;
    ps.add("a", random_tensor({5}, rng));
    ps.add("b", random_tensor({5}, rng));
    auto build = [](Tape& t, const ParamStore& s) {
      int a = t.param("a", s.at("a"));
      int b = t.param("b", s.at("b"));
      int x = t.mul(t.sigmoid(a), t.tanh_(b));
      int y = t.add(x, t.relu(t.scale(a, 0.7)));
      int sm = t.softmax_vec(y);
      int picked = t.gather(sm, {0, 2, 2});
      return t.add(t.logsumexp(y), t.sum_vec(t.log_(picked)));
    };
    auto r = gradcheck_tape(ps, build);
    CHECK_MESSAGE(r.max_rel_err < 1e-4, "worst ", r.worst_param, "[", r.worst_index, "] err ",
                  r.max_rel_err);
  }
}

TEST_CASE("matrix ops pass finite-difference checks") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    ParamStore ps;
    ps.add("m", random_tensor({3, 4}, rng));
    ps.add("n", random_tensor({4, 2}, rng));
    ps.add("k", random_tensor({3, 2}, rng));
    ps.add("v", random_tensor({2}, rng));
    auto build = [](Tape& t, const ParamStore& s) {
      int m = t.param("m", s.at("m"));
      int n = t.param("n", s.at("n"));
      int k = t.param("k", s.at("k"));
      int v = t.param("v", s.at("v"));
      int prod = t.matmul(m, n);                    // 3x2
      int mixed = t.matmul_nt(prod, k);             // 3x3
      int soft = t.softmax_rows(mixed);             // 3x3
      int joined = t.hconcat(soft, t.add(prod, k)); // 3x5
      int r0 = t.row(joined, 1);                    // 5
      int stacked = t.stack_rows({r0, t.row(joined, 2)});
      int pooled = t.tmatvec(k, t.matvec(k, v));    // 2
      int s1 = t.max_vec(t.slice(r0, 1, 3));
      int s2 = t.logsumexp(t.matvec(stacked, t.constant(Tensor::vec({1, -1, 0.5, 2, 0.3}))));
      return t.add(t.add(s1, s2), t.sum_vec(pooled));
    };
    auto r = gradcheck_tape(ps, build);
    CHECK_MESSAGE(r.max_rel_err < 1e-4, "worst ", r.worst_param, "[", r.worst_index, "] err ",
                  r.max_rel_err);
  }
}

TEST_CASE("embedding gradients scatter into the table") {
  Rng rng(17);
  ParamStore ps;
  ps.add("table", random_tensor({6, 3}, rng));
  auto build = [](Tape& t, const ParamStore& s) {
    int table = t.param("table", s.at("table"));
    int e = t.embed(table, {1, 4, 1});
    return t.logsumexp(t.matvec(e, t.constant(Tensor::vec({0.3, -1.2, 0.8}))));
  };
  auto r = gradcheck_tape(ps, build);
  CHECK(r.max_rel_err < 1e-4);

  // Rows that were never looked up keep zero gradient.
  Tape t;
  int table = t.param("table", ps.at("table"));
  int e = t.embed(table, {1, 4, 1});
  t.backward(t.sum_vec(t.row(e, 0)));
  const Tensor& g = t.grad(table);
  for (size_t j = 0; j < 3; ++j) {
    CHECK(g.at(0, j) == 0.0);
    CHECK(g.at(2, j) == 0.0);
    CHECK(g.at(1, j) != 0.0);
  }
}

TEST_CASE("tape replay reproduces forward values bit-exactly") {
  Rng rng(23);
  Tape t;
  ParamStore ps;
  ps.add("m", random_tensor({4, 4}, rng));
  int m = t.param("m", ps.at("m"));
  int x = t.constant(random_tensor({4}, rng));
  int y = t.softmax_vec(t.matvec(m, t.tanh_(t.matvec(m, x))));
  std::vector<double> before = t.value(y).data;
  t.replay();
  CHECK(t.value(y).data == before);
}

TEST_CASE("identical seeds give bit-identical forwards and gradients") {
  auto run = [] {
    Rng rng(123);
    Tape t;
    ParamStore ps;
    ps.add("w", testutil::random_tensor({8, 8}, rng));
    int w = t.param("w", ps.at("w"));
    int x = t.constant(testutil::random_tensor({8}, rng));
    int loss = t.logsumexp(t.matvec(w, t.sigmoid(t.matvec(w, x))));
    t.backward(loss);
    auto g = t.grad(w).data;
    g.push_back(t.value(loss).data[0]);
    return g;
  };
  CHECK(run() == run());
}
