#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "netscan/errors.hpp"
#include "netscan/matrix.hpp"
#include "netscan/rng.hpp"
#include "netscan/tape.hpp"

using namespace netscan;

namespace {

Matrix random_matrix(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (auto& v : m.data) v = rng.uniform(-1.0, 1.0);
  return m;
}

// Independent triple-loop matmul oracle.
Matrix matmul_oracle(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(k, j);
      out.at(i, j) = acc;
    }
  return out;
}

// Central finite differences against tape gradients for a scalar function of
// a list of parameter matrices (rebuilt on a fresh tape per evaluation).
void check_gradients(std::vector<Matrix> params,
                     const std::function<Var(Tape&, const std::vector<Var>&)>& build,
                     double h = 1e-5, double tol = 1e-4) {
  Tape tape;
  std::vector<Var> vars;
  for (const auto& p : params) vars.push_back(tape.leaf(p));
  Var loss = build(tape, vars);
  tape.backward(loss);

  auto eval = [&](const std::vector<Matrix>& ps) {
    Tape t2;
    std::vector<Var> vs;
    for (const auto& p : ps) vs.push_back(t2.leaf(p));
    return t2.val(build(t2, vs)).at(0, 0);
  };

  for (size_t pi = 0; pi < params.size(); ++pi) {
    const Matrix& g = tape.grad(vars[pi]);
    for (size_t k = 0; k < params[pi].size(); ++k) {
      auto plus = params;
      auto minus = params;
      plus[pi].data[k] += h;
      minus[pi].data[k] -= h;
      const double fd = (eval(plus) - eval(minus)) / (2.0 * h);
      const double an = g.data[k];
      const double denom = std::max({std::fabs(fd), std::fabs(an), 1e-8});
      CAPTURE(pi);
      CAPTURE(k);
      CHECK(std::fabs(fd - an) / denom < tol);
    }
  }
}

}  // namespace

TEST_CASE("matmul matches triple-loop oracle") {
  Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    int m = 1 + rng.next_below(6), k = 1 + rng.next_below(6), n = 1 + rng.next_below(6);
    Matrix a = random_matrix(m, k, rng);
    Matrix b = random_matrix(k, n, rng);
    Matrix got = matmul(a, b);
    Matrix want = matmul_oracle(a, b);
    REQUIRE(got.same_shape(want));
    for (size_t i = 0; i < got.size(); ++i) CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
  }
  // the spec's stated instance shape
  Matrix a = random_matrix(2, 3, rng);
  Matrix b = random_matrix(3, 1, rng);
  Matrix got = matmul(a, b);
  Matrix want = matmul_oracle(a, b);
  for (size_t i = 0; i < got.size(); ++i) CHECK(std::fabs(got.data[i] - want.data[i]) < 1e-12);
}

TEST_CASE("matmul shape mismatch throws") {
  Matrix a(2, 3), b(2, 3);
  CHECK_THROWS_AS(matmul(a, b), ScanError);
}

TEST_CASE("relu and softmax basics") {
  Matrix m = Matrix::from_rows({{-1.0, 2.0}});
  Matrix r = relu(m);
  CHECK(r.at(0, 0) == 0.0);
  CHECK(r.at(0, 1) == 2.0);

  auto s = softmax_row({0.0, 0.0});
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == doctest::Approx(0.5));
  double sum = s[0] + s[1];
  CHECK(std::fabs(sum - 1.0) < 1e-12);

  auto s2 = softmax_row({-2.0, 3.0});
  CHECK(s2[0] == doctest::Approx(1.0 / (1.0 + std::exp(5.0))).epsilon(1e-9));
  CHECK(s2[1] == doctest::Approx(std::exp(5.0) / (1.0 + std::exp(5.0))).epsilon(1e-9));
}

TEST_CASE("dropout: inference identity, training mask statistics, determinism") {
  Rng rng(42);
  Matrix m = Matrix::filled(40, 50, 1.0);
  Matrix off = dropout(m, 0.5, rng, false);
  for (size_t i = 0; i < m.size(); ++i) CHECK(off.data[i] == m.data[i]);

  Rng r1(9), r2(9);
  Matrix a = dropout(m, 0.3, r1, true);
  Matrix b = dropout(m, 0.3, r2, true);
  int zeros = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.data[i] == b.data[i]);  // same seed, same mask
    if (a.data[i] == 0.0) {
      ++zeros;
    } else {
      CHECK(a.data[i] == doctest::Approx(1.0 / 0.7));
    }
  }
  double frac = static_cast<double>(zeros) / static_cast<double>(a.size());
  CHECK(frac > 0.25);
  CHECK(frac < 0.35);
}

TEST_CASE("rng: determinism, splits, shuffle") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng base(5);
  Rng s1 = base.split(1);
  Rng s2 = base.split(2);
  CHECK(s1.next_u64() != s2.next_u64());
  Rng s1b = base.split(1);
  Rng s1c = base.split(1);
  CHECK(s1b.next_u64() == s1c.next_u64());

  std::vector<int> v1{0, 1, 2, 3, 4, 5, 6, 7};
  auto v2 = v1;
  Rng r1(77), r2(77);
  r1.shuffle(v1);
  r2.shuffle(v2);
  CHECK(v1 == v2);
}

TEST_CASE("grad: loss = sum(W) gives all-ones gradient") {
  Tape t;
  Var w = t.leaf(Matrix::filled(3, 4, 2.5));
  Var loss = t.sum_all(w);
  t.backward(loss);
  for (double g : t.grad(w).data) CHECK(g == 1.0);
}

TEST_CASE("grad: unused parameter has exactly zero gradient") {
  Tape t;
  Var w = t.leaf(Matrix::filled(2, 2, 1.0));
  Var unused = t.leaf(Matrix::filled(5, 5, 3.0));
  Var loss = t.sum_all(t.relu(w));
  t.backward(loss);
  for (double g : t.grad(unused).data) CHECK(g == 0.0);
}

TEST_CASE("double backward throws TapeExhausted") {
  Tape t;
  Var w = t.leaf(Matrix::filled(1, 1, 1.0));
  Var loss = t.sum_all(w);
  t.backward(loss);
  CHECK_THROWS_WITH_AS(t.backward(loss), doctest::Contains("TapeExhausted"), ScanError);
}

TEST_CASE("finite differences: dense chain with relu, bias, nll") {
  Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<Matrix> params = {random_matrix(4, 3, rng), random_matrix(3, 2, rng),
                                  random_matrix(1, 2, rng)};
    std::vector<int> labels{1, 0, 1, 0};
    check_gradients(params, [labels](Tape& t, const std::vector<Var>& vs) {
      Var h = t.relu(t.matmul(vs[0], vs[1]));
      Var logits = t.add_rowvec(h, vs[2]);
      return t.mean_nll(logits, labels);
    });
  }
}

TEST_CASE("finite differences: segment ops, concat, row ops") {
  Rng rng(13);
  std::vector<int> seg{0, 0, 1, 1, 1};
  std::vector<Matrix> params = {random_matrix(5, 3, rng), random_matrix(5, 1, rng)};
  check_gradients(params, [seg](Tape& t, const std::vector<Var>& vs) {
    Var scaled = t.row_scale(vs[0], t.sigmoid(vs[1]));
    Var sum = t.segment_sum(scaled, seg, 2);
    Var mean = t.segment_mean(vs[0], seg, 2);
    Var mx = t.segment_max(vs[0], seg, 2);
    Var cat = t.concat_cols({sum, mean, mx});
    return t.mean_all(t.tanh(cat));
  });
}

TEST_CASE("finite differences: propagate and masked neighbor sum") {
  Rng rng(17);
  std::vector<PropagateEntry> entries{{0, 1, 0.5}, {1, 0, 0.5}, {2, 1, 0.7}, {2, 2, 1.0}};
  std::vector<EdgeMsg> msgs{{0, 1, 0}, {1, 0, 1}, {2, 0, 2}};
  std::vector<Matrix> params = {random_matrix(3, 4, rng), random_matrix(3, 1, rng)};
  check_gradients(params, [entries, msgs](Tape& t, const std::vector<Var>& vs) {
    Var mask = t.sigmoid(vs[1]);
    Var p = t.propagate(3, entries, vs[0]);
    Var q = t.neighbor_sum_masked(msgs, mask, vs[0]);
    return t.mean_all(t.relu(t.add(p, q)));
  });
}

TEST_CASE("finite differences: masked gcn propagation (degree renormalization)") {
  Rng rng(19);
  GcnMaskSupport sup;
  sup.n = 4;
  // path 0-1-2-3 treated undirected, plus an antiparallel double edge on (1,2)
  sup.cells = {{0, 1, {0}}, {1, 0, {0}}, {1, 2, {1, 2}}, {2, 1, {1, 2}}, {2, 3, {3}}, {3, 2, {3}}};
  std::vector<Matrix> params = {random_matrix(4, 3, rng), random_matrix(4, 1, rng)};
  check_gradients(params, [sup](Tape& t, const std::vector<Var>& vs) {
    Var mask = t.sigmoid(vs[1]);
    Var y = t.gcn_propagate_masked(sup, mask, vs[0]);
    return t.mean_all(t.tanh(y));
  });
}

TEST_CASE("bernoulli entropy value and gradient") {
  Tape t;
  Matrix m(1, 3);
  m.at(0, 0) = 0.5;
  m.at(0, 1) = 0.1;
  m.at(0, 2) = 0.9;
  Var v = t.leaf(m);
  Var e = t.bernoulli_entropy(v);
  CHECK(t.val(e).at(0, 0) == doctest::Approx(std::log(2.0)));
  CHECK(t.val(e).at(0, 1) == doctest::Approx(t.val(e).at(0, 2)));

  Rng rng(23);
  Matrix p(2, 2);
  p.at(0, 0) = 0.3;
  p.at(0, 1) = 0.6;
  p.at(1, 0) = 0.45;
  p.at(1, 1) = 0.8;
  check_gradients({p}, [](Tape& t2, const std::vector<Var>& vs) {
    return t2.mean_all(t2.bernoulli_entropy(vs[0]));
  });
}

TEST_CASE("glorot init is seed-deterministic and in range") {
  Rng r1(31), r2(31);
  Matrix a = glorot(37, 100, r1);
  Matrix b = glorot(37, 100, r2);
  const double lim = std::sqrt(6.0 / 137.0);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.data[i] == b.data[i]);
    CHECK(std::fabs(a.data[i]) <= lim);
  }
}
