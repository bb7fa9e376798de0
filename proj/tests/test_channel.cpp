#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "choisim/channel.hpp"
#include "choisim/gates.hpp"
#include "test_support.hpp"

using namespace choisim;
using namespace choisim::testing;

TEST_CASE("ebit is the normalized sum of |ii> with maximally mixed marginals") {
  PureState w2 = ebit(2);
  Vector expect = Vector::Zero(4);
  expect(0) = expect(3) = 1.0 / std::sqrt(2.0);
  CHECK((w2.vector - expect).cwiseAbs().maxCoeff() < 1e-15);

  DensityOperator w3 = ebit(3).to_density();
  CHECK(mat_close(partial_trace(w3, {0}).matrix, identity(3) / 3.0, 1e-12));
  CHECK(mat_close(partial_trace(w3, {1}).matrix, identity(3) / 3.0, 1e-12));

  CHECK_THROWS_AS(ebit(1), DimensionError);
}

TEST_CASE("transpose trick: <w|(U (x) U*)|w> = 1") {
  Rng rng(5);
  for (int d : {2, 3}) {
    PureState w = ebit(d);
    for (int trial = 0; trial < 5; ++trial) {
      Matrix u = haar_random_unitary(d, rng);
      Matrix op = kron(u, u.conjugate());
      Complex amp = (w.vector.adjoint() * op * w.vector)(0);
      CHECK(std::abs(amp - Complex(1.0, 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("choi_of identity is the ebit, depolarizing is I/4") {
  ProgramState id = choi_of(unitary_channel(identity(2)));
  CHECK(mat_close(id.state.matrix, ebit(2).to_density().matrix, 1e-14));

  // hand oracle: the completely depolarizing channel replaces the head
  // marginal of the ebit by I/2, leaving I/2 (x) I/2 = I/4
  ProgramState dep = choi_of(depolarizing_channel(2, 1.0));
  CHECK(mat_close(dep.state.matrix, identity(4) / 4.0, 1e-14));
}

TEST_CASE("unitary programs are pure with maximally mixed head marginal") {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix u = haar_random_unitary(2, rng);
    ProgramState p = gate_program(u);
    double purity = (p.state.matrix * p.state.matrix).trace().real();
    CHECK(purity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mat_close(p.head_marginal().matrix, identity(2) / 2.0, 1e-10));
  }
}

TEST_CASE("channel_from_choi inverts choi_of") {
  // ebit density -> identity channel (single Kraus proportional to I)
  ProgramState id(ebit(2).to_density(), {0}, {1});
  Channel ch = channel_from_choi(id);
  REQUIRE(ch.kraus.size() == 1);
  Matrix k = ch.kraus[0];
  CHECK(mat_close(k * k.adjoint(), identity(2), 1e-10));
  Rng rng(3);
  DensityOperator rho = random_density(2, rng);
  CHECK(mat_close(apply(ch, rho).matrix, rho.matrix, 1e-10));

  // round-trip on 50 random channels built from random isometries
  for (int trial = 0; trial < 50; ++trial) {
    int d = (trial % 2) ? 2 : 3;
    Channel orig = random_channel(d, d, 1 + trial % 4, rng);
    ProgramState p = choi_of(orig);
    Channel back = channel_from_choi(p);
    CHECK(max_abs_diff(back.choi_matrix(), orig.choi_matrix()) < 1e-9);
  }
}

TEST_CASE("channel_from_choi of the maximally mixed state acts as depolarizing") {
  ProgramState mixed(DensityOperator(identity(4) / 4.0, {2, 2}), {0}, {1});
  Channel ch = channel_from_choi(mixed);
  Rng rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    DensityOperator rho = random_density(2, rng);
    CHECK(mat_close(apply(ch, rho).matrix, identity(2) / 2.0, 1e-10));
  }
}

TEST_CASE("channel_from_choi rejects non-TP programs") {
  // |00><00| has tail marginal |0><0|, far from I/2
  DensityOperator bad = kron(basis_state(2, 0), basis_state(2, 0));
  CHECK_THROWS_AS(channel_from_choi(ProgramState(bad, {0}, {1})), ValidationError);
}

TEST_CASE("apply matches the duality oracle d * tr_tail[(1 (x) rho^t) choi]") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Channel ch = random_channel(2, 2, 2, rng);
    DensityOperator rho = random_density(2, rng);
    DensityOperator out = apply(ch, rho);

    DensityOperator choi(ch.choi_matrix(), {2, 2});
    Matrix weight = kron(identity(2), rho.matrix.transpose());
    DensityOperator weighted(weight * choi.matrix, {2, 2});
    Matrix oracle = 2.0 * partial_trace(weighted, {0}).matrix;
    CHECK(max_abs_diff(out.matrix, oracle) < 1e-10);
  }
}

TEST_CASE("apply basic cases") {
  Rng rng(25);
  DensityOperator rho = random_density(2, rng);
  CHECK(mat_close(apply(unitary_channel(identity(2)), rho).matrix, rho.matrix, 1e-14));
  CHECK(mat_close(apply(depolarizing_channel(2, 1.0), basis_state(2, 0)).matrix,
                  identity(2) / 2.0, 1e-14));
  CHECK_THROWS_AS(apply(unitary_channel(identity(2)), random_density(3, rng)),
                  DimensionError);
}

TEST_CASE("is_cptp diagnostics") {
  CptpReport ok = is_cptp(unitary_channel(identity(2)));
  CHECK(ok.ok());
  CHECK(ok.tp_residual < 1e-14);
  CHECK(ok.choi_min_eigenvalue > -1e-14);

  // trace-decreasing Kraus set {sqrt(1/2) I}
  Channel half = channel_from_kraus({std::sqrt(0.5) * identity(2)});
  CptpReport bad = is_cptp(half);
  CHECK_FALSE(bad.trace_preserving);
  CHECK(bad.tp_residual == doctest::Approx(0.5).epsilon(1e-12));

  // the transpose map encoded as a "Choi" matrix: PT of the ebit,
  // min eigenvalue -1/2 for d=2
  Channel transpose_map;
  transpose_map.dim_in = transpose_map.dim_out = 2;
  transpose_map.choi = partial_transpose(ebit(2).to_density(), {1}).matrix;
  CptpReport ncp = is_cptp(transpose_map);
  CHECK_FALSE(ncp.completely_positive);
  CHECK(ncp.choi_min_eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ncp.trace_preserving);
}

TEST_CASE("choi tail marginal is I/d for every TP channel") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    int d = (trial % 2) ? 2 : 3;
    Channel ch = random_channel(d, d, 1 + trial % 3, rng);
    ProgramState p = choi_of(ch);
    CHECK(mat_close(p.tail_marginal().matrix, identity(d) / d, 1e-10));
  }
}

TEST_CASE("identity_program regroups ebits into head/tail blocks") {
  ProgramState p = identity_program(2, 2);
  CHECK(p.head_wires == std::vector<int>{0, 1});
  CHECK(p.tail_wires == std::vector<int>{2, 3});
  // acting with a unitary on heads equals acting with its transpose on tails
  Rng rng(43);
  Matrix u = haar_random_unitary(4, rng);
  DensityOperator left = apply_on_wires(p.state, u, {0, 1});
  DensityOperator right = apply_on_wires(p.state, u.transpose(), {2, 3});
  CHECK(max_abs_diff(left.matrix, right.matrix) < 1e-12);
}
