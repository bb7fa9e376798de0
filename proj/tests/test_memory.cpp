#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "choisim/gates.hpp"
#include "choisim/memory.hpp"
#include "test_support.hpp"

#include <cstdio>
#include <filesystem>
#include <unistd.h>

using namespace choisim;
using namespace choisim::testing;

namespace {

// duality oracle: success head state is tr_tail[(1 (x) sqrt(rho^t)) w (1 (x) sqrt(rho^t))]
// which equals E(rho)/d before normalization
DensityOperator write_oracle(const Channel& ch, const DensityOperator& rho) {
  DensityOperator out = apply(ch, rho);
  out.matrix /= out.matrix.trace();
  return out;
}

}  // namespace

TEST_CASE("write_input reproduces channel action on the success branch") {
  // identity program, |0> input: head |0><0| with probability 1/2
  ProgramState id = gate_program(identity(2));
  WriteOutcome w = write_input(id, basis_state(2, 0), WriteMode::Postselect);
  CHECK(w.success);
  CHECK(w.probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mat_close(w.head_state.matrix, basis_state(2, 0).matrix, 1e-12));

  // Hadamard program: |0> writes to |+>
  ProgramState h = gate_program(hadamard());
  WriteOutcome wh = write_input(h, basis_state(2, 0), WriteMode::Postselect);
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK(mat_close(wh.head_state.matrix, plus, 1e-12));
  CHECK(wh.probability == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("write_input with maximally mixed input gives E(I/d)") {
  Rng rng(51);
  Channel ch = random_channel(2, 2, 2, rng);
  DensityOperator mixed(identity(2) / 2.0, {2});
  WriteOutcome w = write_input(choi_of(ch), mixed, WriteMode::Postselect);
  CHECK(mat_close(w.head_state.matrix, write_oracle(ch, mixed).matrix, 1e-10));
}

TEST_CASE("universality by measurement for H, T, CNOT and random inputs") {
  std::vector<Matrix> gates = {hadamard(), t_gate(), cnot()};
  Rng rng(53);
  for (const auto& g : gates) {
    Channel ch = unitary_channel(g);
    ProgramState p = choi_of(ch);
    const int d = static_cast<int>(g.rows());
    for (int trial = 0; trial < 20; ++trial) {
      DensityOperator rho = random_density(d, rng);
      WriteOutcome w = write_input(p, rho, WriteMode::Postselect);
      CHECK(max_abs_diff(w.head_state.matrix, apply(ch, rho).matrix) < 1e-10);
      CHECK(w.probability == doctest::Approx(1.0 / d).epsilon(1e-10));
    }
  }
}

TEST_CASE("sampled writes hit the success branch with frequency 1/d") {
  ProgramState h = gate_program(hadamard());
  Rng rng(57);
  DensityOperator rho = random_density(2, rng);
  const int n = 10000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    WriteOutcome w = write_input(h, rho, WriteMode::Sample, &rng);
    if (w.success) ++hits;
  }
  const double p = 0.5;
  const double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(static_cast<double>(hits) / n - p) < 5 * sigma);
}

TEST_CASE("failure branch carries the normalized complementary state") {
  ProgramState id = gate_program(identity(2));
  Rng rng(59);
  DensityOperator rho = random_density(2, rng);
  // force failures until one shows up
  WriteOutcome w;
  do {
    w = write_input(id, rho, WriteMode::Sample, &rng);
  } while (w.success);
  CHECK_FALSE(w.success);
  CHECK(w.probability == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(w.head_state.trace_real() == doctest::Approx(1.0).epsilon(1e-10));
  // complementary oracle: tr_tail[(1 (x) (1 - rho^t)) w] = (I - rho)/d ... normalized
  Matrix expect = identity(2) - rho.matrix;
  expect /= expect.trace();
  CHECK(mat_close(w.head_state.matrix, expect, 1e-10));
}

TEST_CASE("write_input rejects dim mismatch and bad states") {
  ProgramState h = gate_program(hadamard());
  Rng rng(61);
  CHECK_THROWS_AS(write_input(h, random_density(3, rng), WriteMode::Postselect),
                  DimensionError);
  DensityOperator not_state(2.0 * identity(2), {2});
  CHECK_THROWS_AS(write_input(h, not_state, WriteMode::Postselect), ValidationError);
}

TEST_CASE("read_expectation") {
  DensityOperator plus(0.5 * (identity(2) + pauli_x()), {2});
  CHECK(read_expectation(plus, identity(2)) == doctest::Approx(1.0));
  CHECK(read_expectation(plus, pauli_x()) == doctest::Approx(1.0));

  // end to end: program w_T on |+>, observable Y -> sqrt(2)/2
  ProgramState t = gate_program(t_gate());
  WriteOutcome w = write_input(t, plus, WriteMode::Postselect);
  CHECK(read_expectation(w.head_state, pauli_y()) ==
        doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-10));

  Matrix non_hermitian(2, 2);
  non_hermitian << 0, 1, 0, 0;
  CHECK_THROWS_AS(read_expectation(plus, non_hermitian), ValidationError);
}

TEST_CASE("stochastic_to_channel embeds Markov chains") {
  // permutation matrix: basis states map to their images
  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(3, 3);
  perm(1, 0) = perm(2, 1) = perm(0, 2) = 1.0;
  Channel ch = stochastic_to_channel(perm);
  DensityOperator out = apply(ch, basis_state(3, 0));
  CHECK(mat_close(out.matrix, basis_state(3, 1).matrix, 1e-12));

  // doubly stochastic matrix iterated 5 times matches the matrix power
  Eigen::MatrixXd s(3, 3);
  s << 0.5, 0.25, 0.25, 0.3, 0.4, 0.3, 0.2, 0.35, 0.45;
  Channel cs = stochastic_to_channel(s);
  Eigen::MatrixXd s5 = s * s * s * s * s;
  DensityOperator rho = basis_state(3, 1);
  for (int i = 0; i < 5; ++i) rho = apply(cs, rho);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(rho.matrix(i, i).real() - s5(i, 1)) < 1e-12);

  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.5, 0.4, 0.5;
  CHECK_THROWS_AS(stochastic_to_channel(bad), ValidationError);
}

TEST_CASE("stochastic channels iterate like Markov chains on diagonals") {
  Rng rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 4;
    Eigen::MatrixXd s(d, d);
    for (int j = 0; j < d; ++j) {
      double col = 0.0;
      for (int i = 0; i < d; ++i) {
        double u = ((rng() >> 11) * 0x1.0p-53) + 0.05;
        s(i, j) = u;
        col += u;
      }
      for (int i = 0; i < d; ++i) s(i, j) /= col;
    }
    Channel ch = stochastic_to_channel(s);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
    p(0) = 1.0;
    DensityOperator rho = basis_state(d, 0);
    for (int step = 0; step < 5; ++step) {
      p = (s * p).eval();
      rho = apply(ch, rho);
    }
    for (int i = 0; i < d; ++i)
      CHECK(std::abs(rho.matrix(i, i).real() - p(i)) < 1e-12);
  }
}

TEST_CASE("registry round trip, collision and listing") {
  auto dir = std::filesystem::temp_directory_path() /
             ("choisim_registry_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  Registry reg(dir);

  reg.save("H", gate_program(hadamard()));
  reg.save("T", gate_program(t_gate()));
  reg.save("CNOT", gate_program(cnot()));

  ProgramState h = reg.load("H");
  CHECK(fidelity(h.state, gate_program(hadamard()).state) >= 1.0 - 1e-12);

  CHECK(reg.list() == std::vector<std::string>{"CNOT", "H", "T"});
  CHECK_THROWS_AS(reg.save("H", gate_program(hadamard())), ValidationError);
  CHECK_NOTHROW(reg.save("H", gate_program(hadamard()), {}, /*overwrite=*/true));
  CHECK_THROWS_AS(reg.load("missing"), ValidationError);
  CHECK_THROWS_AS(reg.save("../evil", gate_program(hadamard())), ValidationError);

  std::filesystem::remove_all(dir);
}
