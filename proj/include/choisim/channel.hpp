// Channels and channel-state duality. A channel's dual state (its Choi
// state) is stored unit-trace: omega_E = (E (x) 1)(omega) with
// omega = |w><w|, |w> = sum_i |ii> / sqrt(d). The first wire of a Choi
// state is the head (channel output), the second the tail (ebit remnant);
// inputs are written into the tail, outputs read from the head.
#pragma once

#include "choisim/dense.hpp"

#include <optional>
#include <vector>

namespace choisim {

struct Channel {
  std::vector<Matrix> kraus;      // may be empty when choi is set
  std::optional<Matrix> choi;     // unit-trace convention, dims {dim_out, dim_in}
  int dim_in = 0;
  int dim_out = 0;

  // Either representation, deriving the missing one on the fly.
  Matrix choi_matrix() const;
  std::vector<Matrix> kraus_ops(double tol = default_tol()) const;
};

Channel channel_from_kraus(std::vector<Matrix> kraus);
Channel unitary_channel(const Matrix& u);
Channel depolarizing_channel(int d, double p);  // p = 1 is completely depolarizing

// CPTP channel from a Haar-random Stinespring isometry with the given
// Kraus rank.
Channel random_channel(int dim_in, int dim_out, int kraus_rank, Rng& rng);

// Measure-and-prepare channel from a random POVM and random output states;
// entanglement breaking by construction.
Channel random_eb_channel(int d, int n_outcomes, Rng& rng);

// A bipartite Choi state with labeled head and tail wire groups; the unit
// of program memory.
struct ProgramState {
  DensityOperator state;
  std::vector<int> head_wires;
  std::vector<int> tail_wires;
  double norm_factor = 1.0;

  ProgramState() = default;
  ProgramState(DensityOperator s, std::vector<int> head, std::vector<int> tail);

  int head_dim() const;
  int tail_dim() const;
  std::vector<int> head_dims() const;
  std::vector<int> tail_dims() const;
  DensityOperator head_marginal() const { return partial_trace(state, head_wires); }
  DensityOperator tail_marginal() const { return partial_trace(state, tail_wires); }
};

// |w> = sum_i |ii> / sqrt(d) on two d-dimensional wires.
PureState ebit(int d);

ProgramState choi_of(const Channel& ch, double tol = default_tol());

// Kraus decomposition via eigendecomposition of the Choi matrix. Signals a
// non-TP program when the tail marginal deviates from I/d beyond tol.
Channel channel_from_choi(const ProgramState& p, double tol = default_tol());

DensityOperator apply(const Channel& ch, const DensityOperator& rho);

struct CptpReport {
  bool trace_preserving = false;
  bool completely_positive = false;
  double tp_residual = 0.0;        // || sum K^dag K - I ||_max
  double choi_min_eigenvalue = 0.0;
  bool ok() const { return trace_preserving && completely_positive; }
};

CptpReport is_cptp(const Channel& ch, double tol = default_tol());

// Choi state of a unitary gate, e.g. gate_program(hadamard()).
ProgramState gate_program(const Matrix& u);
// n-wire identity program: n ebits arranged as head group then tail group.
ProgramState identity_program(int d, int n_wires = 1);

// Same state with power-of-two wires split into qubit wires, canonical
// head-then-tail order.
ProgramState as_qubit_program(const ProgramState& p);

}  // namespace choisim
