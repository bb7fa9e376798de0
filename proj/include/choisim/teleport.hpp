// Composition of stored programs by generalized teleportation: qudit Bell
// measurements, Pauli byproduct frames, and the covariant repeat-until-
// success variant that groups all nontrivial byproducts into one outcome.
//
// Convention: outcome (a, b) labels the Bell vector (X^a Z^b (x) 1)|w>.
// Composing first (head h1, tail t1) with second (head h2, tail t2) by a
// Bell measurement on (h1, t2) yields, for unitary programs,
// omega_{U2 P U1} on (h2, t1) with byproduct P = X^{-a} Z^{-b} up to a
// global phase; corrections act on the surviving head wire.
#pragma once

#include "choisim/channel.hpp"
#include "choisim/gates.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace choisim {

struct PauliXZ {
  int x = 0;
  int z = 0;
  bool is_identity() const { return x == 0 && z == 0; }
};

// One (x, z) pair of Z_d x Z_d exponents per wire, reduced mod d.
struct PauliFrame {
  int d = 2;
  std::vector<PauliXZ> wires;

  static PauliFrame identity_frame(int d, int n_wires);
  bool is_identity() const;
  // this := this * other (operator product per wire, phases dropped)
  void multiply(const PauliFrame& other);
  PauliFrame inverse() const;
  Matrix wire_operator(int wire) const;  // X^x Z^z on that wire
};

struct BellOutcome {
  int a = 0;
  int b = 0;
  bool trivial() const { return a == 0 && b == 0; }
};

// Projection of two equal-dimension wires onto a Bell vector; returns the
// outcome probability and the normalized remainder on the surviving wires
// (in their original order). Probability 0 leaves the state zeroed.
std::pair<double, DensityOperator> bell_project(const DensityOperator& state,
                                                int wire_a, int wire_b,
                                                const BellOutcome& k);

// Sampled Bell measurement; outcome distribution follows the state.
std::pair<BellOutcome, DensityOperator> bell_measure(const DensityOperator& state,
                                                     int wire_a, int wire_b, Rng& rng);

// Fused contraction: link wires `aw` of A against wires `bw` of B with one
// Bell outcome per pair, never materializing A (x) B. Returns the
// unnormalized remainder on (A's surviving wires, then B's surviving wires)
// whose trace is the joint outcome probability.
DensityOperator bell_link(const DensityOperator& a, const std::vector<int>& aw,
                          const DensityOperator& b, const std::vector<int>& bw,
                          const std::vector<BellOutcome>& outcomes);

enum class ComposeStrategy { Postselect, FrameTracked, Covariant };

struct CompositionResult {
  ProgramState program;
  PauliFrame frame;
  ComposeStrategy strategy = ComposeStrategy::Postselect;
  int attempts = 1;
  int ebits_consumed = 0;
  std::vector<BellOutcome> outcomes;
};

// Signals a covariant composition that exhausted its attempt budget.
class HeraldedFailure : public Error {
 public:
  HeraldedFailure(const std::string& what, int attempts)
      : Error(what), attempts(attempts) {}
  int attempts;
};

// Teleportation composition of single-wire-head programs: Bell measurement
// between first.head and second.tail. Postselect conditions on the trivial
// outcome (exact composition); FrameTracked samples an outcome and returns
// the byproduct frame f with program = choi of U2 P_f U1.
CompositionResult compose_standard(const ProgramState& first, const ProgramState& second,
                                   ComposeStrategy strategy, Rng* rng = nullptr);

// Two-outcome variant {trivial, grouped nontrivial}; on the grouped outcome
// a fresh copy of `second` is consumed and the attempt repeats. Throws
// HeraldedFailure past max_attempts.
CompositionResult compose_covariant(const ProgramState& first, const ProgramState& second,
                                    Rng& rng, int max_attempts = 64);

struct FrameThroughGate {
  PauliFrame frame;                // conjugated frame (exact for Cliffords)
  std::optional<Matrix> residual;  // non-Pauli leftover (T with an X component)
};

// Push a frame through a gate: gate * P_f = P_f' * gate exactly for H, CNOT
// and Paulis. For T with x != 0 the frame is returned unchanged together
// with the residual R = P^dag T P T^dag (Clifford but not Pauli), so that
// T P = P R T; the caller must resolve it (the engine uses a covariant step).
FrameThroughGate commute_frame_through(const PauliFrame& frame, GateKind gate,
                                       const std::vector<int>& wires);

// Conjugate the correction (P_f)^dag onto the listed wires of a state.
DensityOperator apply_frame_correction(const DensityOperator& state, const PauliFrame& frame,
                                       const std::vector<int>& wires);

}  // namespace choisim
