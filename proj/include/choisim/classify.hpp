// Resource classification of stored programs: entanglement-breaking,
// bipartite-separable, and product-channel verdicts with the measures
// (negativity, entanglement entropy, factorization distance) behind them.
#pragma once

#include "choisim/channel.hpp"

#include <optional>
#include <string>

namespace choisim {

enum class Verdict { Yes, No, Inconclusive };
const char* verdict_name(Verdict v);

// Local dimensions of a bipartite channel acting on A (x) B.
struct BipartiteDims {
  int a_in = 2, a_out = 2, b_in = 2, b_out = 2;
};

// Decided through separability of the Choi state across head|tail: the PPT
// test is exact for 2x2 and 2x3, NPT always refutes, PPT in higher
// dimensions stays inconclusive.
Verdict is_entanglement_breaking(const Channel& ch, double tol = default_tol());

// Sum of |negative eigenvalues| of the partial transpose over cut_wires.
double negativity(const DensityOperator& state, const std::vector<int>& cut_wires);

// Separability of the Choi state across the A|B partition. Constructive
// product factorization decides yes; NPT decides no; otherwise inconclusive
// unless the cut reshapes to 2x2 or 2x3.
Verdict is_separable_bipartite_channel(const Channel& ch, const BipartiteDims& dims,
                                       double tol = default_tol());

// Yes iff the Choi state factors as omega_A (x) omega_B within tol;
// the max-abs factorization distance is reported through *distance.
bool is_product_channel(const Channel& ch, const BipartiteDims& dims,
                        double tol = 1e-8, double* distance = nullptr);

enum class TierVerdict { Free, Resource, UniversalCandidate, Inconclusive };
const char* tier_verdict_name(TierVerdict v);

struct ResourceReport {
  // free-set verdicts: entanglement-breaking, separable, product
  TierVerdict ebc = TierVerdict::Inconclusive;
  TierVerdict sepc = TierVerdict::Inconclusive;
  TierVerdict proc = TierVerdict::Inconclusive;

  Verdict eb = Verdict::Inconclusive;
  Verdict separable = Verdict::Inconclusive;
  Verdict product = Verdict::Inconclusive;

  bool unitary_program = false;
  double negativity_head_tail = 0.0;
  std::optional<double> negativity_cut;     // across A|B when bipartite
  std::optional<double> entropy_head_tail;  // pure programs only
  std::optional<double> product_distance;
  bool ppt_head_tail = false;
  double tol = 0.0;
};

// Runs the three free-set tests on a program. Unitary programs are flagged
// universal candidates for the EB tier; bipartite unitary programs whose
// A|B negativity matches CNOT's reference value are flagged for the
// separable tier.
ResourceReport classify(const ProgramState& p,
                        const std::optional<BipartiteDims>& dims = std::nullopt,
                        double tol = default_tol());

// Entanglement entropy across head|tail of a pure program (natural log).
double entanglement_entropy(const ProgramState& p, double tol = default_tol());

// Negativity of omega_CNOT across the A|B cut (the reference value used by
// the CNOT-equivalence flag); computed, not hard-coded.
double cnot_reference_negativity();

}  // namespace choisim
