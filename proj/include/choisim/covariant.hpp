// Covariant universal programming: program states on 2n qudits, covariant
// POVM decoding, blind composition, and the accuracy benchmark.
//
// A program family is |p_U> = (U^(x)n (x) 1)|Phi| with |Phi> optimized over
// the permutation-symmetric sector ansatz (one real coefficient per spin
// sector). Decoding uses the square-root-measurement covariant POVM with
// seed mean^{-1/2}|Phi>; reported fidelities are Haar averages over the
// target unitary and the input state.
#pragma once

#include "choisim/channel.hpp"

#include <cstdint>
#include <vector>

namespace choisim {

struct ProgramStateFamily {
  int n = 1;  // program copies
  int d = 2;  // local dimension (the optimizer supports d = 2)
  PureState phi;                        // 2n qudits: n program slots then n reference
  Eigen::VectorXd sector_coefficients;  // one per spin sector, normalized
  double average_fidelity = 0.0;        // achieved benchmark value F(n)
};

// Opaque program handle: holds the program state, never the unitary that
// generated it (decoding is blind by construction).
struct SealedProgram {
  PureState state;
  int n = 1;
  int d = 2;
};

enum class PovmSampling { Design, MonteCarlo };

struct CovariantPOVM {
  PureState seed_vector;  // eta; elements are (U^(x)n (x) 1)|eta> weighted by dU
  std::vector<std::pair<Matrix, double>> sample;  // (U-hat, weight)
  double completeness_residual = 0.0;  // || sum w |eta_U><eta_U| - P_support ||_max
  Matrix support_projector;
  int n = 1;
  int d = 2;
};

// The 120-element binary icosahedral subgroup of SU(2): an exact unitary
// 5-design, sufficient for exact integration at t = n + 1 up to n = 4.
const std::vector<Matrix>& su2_icosahedral_design();

SealedProgram build_program_state(const Matrix& u, const ProgramStateFamily& fam);

struct OptimizeConfig {
  PovmSampling sampling = PovmSampling::Design;
  int mc_samples = 2000;            // MonteCarlo integration size
  uint64_t seed = 1;                // MC sampling / dense restarts
  bool dense_refine = false;        // see-saw over the full phi space
  int dense_restarts = 8;
  int max_iterations = 400;
  double convergence = 1e-11;
};

// Maximizes the Haar-average decode fidelity over the sector ansatz
// (deterministic given the config); optionally refines over the full phi
// space by see-saw iteration.
ProgramStateFamily optimize_phi(int n, int d, const OptimizeConfig& config = {});

// Square-root-measurement covariant POVM for the family. Design mode is
// exact for n <= 4; MonteCarlo uses m Haar samples with uniform weights.
// A residual above the threshold is rejected.
CovariantPOVM build_covariant_povm(const ProgramStateFamily& fam, PovmSampling sampling,
                                   int mc_samples = 2000, uint64_t seed = 1,
                                   double residual_threshold = 1e-6);

struct DecodeResult {
  DensityOperator output;          // averaged over POVM outcomes, unnormalized
  double total_probability = 1.0;  // sum of outcome weights (1 up to residual)
};

// Measure the program with the covariant POVM and apply the outcome unitary
// to the data wire; returns the outcome-averaged output.
DecodeResult decode(const PureState& data, const SealedProgram& program,
                    const CovariantPOVM& povm);
DecodeResult decode(const DensityOperator& data, const SealedProgram& program,
                    const CovariantPOVM& povm);

// Exact Haar-average decode fidelity of the family under its SRM POVM.
double average_decode_fidelity(const ProgramStateFamily& fam, const CovariantPOVM& povm);

// Isometric encoding |f> = U|d>  ->  |d> |p_U>: recovers the data slot and
// seals the program. The encoding is covariant: encode(VU) relates to
// encode(U) by V^(x)n on the program slots.
std::pair<PureState, SealedProgram> encode_isometry(const Matrix& u,
                                                    const ProgramStateFamily& fam,
                                                    const PureState& f);

// Sequential decode stages; the output of stage i is the data of stage i+1.
DecodeResult blind_compose(const std::vector<SealedProgram>& programs,
                           const PureState& data, const CovariantPOVM& povm);

// Spin-sector projectors of (C^2)^(x)n, highest j first.
std::vector<Matrix> spin_sector_projectors(int n);

}  // namespace choisim
