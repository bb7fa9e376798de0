// Program conversion. A superchannel acts on a stored program as
// S(omega) = tr_e [ (V (x) U) (omega (x) ebit) (V (x) U)^dag ], where V
// acts on (program head, ebit head), U on (program tail, ebit tail),
// tr_e traces the ebit head and projects the ebit tail onto |0><0|.
// The projection is post-selective as realized here; outputs come with
// their projection probability.
#pragma once

#include "choisim/channel.hpp"

namespace choisim {

struct SuperchannelSpec {
  Matrix v;          // on head (x) ebit head
  Matrix u;          // on tail (x) ebit tail
  int head_dim = 0;  // program head dimension
  int tail_dim = 0;  // program tail dimension
  int ebit_dim = 0;

  SuperchannelSpec() = default;
  SuperchannelSpec(Matrix v_, Matrix u_, int head, int tail, int ebit);
};

SuperchannelSpec identity_superchannel(int d);
// V = (W on program head) (x) 1_e, U = 1: converts omega_E to omega_{W o E}.
SuperchannelSpec post_processing_superchannel(const Matrix& w, int tail_dim, int ebit_dim);
// U = (G on program tail) (x) 1_e: converts omega_E to omega_{E o G^t}.
SuperchannelSpec pre_processing_superchannel(const Matrix& g, int head_dim, int ebit_dim);

struct SuperchannelOutput {
  ProgramState program;
  double probability = 0.0;
};

SuperchannelOutput apply_superchannel(const SuperchannelSpec& s, const ProgramState& p,
                                      double tol = default_tol());

// Unnormalized action on an arbitrary matrix over head (x) tail (the map is
// linear; used to assemble Choi states and by the write-in round trip).
Matrix superchannel_action(const SuperchannelSpec& s, const Matrix& program_matrix);

// Dual state of the map p -> apply_superchannel(s, p), stored unit-trace on
// wires (out head, out tail, copy head, copy tail); applying it to a program
// through write_input reproduces apply_superchannel.
ProgramState choi_of_superchannel(const SuperchannelSpec& s);

struct SuperchannelReport {
  double v_unitarity_residual = 0.0;
  double u_unitarity_residual = 0.0;
  double worst_psd_violation = 0.0;            // most negative output eigenvalue
  double worst_tail_marginal_deviation = 0.0;  // || d * tail - I ||_max after renorm
  double min_probability = 1.0;
  double max_probability = 0.0;
  bool unital_tail = false;  // tail marginal preserved on random TP programs
  bool choi_form_preserved = false;
};

SuperchannelReport validate_superchannel(const SuperchannelSpec& s, int trials,
                                         uint64_t seed, double tol = 1e-8);

}  // namespace choisim
