#include "choisim/superchannel.hpp"

#include <cmath>

namespace choisim {

SuperchannelSpec::SuperchannelSpec(Matrix v_, Matrix u_, int head, int tail, int ebit)
    : v(std::move(v_)), u(std::move(u_)), head_dim(head), tail_dim(tail), ebit_dim(ebit) {
  if (head < 2 || tail < 2 || ebit < 2)
    throw DimensionError("SuperchannelSpec: dims must be >= 2");
  if (v.rows() != head * ebit || v.cols() != head * ebit)
    throw DimensionError("SuperchannelSpec: V must act on head (x) ebit head");
  if (u.rows() != tail * ebit || u.cols() != tail * ebit)
    throw DimensionError("SuperchannelSpec: U must act on tail (x) ebit tail");
}

SuperchannelSpec identity_superchannel(int d) {
  return SuperchannelSpec(Matrix::Identity(d * d, d * d), Matrix::Identity(d * d, d * d),
                          d, d, d);
}

SuperchannelSpec post_processing_superchannel(const Matrix& w, int tail_dim, int ebit_dim) {
  const int h = static_cast<int>(w.rows());
  return SuperchannelSpec(kron(w, Matrix::Identity(ebit_dim, ebit_dim)),
                          Matrix::Identity(tail_dim * ebit_dim, tail_dim * ebit_dim),
                          h, tail_dim, ebit_dim);
}

SuperchannelSpec pre_processing_superchannel(const Matrix& g, int head_dim, int ebit_dim) {
  const int t = static_cast<int>(g.rows());
  return SuperchannelSpec(Matrix::Identity(head_dim * ebit_dim, head_dim * ebit_dim),
                          kron(g, Matrix::Identity(ebit_dim, ebit_dim)),
                          head_dim, t, ebit_dim);
}

Matrix superchannel_action(const SuperchannelSpec& s, const Matrix& program_matrix) {
  const int dh = s.head_dim, dt = s.tail_dim, de = s.ebit_dim;
  if (program_matrix.rows() != dh * dt || program_matrix.cols() != dh * dt)
    throw DimensionError("superchannel_action: program matrix dims mismatch");

  DensityOperator joint(kron(program_matrix, ebit(de).to_density().matrix),
                        {dh, dt, de, de});
  joint = apply_on_wires(joint, s.v, {0, 2});
  joint = apply_on_wires(joint, s.u, {1, 3});
  DensityOperator traced = partial_trace(joint, {0, 1, 3});  // drop ebit head
  DensityOperator projected = fix_wires(traced, {2}, {0}, {0});
  return projected.matrix;  // on head (x) tail, unnormalized
}

SuperchannelOutput apply_superchannel(const SuperchannelSpec& s, const ProgramState& p,
                                      double tol) {
  if (p.head_dim() != s.head_dim || p.tail_dim() != s.tail_dim)
    throw DimensionError("apply_superchannel: program dims do not match spec");

  std::vector<int> order = p.head_wires;
  order.insert(order.end(), p.tail_wires.begin(), p.tail_wires.end());
  DensityOperator canonical = permute_wires(p.state, order);

  Matrix out = superchannel_action(s, canonical.matrix);
  const double prob = out.trace().real();
  if (prob < std::max(tol, 1e-14))
    throw ValidationError("apply_superchannel: zero projection probability (incompatible spec)");

  std::vector<int> dims = p.head_dims();
  const auto tail_dims = p.tail_dims();
  dims.insert(dims.end(), tail_dims.begin(), tail_dims.end());
  DensityOperator state(out / prob, dims);
  std::vector<int> hw(p.head_wires.size()), tw(p.tail_wires.size());
  for (size_t i = 0; i < hw.size(); ++i) hw[i] = static_cast<int>(i);
  for (size_t i = 0; i < tw.size(); ++i) tw[i] = static_cast<int>(hw.size() + i);
  SuperchannelOutput o;
  o.program = ProgramState(std::move(state), std::move(hw), std::move(tw));
  o.probability = prob;
  return o;
}

ProgramState choi_of_superchannel(const SuperchannelSpec& s) {
  const int d = s.head_dim * s.tail_dim;
  // feed half of a maximally entangled state through the program slot:
  // choi = (1/d) sum_ij S(E_ij) (x) E_ij
  Matrix choi = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix unit = Matrix::Zero(d, d);
      unit(i, j) = 1.0;
      Matrix mapped = superchannel_action(s, unit);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          choi(r * d + i, c * d + j) += mapped(r, c) / static_cast<double>(d);
    }

  const double tr = choi.trace().real();
  if (tr < 1e-14)
    throw ValidationError("choi_of_superchannel: map annihilates the ebit");
  choi /= tr;

  DensityOperator state(std::move(choi), {s.head_dim, s.tail_dim, s.head_dim, s.tail_dim});
  ProgramState out(std::move(state), {0, 1}, {2, 3});
  out.norm_factor = tr;
  return out;
}

SuperchannelReport validate_superchannel(const SuperchannelSpec& s, int trials,
                                         uint64_t seed, double tol) {
  SuperchannelReport rep;
  const int he = s.head_dim * s.ebit_dim;
  const int te = s.tail_dim * s.ebit_dim;
  rep.v_unitarity_residual =
      (s.v.adjoint() * s.v - Matrix::Identity(he, he)).cwiseAbs().maxCoeff();
  rep.u_unitarity_residual =
      (s.u.adjoint() * s.u - Matrix::Identity(te, te)).cwiseAbs().maxCoeff();

  if (s.head_dim != s.tail_dim)
    throw DimensionError("validate_superchannel: needs head_dim == tail_dim for random programs");

  Rng rng(seed);
  const int d = s.tail_dim;
  for (int t = 0; t < trials; ++t) {
    Channel ch = random_channel(d, d, 1 + t % d, rng);
    auto out = apply_superchannel(s, choi_of(ch), 1e-12);

    auto [vals, vecs] = eig_hermitian(out.program.state.matrix);
    rep.worst_psd_violation = std::min(rep.worst_psd_violation, vals.minCoeff());
    Matrix dev = static_cast<double>(d) * out.program.tail_marginal().matrix -
                 Matrix::Identity(d, d);
    rep.worst_tail_marginal_deviation =
        std::max(rep.worst_tail_marginal_deviation, dev.cwiseAbs().maxCoeff());
    rep.min_probability = std::min(rep.min_probability, out.probability);
    rep.max_probability = std::max(rep.max_probability, out.probability);
  }
  rep.unital_tail = rep.worst_tail_marginal_deviation <= tol;
  rep.choi_form_preserved = rep.unital_tail && rep.worst_psd_violation >= -tol;
  return rep;
}

}  // namespace choisim
