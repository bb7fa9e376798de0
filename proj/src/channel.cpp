#include "choisim/channel.hpp"

#include <cmath>
#include <numeric>

namespace choisim {

namespace {

// Kraus dims: every operator d_out x d_in, at least one of them.
void check_kraus(const std::vector<Matrix>& kraus) {
  if (kraus.empty()) throw ValidationError("channel needs at least one Kraus operator");
  for (const auto& k : kraus)
    if (k.rows() != kraus[0].rows() || k.cols() != kraus[0].cols())
      throw DimensionError("Kraus operators must share dimensions");
}

Matrix choi_from_kraus(const std::vector<Matrix>& kraus) {
  const int dout = static_cast<int>(kraus[0].rows());
  const int din = static_cast<int>(kraus[0].cols());
  Matrix choi = Matrix::Zero(dout * din, dout * din);
  for (const auto& k : kraus) {
    Vector v(dout * din);
    for (int a = 0; a < dout; ++a)
      for (int i = 0; i < din; ++i)
        v(a * din + i) = k(a, i) / std::sqrt(static_cast<double>(din));
    choi += v * v.adjoint();
  }
  return choi;
}

}  // namespace

Matrix Channel::choi_matrix() const {
  if (choi) return *choi;
  check_kraus(kraus);
  return choi_from_kraus(kraus);
}

std::vector<Matrix> Channel::kraus_ops(double tol) const {
  if (!kraus.empty()) return kraus;
  if (!choi) throw ValidationError("channel has neither Kraus nor Choi representation");
  // scaled-Choi eigendecomposition; eigenvalues below 1e-12 dropped to
  // avoid near-null Kraus operators
  Matrix m = static_cast<double>(dim_in) * (*choi);
  auto [vals, vecs] = eig_hermitian(m);
  std::vector<Matrix> ops;
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    const double lam = vals(k);
    if (lam < -tol) throw ValidationError("Choi matrix not PSD: channel is not CP");
    if (lam < 1e-12) continue;
    Matrix op(dim_out, dim_in);
    for (int a = 0; a < dim_out; ++a)
      for (int i = 0; i < dim_in; ++i)
        op(a, i) = std::sqrt(lam) * vecs(a * dim_in + i, k);
    ops.push_back(std::move(op));
  }
  if (ops.empty()) throw ValidationError("channel has numerically zero Choi matrix");
  return ops;
}

Channel channel_from_kraus(std::vector<Matrix> kraus) {
  check_kraus(kraus);
  Channel ch;
  ch.dim_out = static_cast<int>(kraus[0].rows());
  ch.dim_in = static_cast<int>(kraus[0].cols());
  ch.kraus = std::move(kraus);
  return ch;
}

Channel unitary_channel(const Matrix& u) {
  if (!is_unitary(u, 1e-8))
    throw ValidationError("unitary_channel: matrix is not unitary");
  return channel_from_kraus({u});
}

Channel depolarizing_channel(int d, double p) {
  if (d < 2) throw DimensionError("depolarizing_channel: d must be >= 2");
  if (p < 0.0 || p > 1.0) throw ValidationError("depolarizing_channel: p must lie in [0, 1]");
  std::vector<Matrix> kraus;
  if (p < 1.0) kraus.push_back(std::sqrt(1.0 - p) * Matrix::Identity(d, d));
  if (p > 0.0) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Matrix k = Matrix::Zero(d, d);
        k(i, j) = std::sqrt(p / d);
        kraus.push_back(std::move(k));
      }
  }
  return channel_from_kraus(std::move(kraus));
}

Channel random_channel(int dim_in, int dim_out, int kraus_rank, Rng& rng) {
  if (dim_in < 1 || dim_out < 1 || kraus_rank < 1)
    throw DimensionError("random_channel: dims and rank must be >= 1");
  Matrix u = haar_random_unitary(dim_out * kraus_rank, rng);
  Matrix v = u.leftCols(dim_in);  // isometry C^din -> C^dout (x) C^rank
  std::vector<Matrix> kraus;
  for (int k = 0; k < kraus_rank; ++k) {
    Matrix op(dim_out, dim_in);
    for (int a = 0; a < dim_out; ++a) op.row(a) = v.row(a * kraus_rank + k);
    kraus.push_back(std::move(op));
  }
  return channel_from_kraus(std::move(kraus));
}

Channel random_eb_channel(int d, int n_outcomes, Rng& rng) {
  if (n_outcomes < 1) throw DimensionError("random_eb_channel: need outcomes");
  // POVM {F_i}: random PSD pieces normalized by S^{-1/2} . S^{-1/2}
  std::vector<Matrix> pieces;
  Matrix total = Matrix::Zero(d, d);
  for (int i = 0; i < n_outcomes; ++i) {
    Matrix g = ginibre(d, d, rng);
    pieces.push_back(g * g.adjoint());
    total += pieces.back();
  }
  auto [vals, vecs] = eig_hermitian(total);
  RealVector inv_sqrt(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    inv_sqrt(i) = 1.0 / std::sqrt(std::max(vals(i), 1e-300));
  Matrix norm = vecs * inv_sqrt.asDiagonal() * vecs.adjoint();

  // Kraus set: K_{i,a,b} = sqrt(lam_a mu_b) |s_ia><f_ib| realizes
  // E(rho) = sum_i tr(F_i rho) sigma_i
  std::vector<Matrix> kraus;
  for (int i = 0; i < n_outcomes; ++i) {
    Matrix f = norm * pieces[i] * norm;
    DensityOperator sigma = random_density(d, rng);
    auto [fv, fb] = eig_hermitian(f);
    auto [sv, sb] = eig_hermitian(sigma.matrix);
    for (Eigen::Index a = 0; a < sv.size(); ++a) {
      if (sv(a) < 1e-14) continue;
      for (Eigen::Index b = 0; b < fv.size(); ++b) {
        if (fv(b) < 1e-14) continue;
        Matrix k = std::sqrt(sv(a) * fv(b)) * sb.col(a) * fb.col(b).adjoint();
        kraus.push_back(std::move(k));
      }
    }
  }
  return channel_from_kraus(std::move(kraus));
}

ProgramState::ProgramState(DensityOperator s, std::vector<int> head, std::vector<int> tail)
    : state(std::move(s)), head_wires(std::move(head)), tail_wires(std::move(tail)) {
  std::vector<bool> seen(state.dims.size(), false);
  for (int w : head_wires) {
    if (w < 0 || w >= state.wire_count() || seen[w])
      throw DimensionError("ProgramState: bad head wire list");
    seen[w] = true;
  }
  for (int w : tail_wires) {
    if (w < 0 || w >= state.wire_count() || seen[w])
      throw DimensionError("ProgramState: bad tail wire list");
    seen[w] = true;
  }
  for (bool s_ : seen)
    if (!s_) throw DimensionError("ProgramState: head/tail must partition the wires");
}

int ProgramState::head_dim() const { return product_of(head_dims()); }
int ProgramState::tail_dim() const { return product_of(tail_dims()); }

std::vector<int> ProgramState::head_dims() const {
  std::vector<int> d;
  for (int w : head_wires) d.push_back(state.dims[w]);
  return d;
}

std::vector<int> ProgramState::tail_dims() const {
  std::vector<int> d;
  for (int w : tail_wires) d.push_back(state.dims[w]);
  return d;
}

PureState ebit(int d) {
  if (d < 2) throw DimensionError("ebit: d must be >= 2");
  Vector v = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureState(std::move(v), {d, d});
}

ProgramState choi_of(const Channel& ch, double tol) {
  CptpReport rep = is_cptp(ch, tol);
  if (!rep.ok()) throw ValidationError("choi_of: channel is not CPTP within tolerance");
  Matrix choi = ch.choi_matrix();
  DensityOperator state(std::move(choi), {ch.dim_out, ch.dim_in});
  return ProgramState(std::move(state), {0}, {1});
}

Channel channel_from_choi(const ProgramState& p, double tol) {
  // canonicalize wire order to head group then tail group
  std::vector<int> order = p.head_wires;
  order.insert(order.end(), p.tail_wires.begin(), p.tail_wires.end());
  DensityOperator canonical = permute_wires(p.state, order);

  const int dout = p.head_dim();
  const int din = p.tail_dim();

  DensityOperator flat(canonical.matrix, {dout, din});
  DensityOperator tail = partial_trace(flat, {1});
  Matrix dev = static_cast<double>(din) * tail.matrix - Matrix::Identity(din, din);
  if (dev.cwiseAbs().maxCoeff() > std::max(tol, 1e-7))
    throw ValidationError("channel_from_choi: tail marginal deviates from I/d (non-TP program)");

  Channel ch;
  ch.dim_out = dout;
  ch.dim_in = din;
  ch.choi = flat.matrix;
  ch.kraus = ch.kraus_ops(tol);
  return ch;
}

DensityOperator apply(const Channel& ch, const DensityOperator& rho) {
  if (rho.dim() != ch.dim_in)
    throw DimensionError("apply: state dimension does not match channel input");
  Matrix out = Matrix::Zero(ch.dim_out, ch.dim_out);
  for (const auto& k : ch.kraus_ops())
    out += k * rho.matrix * k.adjoint();
  return DensityOperator(std::move(out), {ch.dim_out});
}

CptpReport is_cptp(const Channel& ch, double tol) {
  CptpReport rep;
  if (!ch.kraus.empty()) {
    Matrix acc = Matrix::Zero(ch.dim_in, ch.dim_in);
    for (const auto& k : ch.kraus) acc += k.adjoint() * k;
    rep.tp_residual = (acc - Matrix::Identity(ch.dim_in, ch.dim_in)).cwiseAbs().maxCoeff();
  } else {
    Matrix choi = ch.choi_matrix();
    DensityOperator tail =
        partial_trace(DensityOperator(choi, {ch.dim_out, ch.dim_in}), {1});
    rep.tp_residual = (static_cast<double>(ch.dim_in) * tail.matrix -
                       Matrix::Identity(ch.dim_in, ch.dim_in))
                          .cwiseAbs()
                          .maxCoeff();
  }
  Matrix choi = ch.choi_matrix();
  auto [vals, vecs] = eig_hermitian(choi);
  rep.choi_min_eigenvalue = vals.minCoeff();
  rep.trace_preserving = rep.tp_residual <= tol;
  rep.completely_positive = rep.choi_min_eigenvalue >= -tol;
  return rep;
}

ProgramState gate_program(const Matrix& u) { return choi_of(unitary_channel(u)); }

ProgramState as_qubit_program(const ProgramState& p) {
  std::vector<int> order = p.head_wires;
  order.insert(order.end(), p.tail_wires.begin(), p.tail_wires.end());
  DensityOperator canonical = permute_wires(p.state, order);

  auto split = [](const std::vector<int>& dims) {
    std::vector<int> out;
    for (int d : dims) {
      while (d > 1) {
        if (d % 2 != 0)
          throw DimensionError("as_qubit_program: wire dim is not a power of two");
        out.push_back(2);
        d /= 2;
      }
    }
    return out;
  };
  std::vector<int> head = split(p.head_dims());
  std::vector<int> tail = split(p.tail_dims());
  std::vector<int> dims = head;
  dims.insert(dims.end(), tail.begin(), tail.end());

  // row-major nesting is unchanged by refining contiguous wires
  DensityOperator reshaped(canonical.matrix, dims);
  std::vector<int> hw(head.size()), tw(tail.size());
  std::iota(hw.begin(), hw.end(), 0);
  std::iota(tw.begin(), tw.end(), static_cast<int>(head.size()));
  ProgramState out(std::move(reshaped), std::move(hw), std::move(tw));
  out.norm_factor = p.norm_factor;
  return out;
}

ProgramState identity_program(int d, int n_wires) {
  if (n_wires < 1) throw DimensionError("identity_program: n_wires must be >= 1");
  PureState acc = ebit(d);
  for (int i = 1; i < n_wires; ++i) acc = kron(acc, ebit(d));
  // wires currently (h0, t0, h1, t1, ...): regroup heads first
  std::vector<int> order;
  for (int i = 0; i < n_wires; ++i) order.push_back(2 * i);
  for (int i = 0; i < n_wires; ++i) order.push_back(2 * i + 1);
  PureState grouped = permute_wires(acc, order);
  std::vector<int> head(n_wires), tail(n_wires);
  std::iota(head.begin(), head.end(), 0);
  std::iota(tail.begin(), tail.end(), n_wires);
  return ProgramState(grouped.to_density(), head, tail);
}

}  // namespace choisim
