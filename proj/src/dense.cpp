#include "choisim/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <sstream>

namespace choisim {

double default_tol() {
  static const double tol = [] {
    if (const char* env = std::getenv("CHOISIM_TOL")) {
      char* end = nullptr;
      double v = std::strtod(env, &end);
      if (end != env && v > 0) return v;
    }
    return kDefaultTol;
  }();
  return tol;
}

int product_of(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionError("wire dimension must be >= 1");
    p *= d;
  }
  return p;
}

namespace {

std::vector<int> strides_of(const std::vector<int>& dims) {
  std::vector<int> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * dims[i + 1];
  return s;
}

void check_wires(const std::vector<int>& wires, int n) {
  for (int w : wires)
    if (w < 0 || w >= n) throw DimensionError("wire index out of range");
  std::vector<int> sorted = wires;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DimensionError("duplicate wire index");
}

}  // namespace

bool is_hermitian(const Matrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Matrix d = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

void validate_density(const DensityOperator& rho, double tol, bool allow_subnormalized) {
  if (rho.matrix.rows() != rho.matrix.cols())
    throw ValidationError("state matrix is not square");
  if (rho.matrix.rows() != product_of(rho.dims))
    throw ValidationError("state dims do not match matrix side");
  if (!is_hermitian(rho.matrix, tol))
    throw ValidationError("state is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw ValidationError("state has negative eigenvalue beyond tolerance");
  double tr = rho.matrix.trace().real();
  if (allow_subnormalized) {
    if (tr <= 0.0 || tr > 1.0 + tol)
      throw ValidationError("subnormalized state trace must lie in (0, 1]");
  } else if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "state trace " << tr << " deviates from 1 beyond tolerance";
    throw ValidationError(os.str());
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityOperator kron(const DensityOperator& a, const DensityOperator& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  DensityOperator out(kron(a.matrix, b.matrix), dims);
  if (!a.labels.empty() || !b.labels.empty()) {
    out.labels.resize(dims.size());
    for (size_t i = 0; i < a.dims.size(); ++i)
      out.labels[i] = i < a.labels.size() ? a.labels[i] : "";
    for (size_t i = 0; i < b.dims.size(); ++i)
      out.labels[a.dims.size() + i] = i < b.labels.size() ? b.labels[i] : "";
  }
  return out;
}

PureState kron(const PureState& a, const PureState& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  Vector v(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    v.segment(static_cast<Eigen::Index>(i) * b.dim(), b.dim()) = a.vector(i) * b.vector;
  return PureState(std::move(v), std::move(dims));
}

DensityOperator partial_trace(const DensityOperator& m, const std::vector<int>& keep) {
  const int n = m.wire_count();
  check_wires(keep, n);
  std::vector<bool> kept(n, false);
  for (int w : keep) kept[w] = true;

  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  std::vector<int> traced;
  for (int w = 0; w < n; ++w)
    if (!kept[w]) traced.push_back(w);

  const auto strides = strides_of(m.dims);
  std::vector<int> keep_dims, traced_dims;
  for (int w : keep_sorted) keep_dims.push_back(m.dims[w]);
  for (int w : traced) traced_dims.push_back(m.dims[w]);
  const int dk = product_of(keep_dims);
  const int dt = product_of(traced_dims);

  // base offset of a flat multi-index over the listed wires
  auto offset = [&](const std::vector<int>& wires, const std::vector<int>& wdims, int flat) {
    int off = 0;
    for (int i = static_cast<int>(wires.size()) - 1; i >= 0; --i) {
      off += (flat % wdims[i]) * strides[wires[i]];
      flat /= wdims[i];
    }
    return off;
  };

  Matrix out = Matrix::Zero(dk, dk);
  for (int r = 0; r < dk; ++r) {
    const int ro = offset(keep_sorted, keep_dims, r);
    for (int c = 0; c < dk; ++c) {
      const int co = offset(keep_sorted, keep_dims, c);
      Complex sum = 0.0;
      for (int t = 0; t < dt; ++t) {
        const int to = offset(traced, traced_dims, t);
        sum += m.matrix(ro + to, co + to);
      }
      out(r, c) = sum;
    }
  }
  return DensityOperator(std::move(out), keep_dims);
}

DensityOperator partial_transpose(const DensityOperator& m, const std::vector<int>& part) {
  const int n = m.wire_count();
  check_wires(part, n);
  std::vector<bool> flip(n, false);
  for (int w : part) flip[w] = true;
  const auto strides = strides_of(m.dims);
  const int d = m.dim();

  Matrix out(d, d);
  std::vector<int> ri(n), ci(n);
  for (int r = 0; r < d; ++r) {
    int rr = r;
    for (int w = 0; w < n; ++w) { ri[w] = rr / strides[w]; rr %= strides[w]; }
    for (int c = 0; c < d; ++c) {
      int cc = c;
      for (int w = 0; w < n; ++w) { ci[w] = cc / strides[w]; cc %= strides[w]; }
      int nr = 0, nc = 0;
      for (int w = 0; w < n; ++w) {
        nr += (flip[w] ? ci[w] : ri[w]) * strides[w];
        nc += (flip[w] ? ri[w] : ci[w]) * strides[w];
      }
      out(nr, nc) = m.matrix(r, c);
    }
  }
  return DensityOperator(std::move(out), m.dims);
}

namespace {

// flat-index remapping for a wire permutation; order[i] = old wire at new slot i
std::vector<int> permutation_map(const std::vector<int>& dims, const std::vector<int>& order) {
  const int n = static_cast<int>(dims.size());
  check_wires(order, n);
  if (static_cast<int>(order.size()) != n)
    throw DimensionError("permutation must list every wire");
  std::vector<int> new_dims(n);
  for (int i = 0; i < n; ++i) new_dims[i] = dims[order[i]];
  const auto old_strides = strides_of(dims);
  const auto new_strides = strides_of(new_dims);
  const int d = product_of(dims);
  std::vector<int> map(d);
  std::vector<int> idx(n);
  for (int f = 0; f < d; ++f) {
    int rest = f;
    for (int w = 0; w < n; ++w) { idx[w] = rest / old_strides[w]; rest %= old_strides[w]; }
    int nf = 0;
    for (int i = 0; i < n; ++i) nf += idx[order[i]] * new_strides[i];
    map[f] = nf;
  }
  return map;
}

}  // namespace

DensityOperator permute_wires(const DensityOperator& m, const std::vector<int>& order) {
  const auto map = permutation_map(m.dims, order);
  const int d = m.dim();
  Matrix out(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      out(map[r], map[c]) = m.matrix(r, c);
  std::vector<int> new_dims(order.size());
  for (size_t i = 0; i < order.size(); ++i) new_dims[i] = m.dims[order[i]];
  DensityOperator res(std::move(out), new_dims);
  if (!m.labels.empty()) {
    res.labels.resize(order.size());
    for (size_t i = 0; i < order.size(); ++i)
      res.labels[i] = order[i] < static_cast<int>(m.labels.size()) ? m.labels[order[i]] : "";
  }
  return res;
}

PureState permute_wires(const PureState& s, const std::vector<int>& order) {
  const auto map = permutation_map(s.dims, order);
  Vector out(s.dim());
  for (int i = 0; i < s.dim(); ++i) out(map[i]) = s.vector(i);
  std::vector<int> new_dims(order.size());
  for (size_t i = 0; i < order.size(); ++i) new_dims[i] = s.dims[order[i]];
  return PureState(std::move(out), std::move(new_dims));
}

DensityOperator fix_wires(const DensityOperator& m, const std::vector<int>& wires,
                          const std::vector<int>& row_vals, const std::vector<int>& col_vals) {
  const int n = m.wire_count();
  check_wires(wires, n);
  if (wires.size() != row_vals.size() || wires.size() != col_vals.size())
    throw DimensionError("fix_wires: value count mismatch");
  const auto strides = strides_of(m.dims);

  std::vector<bool> fixed(n, false);
  int row_base = 0, col_base = 0;
  for (size_t i = 0; i < wires.size(); ++i) {
    const int w = wires[i];
    if (row_vals[i] < 0 || row_vals[i] >= m.dims[w] || col_vals[i] < 0 || col_vals[i] >= m.dims[w])
      throw DimensionError("fix_wires: basis value out of range");
    fixed[w] = true;
    row_base += row_vals[i] * strides[w];
    col_base += col_vals[i] * strides[w];
  }

  std::vector<int> rest, rest_dims;
  for (int w = 0; w < n; ++w)
    if (!fixed[w]) { rest.push_back(w); rest_dims.push_back(m.dims[w]); }
  const int dr = product_of(rest_dims);

  auto offset = [&](int flat) {
    int off = 0;
    for (int i = static_cast<int>(rest.size()) - 1; i >= 0; --i) {
      off += (flat % rest_dims[i]) * strides[rest[i]];
      flat /= rest_dims[i];
    }
    return off;
  };

  Matrix out(dr, dr);
  for (int r = 0; r < dr; ++r) {
    const int ro = row_base + offset(r);
    for (int c = 0; c < dr; ++c)
      out(r, c) = m.matrix(ro, col_base + offset(c));
  }
  return DensityOperator(std::move(out), rest_dims);
}

Matrix embed_on_wires(const Matrix& gate, const std::vector<int>& dims,
                      const std::vector<int>& wires) {
  const int n = static_cast<int>(dims.size());
  check_wires(wires, n);
  std::vector<int> gate_dims;
  for (int w : wires) gate_dims.push_back(dims[w]);
  const int dg = product_of(gate_dims);
  if (gate.rows() != dg || gate.cols() != dg)
    throw DimensionError("embed_on_wires: gate size does not match target wires");

  const auto strides = strides_of(dims);
  const int d = product_of(dims);

  // sub(f): flat index of f restricted to the gate wires; rest(f): the rest
  std::vector<int> sub(d), rest(d);
  std::vector<int> gstr = strides_of(gate_dims);
  for (int f = 0; f < d; ++f) {
    int s = 0, r = f;
    for (size_t i = 0; i < wires.size(); ++i) {
      const int v = (f / strides[wires[i]]) % dims[wires[i]];
      s += v * gstr[i];
      r -= v * strides[wires[i]];
    }
    sub[f] = s;
    rest[f] = r;
  }

  Matrix out = Matrix::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (rest[r] == rest[c]) out(r, c) = gate(sub[r], sub[c]);
  return out;
}

DensityOperator apply_on_wires(const DensityOperator& rho, const Matrix& gate,
                               const std::vector<int>& wires) {
  Matrix u = embed_on_wires(gate, rho.dims, wires);
  DensityOperator out(u * rho.matrix * u.adjoint(), rho.dims);
  out.labels = rho.labels;
  return out;
}

PureState apply_on_wires(const PureState& s, const Matrix& gate, const std::vector<int>& wires) {
  Matrix u = embed_on_wires(gate, s.dims, wires);
  return PureState(u * s.vector, s.dims);
}

std::pair<RealVector, Matrix> eig_hermitian(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw Error("eig_hermitian: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix psd_sqrt(const Matrix& m, double tol) {
  auto [vals, vecs] = eig_hermitian(m);
  RealVector s(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    double v = vals(i);
    if (v < -tol) throw ValidationError("psd_sqrt: matrix has negative eigenvalue beyond tolerance");
    s(i) = std::sqrt(std::max(v, 0.0));
  }
  return vecs * s.asDiagonal() * vecs.adjoint();
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionError("fidelity: dimension mismatch");
  Matrix s = psd_sqrt(rho.matrix, 1e-7);
  Matrix inner = s * sigma.matrix * s;
  auto [vals, vecs] = eig_hermitian(inner);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    acc += std::sqrt(std::max(vals(i), 0.0));
  return std::min(acc * acc, 1.0 + 1e-9);
}

double trace_norm_hermitian(const Matrix& m) {
  auto [vals, vecs] = eig_hermitian(m);
  return vals.cwiseAbs().sum();
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionError("trace_distance: dimension mismatch");
  return 0.5 * trace_norm_hermitian(rho.matrix - sigma.matrix);
}

double von_neumann_entropy(const DensityOperator& rho, double tol) {
  auto [vals, vecs] = eig_hermitian(rho.matrix);
  double h = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    double p = vals(i);
    if (p < -tol) throw ValidationError("entropy of a non-PSD operator");
    if (p > 0) h -= p * std::log(p);
  }
  return h;
}

double gaussian(Rng& rng) {
  // Box-Muller; uses two 53-bit uniforms per pair, cached odd call.
  thread_local bool have = false;
  thread_local double spare = 0.0;
  if (have) {
    have = false;
    return spare;
  }
  double u1, u2;
  do {
    u1 = (rng() >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  u2 = (rng() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare = r * std::sin(th);
  have = true;
  return r * std::cos(th);
}

Matrix ginibre(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      g(i, j) = Complex(gaussian(rng), gaussian(rng)) / std::sqrt(2.0);
  return g;
}

Matrix haar_random_unitary(int d, Rng& rng) {
  if (d < 1) throw DimensionError("haar_random_unitary: d must be >= 1");
  Matrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex rii = r(i, i);
    double mag = std::abs(rii);
    q.col(i) *= (mag > 0) ? rii / mag : Complex(1.0, 0.0);
  }
  return q;
}

DensityOperator random_density(int d, Rng& rng) {
  if (d < 1) throw DimensionError("random_density: d must be >= 1");
  Matrix g = ginibre(d, d, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityOperator(std::move(rho), {d});
}

PureState random_pure(int d, Rng& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(gaussian(rng), gaussian(rng));
  v.normalize();
  return PureState(std::move(v), {d});
}

}  // namespace choisim
