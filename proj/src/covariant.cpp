#include "choisim/covariant.hpp"

#include "choisim/gates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace choisim {

namespace {

Matrix quaternion_to_su2(double a, double b, double c, double d) {
  Matrix u(2, 2);
  u << Complex(a, b), Complex(c, d), Complex(-c, d), Complex(a, -b);
  return u;
}

std::vector<std::array<double, 4>> icosahedral_quaternions() {
  std::vector<std::array<double, 4>> qs;
  // 8 unit-axis quaternions
  for (int axis = 0; axis < 4; ++axis)
    for (int sign : {1, -1}) {
      std::array<double, 4> q{0, 0, 0, 0};
      q[axis] = sign;
      qs.push_back(q);
    }
  // 16 half-integer quaternions
  for (int mask = 0; mask < 16; ++mask) {
    std::array<double, 4> q;
    for (int i = 0; i < 4; ++i) q[i] = (mask >> i & 1) ? -0.5 : 0.5;
    qs.push_back(q);
  }
  // 96 even permutations of (phi, 1, 1/phi, 0) / 2 with all sign choices
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::array<double, 4> base{phi / 2.0, 0.5, 1.0 / (2.0 * phi), 0.0};
  static const int even_perms[12][4] = {
      {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0},
      {1, 2, 0, 3}, {2, 0, 1, 3}, {0, 3, 1, 2}, {3, 0, 2, 1},
      {3, 1, 0, 2}, {1, 3, 2, 0}, {2, 1, 3, 0}, {0, 2, 3, 1}};
  for (const auto& perm : even_perms) {
    for (int mask = 0; mask < 8; ++mask) {
      std::array<double, 4> q;
      int bit = 0;
      for (int i = 0; i < 4; ++i) {
        double v = base[perm[i]];
        if (v != 0.0) {
          if (mask >> bit & 1) v = -v;
          ++bit;
        }
        q[i] = v;
      }
      qs.push_back(q);
    }
  }
  return qs;
}

Matrix kron_power(const Matrix& u, int n) {
  Matrix acc = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) acc = kron(acc, u);
  return acc;
}

Vector vec_of(const Matrix& m) {
  Vector v(m.rows() * m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
  return v;
}

Matrix unvec(const Vector& v, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = v(r * cols + c);
  return m;
}

double fidelity_weight(const Matrix& w, int d) {
  const double t = std::norm(w.trace());
  return (d + t) / (d * (d + 1.0));
}

std::vector<std::pair<Matrix, double>> make_sample(PovmSampling sampling, int d,
                                                   int mc_samples, uint64_t seed) {
  std::vector<std::pair<Matrix, double>> sample;
  if (sampling == PovmSampling::Design) {
    if (d != 2)
      throw ValidationError("design sampling is available for d = 2 only");
    const auto& des = su2_icosahedral_design();
    for (const auto& u : des) sample.push_back({u, 1.0 / des.size()});
  } else {
    if (mc_samples < 1) throw ValidationError("need at least one Haar sample");
    Rng rng(seed);
    for (int i = 0; i < mc_samples; ++i)
      sample.push_back({haar_random_unitary(d, rng), 1.0 / mc_samples});
  }
  return sample;
}

struct Twirl {
  Matrix mean;     // integral of (W^n (x) 1) |phi><phi| (W^n (x) 1)^dag
  Matrix support;  // projector onto the invariant span
  Matrix inv_sqrt; // pseudo-inverse square root of the mean
};

Twirl twirl_of(const PureState& phi, int n, int d,
               const std::vector<std::pair<Matrix, double>>& sample) {
  const int prog_dim = static_cast<int>(std::llround(std::pow(d, n)));
  Matrix m_phi = unvec(phi.vector, prog_dim, prog_dim);
  const int full = prog_dim * prog_dim;
  Matrix mean = Matrix::Zero(full, full);
  for (const auto& [w, weight] : sample) {
    Vector rotated = vec_of(kron_power(w, n) * m_phi);
    mean += weight * (rotated * rotated.adjoint());
  }

  Twirl t;
  t.mean = mean;
  auto [vals, vecs] = eig_hermitian(mean);
  Matrix support = Matrix::Zero(full, full);
  Matrix inv_sqrt = Matrix::Zero(full, full);
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < 1e-12) continue;
    support += vecs.col(i) * vecs.col(i).adjoint();
    inv_sqrt += vecs.col(i) * vecs.col(i).adjoint() / std::sqrt(vals(i));
  }
  t.support = std::move(support);
  t.inv_sqrt = std::move(inv_sqrt);
  return t;
}

CovariantPOVM povm_from_twirl(const PureState& phi, int n, int d,
                              const std::vector<std::pair<Matrix, double>>& sample) {
  Twirl t = twirl_of(phi, n, d, sample);
  CovariantPOVM povm;
  povm.n = n;
  povm.d = d;
  povm.sample = sample;
  povm.seed_vector = PureState(t.inv_sqrt * phi.vector, phi.dims);
  povm.support_projector = t.support;

  const int prog_dim = static_cast<int>(std::llround(std::pow(d, n)));
  Matrix m_eta = unvec(povm.seed_vector.vector, prog_dim, prog_dim);
  Matrix acc = Matrix::Zero(t.support.rows(), t.support.cols());
  for (const auto& [w, weight] : sample) {
    Vector eta_w = vec_of(kron_power(w, n) * m_eta);
    acc += weight * (eta_w * eta_w.adjoint());
  }
  povm.completeness_residual = (acc - t.support).cwiseAbs().maxCoeff();
  return povm;
}

double fidelity_of(const PureState& phi, const CovariantPOVM& povm) {
  const int n = povm.n, d = povm.d;
  const int prog_dim = static_cast<int>(std::llround(std::pow(d, n)));
  Matrix m_phi = unvec(phi.vector, prog_dim, prog_dim);
  Matrix m_eta = unvec(povm.seed_vector.vector, prog_dim, prog_dim);
  double f = 0.0;
  for (const auto& [w, weight] : povm.sample) {
    // <eta| (W^n (x) 1) |phi> = tr(M_eta^dag W^n M_phi)
    const Complex amp = (m_eta.adjoint() * kron_power(w, n) * m_phi).trace();
    f += weight * std::norm(amp) * fidelity_weight(w, d);
  }
  return f;
}

PureState phi_from_sectors(int n, const Eigen::VectorXd& coeffs,
                           const std::vector<Matrix>& sectors) {
  const int prog_dim = 1 << n;
  Matrix m = Matrix::Zero(prog_dim, prog_dim);
  for (size_t j = 0; j < sectors.size(); ++j) m += coeffs(j) * sectors[j];
  Vector v = vec_of(m);
  const double norm = v.norm();
  if (norm < 1e-15) throw ValidationError("phi ansatz collapsed to zero");
  v /= norm;
  std::vector<int> dims(2 * n, 2);
  return PureState(std::move(v), std::move(dims));
}

}  // namespace

const std::vector<Matrix>& su2_icosahedral_design() {
  static const std::vector<Matrix> design = [] {
    std::vector<Matrix> out;
    for (const auto& q : icosahedral_quaternions())
      out.push_back(quaternion_to_su2(q[0], q[1], q[2], q[3]));
    return out;
  }();
  return design;
}

std::vector<Matrix> spin_sector_projectors(int n) {
  if (n < 1) throw DimensionError("spin_sector_projectors: n must be >= 1");
  const int dim = 1 << n;
  std::vector<int> dims(n, 2);
  Matrix jx = Matrix::Zero(dim, dim), jy = jx, jz = jx;
  for (int i = 0; i < n; ++i) {
    jx += embed_on_wires(0.5 * pauli_x(), dims, {i});
    jy += embed_on_wires(0.5 * pauli_y(), dims, {i});
    jz += embed_on_wires(0.5 * pauli_z(), dims, {i});
  }
  Matrix j2 = jx * jx + jy * jy + jz * jz;
  auto [vals, vecs] = eig_hermitian(j2);

  // group eigenvectors by j(j+1); j runs n/2, n/2 - 1, ...
  std::vector<double> j_values;
  for (int k = n; k >= 0; k -= 2) j_values.push_back(k / 2.0);
  std::vector<Matrix> projectors;
  for (double j : j_values) {
    const double target = j * (j + 1.0);
    Matrix p = Matrix::Zero(dim, dim);
    bool nonempty = false;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      if (std::abs(vals(i) - target) < 0.5) {
        p += vecs.col(i) * vecs.col(i).adjoint();
        nonempty = true;
      }
    }
    if (nonempty) projectors.push_back(std::move(p));
  }
  return projectors;
}

SealedProgram build_program_state(const Matrix& u, const ProgramStateFamily& fam) {
  if (u.rows() != fam.d || u.cols() != fam.d)
    throw DimensionError("build_program_state: unitary dim mismatch");
  const int prog_dim = static_cast<int>(std::llround(std::pow(fam.d, fam.n)));
  Matrix m_phi = unvec(fam.phi.vector, prog_dim, prog_dim);
  Vector v = vec_of(kron_power(u, fam.n) * m_phi);
  SealedProgram p;
  p.state = PureState(std::move(v), fam.phi.dims);
  p.n = fam.n;
  p.d = fam.d;
  return p;
}

CovariantPOVM build_covariant_povm(const ProgramStateFamily& fam, PovmSampling sampling,
                                   int mc_samples, uint64_t seed,
                                   double residual_threshold) {
  if (sampling == PovmSampling::Design && fam.n > 4)
    throw ValidationError("design integration is exact only up to n = 4");
  auto sample = make_sample(sampling, fam.d, mc_samples, seed);
  CovariantPOVM povm = povm_from_twirl(fam.phi, fam.n, fam.d, sample);
  if (povm.completeness_residual > residual_threshold)
    throw ValidationError("covariant POVM rejected: completeness residual " +
                          std::to_string(povm.completeness_residual));
  return povm;
}

double average_decode_fidelity(const ProgramStateFamily& fam, const CovariantPOVM& povm) {
  return fidelity_of(fam.phi, povm);
}

DecodeResult decode(const DensityOperator& data, const SealedProgram& program,
                    const CovariantPOVM& povm) {
  if (data.dim() != povm.d) throw DimensionError("decode: data must be one qudit");
  if (program.state.dim() != povm.seed_vector.dim())
    throw DimensionError("decode: program does not match the POVM family");
  const int n = povm.n, d = povm.d;
  const int prog_dim = static_cast<int>(std::llround(std::pow(d, n)));
  Matrix m_p = unvec(program.state.vector, prog_dim, prog_dim);
  Matrix m_eta = unvec(povm.seed_vector.vector, prog_dim, prog_dim);

  Matrix out = Matrix::Zero(d, d);
  double total = 0.0;
  for (const auto& [w, weight] : povm.sample) {
    const Complex amp = (m_eta.adjoint() * kron_power(w, n) * m_p).trace();
    const double q = weight * std::norm(amp);
    if (q == 0.0) continue;
    out += q * (w * data.matrix * w.adjoint());
    total += q;
  }
  DecodeResult res;
  res.output = DensityOperator(std::move(out), {d});
  res.total_probability = total;
  return res;
}

DecodeResult decode(const PureState& data, const SealedProgram& program,
                    const CovariantPOVM& povm) {
  return decode(data.to_density(), program, povm);
}

std::pair<PureState, SealedProgram> encode_isometry(const Matrix& u,
                                                    const ProgramStateFamily& fam,
                                                    const PureState& f) {
  if (f.dim() != fam.d) throw DimensionError("encode_isometry: data must be one qudit");
  PureState data(u.adjoint() * f.vector, f.dims);
  return {std::move(data), build_program_state(u, fam)};
}

DecodeResult blind_compose(const std::vector<SealedProgram>& programs,
                           const PureState& data, const CovariantPOVM& povm) {
  if (programs.empty())
    throw ValidationError("blind_compose: need at least one program");
  DensityOperator rho = data.to_density();
  double total = 1.0;
  for (const auto& p : programs) {
    DecodeResult stage = decode(rho, p, povm);
    total *= stage.total_probability;
    rho = stage.output;
    const double tr = rho.trace_real();
    if (tr > 1e-15) rho.matrix /= tr;
  }
  DecodeResult res;
  res.output = std::move(rho);
  res.total_probability = total;
  return res;
}

ProgramStateFamily optimize_phi(int n, int d, const OptimizeConfig& config) {
  if (d != 2) throw ValidationError("optimize_phi: the optimizer supports d = 2");
  if (n < 1) throw DimensionError("optimize_phi: n must be >= 1");

  const auto sectors = spin_sector_projectors(n);
  const auto sample = make_sample(config.sampling, d, config.mc_samples, config.seed);
  const int k = static_cast<int>(sectors.size());

  auto objective = [&](const Eigen::VectorXd& coeffs) {
    PureState phi = phi_from_sectors(n, coeffs, sectors);
    CovariantPOVM povm = povm_from_twirl(phi, n, d, sample);
    return fidelity_of(phi, povm);
  };

  Eigen::VectorXd best = Eigen::VectorXd::Ones(k);
  double best_f;

  if (k == 1) {
    best_f = objective(best);
  } else {
    // coordinate search on the direction sphere; deterministic
    best /= best.norm();
    best_f = objective(best);
    double step = 0.5;
    for (int iter = 0; iter < config.max_iterations && step > 1e-7; ++iter) {
      bool improved = false;
      for (int i = 0; i < k; ++i) {
        for (double delta : {step, -step}) {
          Eigen::VectorXd trial = best;
          trial(i) += delta;
          if (trial.norm() < 1e-12) continue;
          trial /= trial.norm();
          const double f = objective(trial);
          if (f > best_f + 1e-14) {
            best = trial;
            best_f = f;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  }

  ProgramStateFamily fam;
  fam.n = n;
  fam.d = d;
  fam.sector_coefficients = best;
  fam.phi = phi_from_sectors(n, best, sectors);
  fam.average_fidelity = best_f;

  if (config.dense_refine) {
    // see-saw over the full phi space: alternate the SRM seed with the top
    // eigenvector of the fixed-seed fidelity form
    const int full = fam.phi.dim();
    Rng rng(config.seed);
    Vector best_phi = fam.phi.vector;
    double best_dense = best_f;
    for (int restart = 0; restart <= config.dense_restarts; ++restart) {
      Vector phi_v;
      if (restart == 0) {
        phi_v = fam.phi.vector;
      } else {
        phi_v = Vector(full);
        for (int i = 0; i < full; ++i) phi_v(i) = Complex(gaussian(rng), gaussian(rng));
        phi_v.normalize();
      }
      double prev = -1.0;
      for (int iter = 0; iter < config.max_iterations; ++iter) {
        PureState phi(phi_v, fam.phi.dims);
        CovariantPOVM povm = povm_from_twirl(phi, n, d, sample);
        const double f = fidelity_of(phi, povm);
        if (f > best_dense) {
          best_dense = f;
          best_phi = phi_v;
        }
        if (std::abs(f - prev) < config.convergence) break;
        prev = f;

        const int prog_dim = 1 << n;
        Matrix m_eta = unvec(povm.seed_vector.vector, prog_dim, prog_dim);
        Matrix r = Matrix::Zero(full, full);
        for (const auto& [w, weight] : sample) {
          Vector eta_w = vec_of(kron_power(w, n).adjoint() * m_eta);
          r += weight * fidelity_weight(w, d) * (eta_w * eta_w.adjoint());
        }
        auto [vals, vecs] = eig_hermitian(r);
        phi_v = vecs.col(vals.size() - 1);
      }
    }
    if (best_dense > fam.average_fidelity + 1e-12) {
      fam.average_fidelity = best_dense;
      fam.phi = PureState(best_phi, fam.phi.dims);
    }
  }

  return fam;
}

}  // namespace choisim
