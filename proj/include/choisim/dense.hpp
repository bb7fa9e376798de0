// Dense multi-wire linear algebra: density operators, pure states, and the
// tensor-index operations (kron, partial trace, partial transpose, wire
// permutation) every higher layer builds on.
//
// Wire convention: dims = {d_0, d_1, ...} with wire 0 the slowest index,
// i.e. flat = ((i_0 * d_1 + i_1) * d_2 + ...). kron(a, b) puts a's wires
// before b's.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace choisim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

inline constexpr double kDefaultTol = 1e-9;

// Default tolerance for PSD / trace / unitarity checks; CHOISIM_TOL
// overrides it process-wide, individual calls may override per call.
double default_tol();

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

// Invalid state / channel / file content.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

int product_of(const std::vector<int>& dims);

struct DensityOperator {
  Matrix matrix;
  std::vector<int> dims;
  std::vector<std::string> labels;  // optional wire names

  DensityOperator() = default;
  DensityOperator(Matrix m, std::vector<int> d)
      : matrix(std::move(m)), dims(std::move(d)) {
    if (matrix.rows() != matrix.cols() || matrix.rows() != product_of(dims))
      throw DimensionError("DensityOperator: matrix side must equal product of dims");
  }

  int dim() const { return static_cast<int>(matrix.rows()); }
  int wire_count() const { return static_cast<int>(dims.size()); }
  double trace_real() const { return matrix.trace().real(); }
};

struct PureState {
  Vector vector;
  std::vector<int> dims;

  PureState() = default;
  PureState(Vector v, std::vector<int> d) : vector(std::move(v)), dims(std::move(d)) {
    if (vector.size() != product_of(dims))
      throw DimensionError("PureState: vector length must equal product of dims");
  }

  int dim() const { return static_cast<int>(vector.size()); }
  DensityOperator to_density() const {
    return DensityOperator(vector * vector.adjoint(), dims);
  }
};

// --- validation -------------------------------------------------------

bool is_hermitian(const Matrix& m, double tol = default_tol());
bool is_unitary(const Matrix& m, double tol = default_tol());

// Throws ValidationError unless Hermitian, PSD within tol and trace 1 +- tol.
// With allow_subnormalized, accepts trace in (0, 1].
void validate_density(const DensityOperator& rho, double tol = default_tol(),
                      bool allow_subnormalized = false);

// --- tensor-index operations ------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
DensityOperator kron(const DensityOperator& a, const DensityOperator& b);
PureState kron(const PureState& a, const PureState& b);

DensityOperator partial_trace(const DensityOperator& m, const std::vector<int>& keep);
DensityOperator partial_transpose(const DensityOperator& m, const std::vector<int>& part);

// order[i] = old wire placed at position i; a full permutation of the wires.
DensityOperator permute_wires(const DensityOperator& m, const std::vector<int>& order);
PureState permute_wires(const PureState& s, const std::vector<int>& order);

// Slice with the listed wires fixed: rows restricted to row_vals on those
// wires, columns to col_vals; result lives on the remaining wires.
DensityOperator fix_wires(const DensityOperator& m, const std::vector<int>& wires,
                          const std::vector<int>& row_vals, const std::vector<int>& col_vals);

// Embed a k-wire gate acting on `wires` of a system with the given dims.
Matrix embed_on_wires(const Matrix& gate, const std::vector<int>& dims,
                      const std::vector<int>& wires);

// Conjugate by a unitary acting on a subset of wires: U rho U^dagger.
DensityOperator apply_on_wires(const DensityOperator& rho, const Matrix& gate,
                               const std::vector<int>& wires);
PureState apply_on_wires(const PureState& s, const Matrix& gate,
                         const std::vector<int>& wires);

// --- spectral helpers --------------------------------------------------

// Eigenvalues ascending, columns of second element the eigenvectors.
std::pair<RealVector, Matrix> eig_hermitian(const Matrix& m);

// Principal square root of a PSD matrix; eigenvalues in [-tol, 0) are
// clipped to 0, below -tol is an error.
Matrix psd_sqrt(const Matrix& m, double tol = default_tol());

// Uhlmann fidelity, squared convention: (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

// (1/2) || rho - sigma ||_1.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// Trace norm || m ||_1 of a Hermitian matrix.
double trace_norm_hermitian(const Matrix& m);

// Von Neumann entropy (natural log) of a state.
double von_neumann_entropy(const DensityOperator& rho, double tol = default_tol());

// --- randomness ---------------------------------------------------------
// Every stochastic operation takes an explicit generator; there is no
// ambient RNG. gaussian() is Box-Muller on mt19937_64 output so sequences
// are identical across standard libraries.

double gaussian(Rng& rng);
Matrix ginibre(int rows, int cols, Rng& rng);
Matrix haar_random_unitary(int d, Rng& rng);
DensityOperator random_density(int d, Rng& rng);
PureState random_pure(int d, Rng& rng);

}  // namespace choisim
