#include "choisim/gates.hpp"

#include <cmath>
#include <numbers>

namespace choisim {

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix hadamard() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

Matrix t_gate() {
  Matrix t = Matrix::Zero(2, 2);
  t(0, 0) = 1.0;
  t(1, 1) = std::polar(1.0, std::numbers::pi / 4);
  return t;
}

Matrix s_gate() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = Complex(0.0, 1.0);
  return s;
}

Matrix pauli_x() { return shift_x(2); }
Matrix pauli_z() { return clock_z(2); }

Matrix pauli_y() {
  Matrix y = Matrix::Zero(2, 2);
  y(0, 1) = Complex(0.0, -1.0);
  y(1, 0) = Complex(0.0, 1.0);
  return y;
}

Matrix cnot() {
  Matrix c = Matrix::Zero(4, 4);
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

Matrix swap_gate() {
  Matrix s = Matrix::Zero(4, 4);
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
  return s;
}

Matrix cz() {
  Matrix c = Matrix::Identity(4, 4);
  c(3, 3) = -1.0;
  return c;
}

Matrix shift_x(int d) {
  if (d < 2) throw DimensionError("shift_x: d must be >= 2");
  Matrix x = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) x((j + 1) % d, j) = 1.0;
  return x;
}

Matrix clock_z(int d) {
  if (d < 2) throw DimensionError("clock_z: d must be >= 2");
  Matrix z = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
  return z;
}

Matrix pauli_power(int d, int x, int z) {
  x = ((x % d) + d) % d;
  z = ((z % d) + d) % d;
  Matrix p = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    p((j + x) % d, j) = std::polar(1.0, 2.0 * std::numbers::pi * z * j / d);
  return p;
}

const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::T: return "T";
    case GateKind::Cnot: return "CNOT";
  }
  return "?";
}

Matrix gate_matrix(GateKind k) {
  switch (k) {
    case GateKind::H: return hadamard();
    case GateKind::T: return t_gate();
    case GateKind::Cnot: return cnot();
  }
  throw Error("unknown gate kind");
}

int gate_arity(GateKind k) { return k == GateKind::Cnot ? 2 : 1; }

}  // namespace choisim
