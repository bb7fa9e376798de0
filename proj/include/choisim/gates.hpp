// Fixed gate matrices: qubit universal set {H, T, CNOT}, Cliffords, and the
// generalized qudit Paulis X_d, Z_d used by teleportation.
#pragma once

#include "choisim/dense.hpp"

namespace choisim {

enum class GateKind { H, T, Cnot };

Matrix identity(int d);
Matrix hadamard();
Matrix t_gate();
Matrix s_gate();
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix cnot();
Matrix swap_gate();
Matrix cz();

// Qudit shift and clock: X|j> = |j+1 mod d>, Z|j> = w^j |j>, w = exp(2 pi i / d).
Matrix shift_x(int d);
Matrix clock_z(int d);

// X^x Z^z (global phase as produced by the literal product).
Matrix pauli_power(int d, int x, int z);

const char* gate_name(GateKind k);
Matrix gate_matrix(GateKind k);
int gate_arity(GateKind k);

}  // namespace choisim
