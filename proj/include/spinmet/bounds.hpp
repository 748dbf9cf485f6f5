#pragma once
// Reference time budgets for state preparation on a gate-clocked processor
// (Euler-angle single-qubit layers plus a fractional-SWAP interaction), and
// the constructive circuit  (U_A x U_B) -> SWAP^alpha -> (V_A x V_B)  that
// carries any two-qubit pure state to any other. The budget arithmetic turns
// a pi-gate time and a maximal fractional-SWAP time into upper and lower
// bounds on one- and two-qubit preparation times; the Schmidt-based
// construction shows a single interaction layer suffices for the upper bound.

#include <Eigen/Dense>

#include "spinmet/types.hpp"

namespace spinmet {

// Gate-clock time budget. The derived bounds are recomputed from the two
// inputs by reference_bounds():
//   one_qubit_max        = 2.5 * pi_gate_time   (X(a) Y(b) X(c) Euler layer,
//                          |a|,|c| <= pi and |b| <= pi/2 at fixed clock)
//   two_qubit_max        = 2 * one_qubit_max + swap_alpha_max_time
//   two_qubit_from_01_max= one_qubit_max + swap_alpha_max_time
//                          (starting from |01>, the first local layer is free)
//   two_qubit_min        = pi_gate_time + swap_alpha_max_time
struct GateTimeBudget {
  Real pi_gate_time = 200.0;        // ns, full pi rotation of one spin
  Real swap_alpha_max_time = 0.5;   // ns, worst-case fractional SWAP
  Real one_qubit_max = 0.0;         // ns
  Real two_qubit_max = 0.0;         // ns
  Real two_qubit_from_01_max = 0.0; // ns
  Real two_qubit_min = 0.0;         // ns
};

// Fill a GateTimeBudget from its two inputs (both in ns, >= 0).
GateTimeBudget reference_bounds(Real pi_gate_time = 200.0,
                                Real swap_time = 0.5);

// Schmidt decomposition of a two-qubit pure state:
//   psi = cos(theta) |a0>|b0> + sin(theta) |a1>|b1>,   theta in [0, pi/4],
// with the larger coefficient first. basis_a/basis_b are 2x2 unitaries whose
// columns are |a0>,|a1> and |b0>,|b1>; each |a_k> has its first nonzero
// component real-positive (the leftover phase sits in |b_k>).
struct SchmidtDecomposition {
  Real theta = 0.0;
  MatrixXcd basis_a;  // 2x2
  MatrixXcd basis_b;  // 2x2

  // cos(theta) |a0>|b0> + sin(theta) |a1>|b1>, for round-trip checks.
  StateVector reconstruct() const;
};

// Decompose a normalized 4-amplitude state (qubit A = most significant bit).
// Product states come out with theta = 0.
SchmidtDecomposition schmidt_decompose(const StateVector& psi);

// Fractional SWAP on two qubits: P_sym + e^{i pi alpha} P_antisym (4x4).
// alpha = 0 is the identity, alpha = 1 the full SWAP.
MatrixXcd swap_power(Real alpha);

// Local x SWAP^alpha x local circuit mapping one two-qubit state to another.
struct TransitionCircuit {
  MatrixXcd u_a;      // 2x2 first local layer, qubit A
  MatrixXcd u_b;      // 2x2 first local layer, qubit B
  Real alpha = 0.0;   // fractional-SWAP exponent, always in [0, 1]
  MatrixXcd v_a;      // 2x2 final local layer, qubit A
  MatrixXcd v_b;      // 2x2 final local layer, qubit B

  // (v_a x v_b) SWAP^alpha (u_a x u_b) |psi>
  StateVector apply(const StateVector& psi) const;
};

// Build the circuit carrying psi0 to phi exactly (up to global phase): the
// first locals bring psi0 to the canonical form cos(theta)|01> + sin(theta)|10>
// with a phase on the second term chosen so SWAP^alpha slides the Schmidt
// angle monotonically, alpha = 2|theta' - theta|/pi matches the target angle,
// and the final locals rotate into the target's Schmidt bases.
TransitionCircuit construct_transition(const StateVector& psi0,
                                       const StateVector& phi);

}  // namespace spinmet
