// Gate-clock time budgets and the exact local/SWAP^alpha/local construction
// carrying any two-qubit pure state to any other. The construction works
// entirely through 2x2 Schmidt data: singular vectors give the local layers,
// and a single fractional SWAP slides the Schmidt angle between the two
// states' values.

#include "spinmet/bounds.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "spinmet/errors.hpp"
#include "spinmet/linalg.hpp"

namespace spinmet {

namespace {

// z/|z| when z is meaningfully nonzero, else 1 (phase of a vanishing
// amplitude is arbitrary and must not pollute the local layers).
Complex unit_phase(const Complex& z) {
  const Real mag = std::abs(z);
  if (mag < 1e-14) return Complex(1.0, 0.0);
  return z / mag;
}

}  // namespace

GateTimeBudget reference_bounds(Real pi_gate_time, Real swap_time) {
  if (!(pi_gate_time >= 0.0))
    throw ValidationError("pi_gate_time", "must be a nonnegative duration");
  if (!(swap_time >= 0.0))
    throw ValidationError("swap_time", "must be a nonnegative duration");
  GateTimeBudget budget;
  budget.pi_gate_time = pi_gate_time;
  budget.swap_alpha_max_time = swap_time;
  budget.one_qubit_max = 2.5 * pi_gate_time;
  budget.two_qubit_max = 2.0 * budget.one_qubit_max + swap_time;
  budget.two_qubit_from_01_max = budget.one_qubit_max + swap_time;
  budget.two_qubit_min = pi_gate_time + swap_time;
  return budget;
}

StateVector SchmidtDecomposition::reconstruct() const {
  const MatrixXcd a0 = basis_a.col(0);
  const MatrixXcd a1 = basis_a.col(1);
  const MatrixXcd b0 = basis_b.col(0);
  const MatrixXcd b1 = basis_b.col(1);
  const MatrixXcd term =
      std::cos(theta) * kron<Complex>(a0, b0) +
      std::sin(theta) * kron<Complex>(a1, b1);
  return StateVector(term.col(0));
}

SchmidtDecomposition schmidt_decompose(const StateVector& psi) {
  if (psi.size() != 4)
    throw ValidationError("psi", "two-qubit state must have 4 amplitudes");
  const Real nrm = psi.norm();
  if (!(nrm > 1e-12))
    throw ValidationError("psi", "state vector must have nonzero norm");

  // Reshape amplitudes into the 2x2 matrix M with psi = sum_ij M(i,j)|i>|j>
  // (qubit A = row = most significant bit). Schmidt data is its SVD.
  MatrixXcd m(2, 2);
  m(0, 0) = psi(0) / nrm;
  m(0, 1) = psi(1) / nrm;
  m(1, 0) = psi(2) / nrm;
  m(1, 1) = psi(3) / nrm;

  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtDecomposition out;
  // Singular values arrive sorted descending, so theta lands in [0, pi/4].
  out.theta = std::atan2(svd.singularValues()(1), svd.singularValues()(0));
  out.basis_a = svd.matrixU();
  // M = U S V^H means psi = sum_k s_k |u_k> (conj V col k), so the B-side
  // Schmidt vectors are the conjugated columns of V.
  out.basis_b = svd.matrixV().conjugate();

  // Canonical phases: first nonzero component of each |a_k> real-positive,
  // compensated on |b_k> so each product |a_k>|b_k> is untouched.
  for (int k = 0; k < 2; ++k) {
    const int pivot = (std::abs(out.basis_a(0, k)) > 1e-12) ? 0 : 1;
    const Complex ph = unit_phase(out.basis_a(pivot, k));
    out.basis_a.col(k) *= std::conj(ph);
    out.basis_b.col(k) *= ph;
  }
  return out;
}

MatrixXcd swap_power(Real alpha) {
  const Complex e = std::exp(Complex(0.0, pi * alpha));
  MatrixXcd u = MatrixXcd::Zero(4, 4);
  u(0, 0) = Complex(1.0, 0.0);
  u(3, 3) = Complex(1.0, 0.0);
  // On span{|01>,|10>}: (I + e)/2 on the diagonal, (I - e)/2 off it —
  // the symmetric/antisymmetric projector combination P+ + e P-.
  u(1, 1) = 0.5 * (Complex(1.0, 0.0) + e);
  u(2, 2) = 0.5 * (Complex(1.0, 0.0) + e);
  u(1, 2) = 0.5 * (Complex(1.0, 0.0) - e);
  u(2, 1) = 0.5 * (Complex(1.0, 0.0) - e);
  return u;
}

StateVector TransitionCircuit::apply(const StateVector& psi) const {
  if (psi.size() != 4)
    throw ValidationError("psi", "two-qubit state must have 4 amplitudes");
  StateVector out = kron<Complex>(u_a, u_b) * psi;
  out = swap_power(alpha) * out;
  out = kron<Complex>(v_a, v_b) * out;
  return out;
}

TransitionCircuit construct_transition(const StateVector& psi0,
                                       const StateVector& phi) {
  const SchmidtDecomposition start = schmidt_decompose(psi0);
  const SchmidtDecomposition target = schmidt_decompose(phi);
  const Real theta = start.theta;
  const Real theta_t = target.theta;

  TransitionCircuit c;
  // On  cos(t)|01> -+ i sin(t)|10>  the mixed block of SWAP^alpha gives
  // |amp01|^2 = (1 + cos(pi*alpha +- 2t))/2, so with the sign matched to the
  // direction of travel the angle slides to t' at pi*alpha = 2|t' - t|; the
  // exponent always lands in [0, 1/2].
  c.alpha = 2.0 * std::abs(theta_t - theta) / pi;
  const Complex seam_phase =
      (theta_t >= theta) ? Complex(0.0, -1.0) : Complex(0.0, 1.0);

  // First local layer: |a_k> -> |k> on qubit A; |b0> -> |1> and
  // |b1> -> seam_phase * |0> on qubit B, producing
  // cos(theta)|01> + seam_phase * sin(theta)|10>.
  c.u_a = start.basis_a.adjoint();
  c.u_b = MatrixXcd(2, 2);
  c.u_b.row(0) = seam_phase * start.basis_b.col(1).adjoint();
  c.u_b.row(1) = start.basis_b.col(0).adjoint();

  // State after the first two layers: supported on |01>,|10> with magnitudes
  // cos(theta'), sin(theta') and phases absorbed by the final layer below.
  const StateVector mid =
      swap_power(c.alpha) * (kron<Complex>(c.u_a, c.u_b) * psi0);
  const Complex ph01 = unit_phase(mid(1));
  const Complex ph10 = unit_phase(mid(2));

  // Final local layer: |0>_A -> |a'0>, |1>_A -> |a'1> with the intermediate
  // phases cancelled, and |1>_B -> |b'0>, |0>_B -> |b'1>.
  c.v_a = MatrixXcd(2, 2);
  c.v_a.col(0) = target.basis_a.col(0) * std::conj(ph01);
  c.v_a.col(1) = target.basis_a.col(1) * std::conj(ph10);
  c.v_b = MatrixXcd(2, 2);
  c.v_b.col(0) = target.basis_b.col(1);
  c.v_b.col(1) = target.basis_b.col(0);
  return c;
}

}  // namespace spinmet
