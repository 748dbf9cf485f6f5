#pragma once
// Small dense linear-algebra kernels used across the library: Kronecker
// products, Hermitian matrix exponentials by eigendecomposition (the pieces
// are kept so exponential derivatives stay cheap), the divided-difference
// kernel of the exponential map, and exact interval averages of complex
// phasors. Everything is a free function over Eigen dense types.

#include <cmath>

#include <Eigen/Dense>

#include "spinmet/types.hpp"

namespace spinmet {

// Kronecker product, row-major qubit convention (first factor = high bits).
template <typename Scalar>
Matrix<Scalar> kron(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  Matrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Eigendecomposition of a Hermitian generator together with the unitary
// exp(-i 2*pi * H * dt); keeping (evals, evecs) makes directional derivatives
// of the exponential a Hadamard product away (see loewner_kernel).
struct HermitianExp {
  VectorXd evals;
  MatrixXcd evecs;
  MatrixXcd unitary;  // exp(-i * 2*pi * H * dt)
  Real dt = 0.0;
};

inline HermitianExp expm_hermitian(const MatrixXcd& h, Real dt) {
  HermitianExp out;
  out.dt = dt;
  const Eigen::Index d = h.rows();
  if (d == 2) {
    // closed form: h = m*I + r*(unit Bloch vector . sigma)
    const Real a = h(0, 0).real();
    const Real b = h(1, 1).real();
    const Complex c = h(0, 1);
    const Real m = 0.5 * (a + b);
    const Real dz = 0.5 * (a - b);
    const Real r = std::hypot(dz, std::abs(c));
    out.evals = VectorXd(2);
    out.evals << m - r, m + r;
    out.evecs = MatrixXcd(2, 2);
    if (r < 1e-300) {
      out.evecs = MatrixXcd::Identity(2, 2);
    } else {
      // eigenvector of the larger eigenvalue, picking the better-conditioned
      // of the two algebraically equivalent expressions
      Complex v0, v1;
      if (dz + r >= r - dz) {
        v0 = Complex(dz + r, 0.0);
        v1 = std::conj(c);
      } else {
        v0 = c;
        v1 = Complex(r - dz, 0.0);
      }
      const Real nrm = std::sqrt(std::norm(v0) + std::norm(v1));
      v0 /= nrm;
      v1 /= nrm;
      out.evecs(0, 1) = v0;
      out.evecs(1, 1) = v1;
      out.evecs(0, 0) = -std::conj(v1);
      out.evecs(1, 0) = std::conj(v0);
    }
    const Complex p0 = std::exp(Complex(0.0, -two_pi * out.evals(0) * dt));
    const Complex p1 = std::exp(Complex(0.0, -two_pi * out.evals(1) * dt));
    out.unitary = MatrixXcd(2, 2);
    const Complex e00 = out.evecs(0, 0), e10 = out.evecs(1, 0);
    const Complex e01 = out.evecs(0, 1), e11 = out.evecs(1, 1);
    out.unitary(0, 0) = p0 * e00 * std::conj(e00) + p1 * e01 * std::conj(e01);
    out.unitary(0, 1) = p0 * e00 * std::conj(e10) + p1 * e01 * std::conj(e11);
    out.unitary(1, 0) = p0 * e10 * std::conj(e00) + p1 * e11 * std::conj(e01);
    out.unitary(1, 1) = p0 * e10 * std::conj(e10) + p1 * e11 * std::conj(e11);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  out.evals = es.eigenvalues();
  out.evecs = es.eigenvectors();
  VectorXcd phases(d);
  for (Eigen::Index i = 0; i < d; ++i)
    phases(i) = std::exp(Complex(0.0, -two_pi * out.evals(i) * dt));
  out.unitary = out.evecs * phases.asDiagonal() * out.evecs.adjoint();
  return out;
}

// sin(x)/x with a series branch for small arguments.
inline Real sinc(Real x) {
  if (std::abs(x) < 1e-4) {
    const Real x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// (sin x - x cos x) / x^2 with a series branch for small arguments.
inline Real sinc_moment(Real x) {
  if (std::abs(x) < 1e-4) {
    const Real x2 = x * x;
    return x / 3.0 - x * x2 / 30.0 + x2 * x2 * x / 840.0;
  }
  return (std::sin(x) - x * std::cos(x)) / (x * x);
}

// Divided differences of z -> exp(-i 2*pi z dt) on the eigenvalues of a
// Hermitian generator: K(a,b) = (f(l_a) - f(l_b)) / (l_a - l_b), with the
// exact cancellation-free form  -i 2*pi dt * e^{-i 2 pi dt lbar} sinc(pi dt dl).
// Fréchet derivative of the exponential in direction E is then
// V * ((V^H E V) .* K) * V^H  (Daleckii-Krein).
inline MatrixXcd loewner_kernel(const VectorXd& evals, Real dt) {
  const Eigen::Index d = evals.size();
  MatrixXcd k(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const Real mean = 0.5 * (evals(a) + evals(b));
      const Real diff = evals(a) - evals(b);
      k(a, b) = Complex(0.0, -two_pi * dt) *
                std::exp(Complex(0.0, -two_pi * dt * mean)) *
                sinc(pi * dt * diff);
    }
  }
  return k;
}

// Average of exp(i w t) over t in [t0, t1] (exact; w in rad per time unit).
inline Complex mean_phase(Real w, Real t0, Real t1) {
  const Real mid = 0.5 * (t0 + t1);
  const Real x = 0.5 * w * (t1 - t0);
  return std::exp(Complex(0.0, w * mid)) * sinc(x);
}

// Average of t * exp(i w t) over t in [t0, t1] (exact).
inline Complex mean_phase_t(Real w, Real t0, Real t1) {
  const Real mid = 0.5 * (t0 + t1);
  const Real half = 0.5 * (t1 - t0);
  const Real x = w * half;
  const Complex carrier = std::exp(Complex(0.0, w * mid));
  return carrier * (mid * sinc(x) + Complex(0.0, half * sinc_moment(x)));
}

}  // namespace spinmet
