#pragma once
// Dense scalar-templated containers and the numeric conventions shared by the
// whole library: energies and frequencies are linear frequencies in GHz with
// h = 1, times are in ns, and time evolution is exp(-i 2*pi H t), so GHz*ns
// products are dimensionless phases.

#include <complex>

#include <Eigen/Dense>

namespace spinmet {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Real = double;
using Complex = std::complex<Real>;
using MatrixXd = Matrix<Real>;
using MatrixXcd = Matrix<Complex>;
using VectorXd = Vector<Real>;
using VectorXcd = Vector<Complex>;

// A pure state over n qubits: complex amplitudes of length 2^n, unit norm.
// Qubit 1 is the most significant bit of the basis index.
using StateVector = VectorXcd;

inline constexpr Real pi = 3.14159265358979323846;
inline constexpr Real two_pi = 2.0 * pi;
inline constexpr Complex imag_unit{0.0, 1.0};

}  // namespace spinmet
