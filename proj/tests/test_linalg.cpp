// Unit tests for the dense linear-algebra kernels.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "spinmet/linalg.hpp"
#include "spinmet/rng.hpp"

using namespace spinmet;

namespace {

MatrixXcd random_hermitian(int d, std::uint64_t seed) {
  std::uint64_t s = seed;
  MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      m(i, j) = Complex(uniform(s, -1.0, 1.0), uniform(s, -1.0, 1.0));
  return 0.5 * (m + m.adjoint().eval());
}

}  // namespace

TEST_CASE("kron matches hand-computed 2x2 blocks") {
  MatrixXcd a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const MatrixXcd k = kron<Complex>(a, b);
  REQUIRE(k.rows() == 4);
  CHECK(k(0, 1) == Complex(1, 0));
  CHECK(k(0, 0) == Complex(0, 0));
  CHECK(k(1, 0) == Complex(1, 0));
  CHECK(k(2, 3) == Complex(4, 0));   // a(1,1) * b(0,1)
  CHECK(k(2, 1) == Complex(3, 0));   // a(1,0) * b(0,1)
  CHECK(k(3, 0) == Complex(3, 0));   // a(1,0) * b(1,0)
  CHECK(k(0, 3) == Complex(2, 0));   // a(0,1) * b(0,1)
}

TEST_CASE("expm_hermitian reproduces the series exponential") {
  const MatrixXcd h = random_hermitian(6, 11);
  const Real dt = 0.37;
  const HermitianExp e = expm_hermitian(h, dt);
  const MatrixXcd direct = (Complex(0, -two_pi * dt) * h).exp();
  CHECK((e.unitary - direct).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((e.unitary * e.unitary.adjoint() - MatrixXcd::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
}

TEST_CASE("loewner_kernel gives the exponential's directional derivative") {
  const MatrixXcd h = random_hermitian(5, 23);
  const MatrixXcd dir = random_hermitian(5, 29);
  const Real dt = 0.21;
  const HermitianExp e = expm_hermitian(h, dt);
  const MatrixXcd k = loewner_kernel(e.evals, dt);
  const MatrixXcd tilde = e.evecs.adjoint() * dir * e.evecs;
  const MatrixXcd analytic =
      e.evecs * tilde.cwiseProduct(k) * e.evecs.adjoint();

  const Real eps = 1e-6;
  const MatrixXcd up = (Complex(0, -two_pi * dt) * (h + eps * dir)).exp();
  const MatrixXcd dn = (Complex(0, -two_pi * dt) * (h - eps * dir)).exp();
  const MatrixXcd fd = (up - dn) / (2.0 * eps);
  CHECK((analytic - fd).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("loewner_kernel diagonal equals -i 2 pi dt times the phase") {
  VectorXd evals(2);
  evals << 0.3, -1.1;
  const Real dt = 0.8;
  const MatrixXcd k = loewner_kernel(evals, dt);
  const Complex expected =
      Complex(0, -two_pi * dt) * std::exp(Complex(0, -two_pi * dt * 0.3));
  CHECK(std::abs(k(0, 0) - expected) < 1e-15);
}

TEST_CASE("sinc and sinc_moment are continuous across the series branch") {
  for (Real x : {1e-5, 5e-5, 9.9e-5, 1.01e-4, 1e-3}) {
    CHECK(sinc(x) == doctest::Approx(std::sin(x) / x).epsilon(1e-13));
    CHECK(sinc_moment(x) ==
          doctest::Approx((std::sin(x) - x * std::cos(x)) / (x * x))
              .epsilon(1e-10));
  }
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc_moment(0.0) == 0.0);
}

TEST_CASE("mean_phase matches numerical quadrature") {
  std::uint64_t s = 99;
  for (int rep = 0; rep < 20; ++rep) {
    const Real w = uniform(s, -50.0, 50.0);
    const Real t0 = uniform(s, -2.0, 2.0);
    const Real t1 = t0 + uniform(s, 0.01, 1.5);
    // composite Simpson
    const int n = 2000;
    const Real h = (t1 - t0) / n;
    Complex acc{0, 0};
    for (int i = 0; i <= n; ++i) {
      const Real t = t0 + i * h;
      const Real wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += wgt * std::exp(Complex(0, w * t));
    }
    acc *= h / 3.0 / (t1 - t0);
    CHECK(std::abs(mean_phase(w, t0, t1) - acc) < 1e-9);
  }
}

TEST_CASE("mean_phase_t matches numerical quadrature including small w") {
  std::uint64_t s = 7;
  for (int rep = 0; rep < 20; ++rep) {
    const Real w = (rep < 5) ? uniform(s, -1e-6, 1e-6) : uniform(s, -40.0, 40.0);
    const Real t0 = uniform(s, -1.0, 3.0);
    const Real t1 = t0 + uniform(s, 0.01, 1.2);
    const int n = 2000;
    const Real h = (t1 - t0) / n;
    Complex acc{0, 0};
    for (int i = 0; i <= n; ++i) {
      const Real t = t0 + i * h;
      const Real wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += wgt * t * std::exp(Complex(0, w * t));
    }
    acc *= h / 3.0 / (t1 - t0);
    CHECK(std::abs(mean_phase_t(w, t0, t1) - acc) < 1e-9);
  }
}
