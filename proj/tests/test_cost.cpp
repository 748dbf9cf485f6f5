// Cost functions, shot budgeting, and the sampled estimator: exact-value
// checks against dense linear algebra, the Hoeffding plan arithmetic, seeded
// regression values, and the statistical guarantees of the estimator.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "spinmet/cost.hpp"
#include "spinmet/errors.hpp"
#include "spinmet/pauli.hpp"
#include "spinmet/rng.hpp"

using namespace spinmet;

namespace {

StateVector random_state(int n_qubits, std::uint64_t seed) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  StateVector psi(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    psi[i] = Complex(standard_normal(seed), standard_normal(seed));
  }
  psi.normalize();
  return psi;
}

PauliSum random_two_qubit_sum(std::uint64_t seed, int n_terms) {
  static const char letters[] = {'I', 'X', 'Y', 'Z'};
  PauliSum sum;
  sum.n_qubits = 2;
  sum.unit = "dimensionless";
  while (static_cast<int>(sum.terms.size()) < n_terms) {
    std::string word;
    word += letters[uniform_index(seed, 4)];
    word += letters[uniform_index(seed, 4)];
    bool duplicate = false;
    for (const auto& t : sum.terms) duplicate = duplicate || t.word == word;
    if (duplicate) continue;
    sum.terms.push_back({word, uniform(seed, -1.5, 1.5)});
  }
  return sum;
}

}  // namespace

TEST_CASE("expectation cost: Z on |0> is +1 and floors subtract") {
  PauliSum sum;
  sum.n_qubits = 1;
  sum.unit = "dimensionless";
  sum.terms = {{"Z", 1.0}};
  const CostFunction cost = CostFunction::expectation_of(sum, -1.0);
  const StateVector zero = basis_state(1, 0);
  const Real value = evaluate(cost, zero);
  CHECK(value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cost.excess(value) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("infidelity cost: zero against itself, one against orthogonal") {
  const StateVector phi = random_state(2, 77);
  const CostFunction cost = CostFunction::infidelity_to(phi);
  CHECK(evaluate(cost, phi) == doctest::Approx(0.0).epsilon(1e-14));

  // Orthogonalize another random state against phi.
  StateVector other = random_state(2, 78);
  other -= phi * phi.dot(other);
  other.normalize();
  CHECK(evaluate(cost, other) == doctest::Approx(1.0).epsilon(1e-12));

  // The factory normalizes an unnormalized target rather than rejecting it.
  const CostFunction scaled = CostFunction::infidelity_to(3.0 * phi);
  CHECK(evaluate(scaled, phi) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(CostFunction::infidelity_to(StateVector::Zero(4)),
                  ValidationError);
}

TEST_CASE("expectation cost matches dense contraction and is real") {
  for (std::uint64_t trial = 0; trial < 6; ++trial) {
    const PauliSum sum = random_two_qubit_sum(900 + trial, 5);
    const StateVector psi = random_state(2, 300 + trial);
    const MatrixXcd dense = pauli_sum_matrix(sum);
    const Complex dense_value = psi.dot(dense * psi);
    const Real value = evaluate(CostFunction::expectation_of(sum), psi);
    CHECK(std::abs(value - std::real(dense_value)) < 1e-12);
    CHECK(std::abs(std::imag(dense_value)) < 1e-12);
  }
}

TEST_CASE("evaluate rejects dimension mismatches") {
  PauliSum sum;
  sum.n_qubits = 2;
  sum.unit = "dimensionless";
  sum.terms = {{"ZZ", 1.0}};
  CHECK_THROWS_AS(evaluate(CostFunction::expectation_of(sum), basis_state(1, 0)),
                  ValidationError);
  const CostFunction inf = CostFunction::infidelity_to(basis_state(2, 3));
  CHECK_THROWS_AS(evaluate(inf, basis_state(3, 0)), ValidationError);
}

TEST_CASE("shot plan: single unit coefficient at eps=0.1 delta=0.05 gives 738") {
  PauliSum sum;
  sum.n_qubits = 1;
  sum.unit = "dimensionless";
  sum.terms = {{"Z", 1.0}};
  const ShotPlan plan = plan_shots(sum, 0.1, 0.05);
  // 1 * 1 * (2/0.01) * ln(40) = 737.776 rounds up to 738.
  CHECK(plan.raw[0] == doctest::Approx(200.0 * std::log(40.0)).epsilon(1e-14));
  CHECK(plan.shots[0] == 738);
  CHECK(plan.total == 738);
  CHECK(plan.epsilon == 0.1);
  CHECK(plan.delta == 0.05);
}

TEST_CASE("shot plan: weights proportional to |coeff|") {
  PauliSum sum;
  sum.n_qubits = 2;
  sum.unit = "dimensionless";

  SUBCASE("equal magnitudes get equal shots") {
    sum.terms = {{"XX", 1.0}, {"ZZ", -1.0}};
    const ShotPlan plan = plan_shots(sum, 0.25, 0.1);
    CHECK(plan.raw[0] == doctest::Approx(plan.raw[1]).epsilon(1e-15));
    CHECK(plan.shots[0] == plan.shots[1]);
  }

  SUBCASE("3:1 magnitudes split 3:1 before rounding") {
    sum.terms = {{"XY", 3.0}, {"ZI", 1.0}};
    const ShotPlan plan = plan_shots(sum, 0.2, 0.05);
    CHECK(plan.raw[0] / plan.raw[1] == doctest::Approx(3.0).epsilon(1e-14));
  }

  SUBCASE("identity terms are excluded from budget and get zero shots") {
    sum.terms = {{"II", 2.5}, {"ZZ", 1.0}};
    const ShotPlan plan = plan_shots(sum, 0.1, 0.05);
    CHECK(plan.shots[0] == 0);
    CHECK(plan.raw[0] == 0.0);
    // Lambda counts only the ZZ coefficient.
    CHECK(plan.raw[1] ==
          doctest::Approx(1.0 * 1.0 * 200.0 * std::log(40.0)).epsilon(1e-14));
  }

  SUBCASE("zero coefficient draws nothing") {
    sum.terms = {{"XX", 0.0}, {"ZZ", 1.0}};
    const ShotPlan plan = plan_shots(sum, 0.1, 0.05);
    CHECK(plan.shots[0] == 0);
    CHECK(plan.total == plan.shots[1]);
  }
}

TEST_CASE("shot plan rejects bad inputs") {
  PauliSum sum;
  sum.n_qubits = 1;
  sum.unit = "dimensionless";
  CHECK_THROWS_AS(plan_shots(sum, 0.1, 0.05), ValidationError);  // no terms
  sum.terms = {{"Z", 1.0}};
  CHECK_THROWS_AS(plan_shots(sum, 0.0, 0.05), ValidationError);
  CHECK_THROWS_AS(plan_shots(sum, -0.1, 0.05), ValidationError);
  CHECK_THROWS_AS(plan_shots(sum, 0.1, 0.0), ValidationError);
  CHECK_THROWS_AS(plan_shots(sum, 0.1, 1.0), ValidationError);
}

TEST_CASE("shot totals are monotone nonincreasing in eps and delta") {
  const PauliSum sum = random_two_qubit_sum(41, 4);
  long long prev = -1;
  for (const Real eps : {0.02, 0.05, 0.1, 0.2, 0.5}) {
    const long long total = plan_shots(sum, eps, 0.05).total;
    if (prev >= 0) CHECK(total <= prev);
    prev = total;
  }
  prev = -1;
  for (const Real delta : {0.001, 0.01, 0.05, 0.2, 0.5}) {
    const long long total = plan_shots(sum, 0.1, delta).total;
    if (prev >= 0) CHECK(total <= prev);
    prev = total;
  }
}

TEST_CASE("sampled estimator is exact on joint eigenstates") {
  PauliSum sum;
  sum.n_qubits = 2;
  sum.unit = "dimensionless";
  sum.terms = {{"ZI", 0.7}, {"IZ", -0.4}, {"ZZ", 1.3}, {"II", -2.0}};
  const StateVector psi = basis_state(2, basis_index_from_bits("01"));
  const CostFunction cost = CostFunction::expectation_of(sum);
  const Real exact = evaluate(cost, psi);
  const ShotPlan plan = plan_shots(sum, 0.5, 0.1);
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    CHECK(simulate_measurement_estimate(sum, psi, plan, seed) ==
          doctest::Approx(exact).epsilon(1e-15));
  }
}

TEST_CASE("sampled estimator: |+> in Z with a million shots (frozen seed)") {
  PauliSum sum;
  sum.n_qubits = 1;
  sum.unit = "dimensionless";
  sum.terms = {{"Z", 1.0}};
  StateVector plus(2);
  plus << Complex(1.0 / std::sqrt(2.0), 0.0), Complex(1.0 / std::sqrt(2.0), 0.0);
  ShotPlan plan;
  plan.shots = {1000000};
  plan.raw = {1e6};
  plan.total = 1000000;
  const Real estimate = simulate_measurement_estimate(sum, plus, plan, 2026);
  CHECK(std::abs(estimate) < 0.004);  // ~4 binomial standard errors
  CHECK(estimate == doctest::Approx(-0.000464).epsilon(1e-10));  // frozen draw
}

TEST_CASE("sampled estimator honors the Hoeffding guarantee") {
  const PauliSum sum = random_two_qubit_sum(7, 4);
  const StateVector psi = random_state(2, 8);
  const Real exact = evaluate(CostFunction::expectation_of(sum), psi);
  const Real eps = 0.1;
  const ShotPlan plan = plan_shots(sum, eps, 0.05);
  int within = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    const Real estimate = simulate_measurement_estimate(
        sum, psi, plan, derive_seed(515, static_cast<std::uint64_t>(rep)));
    if (std::abs(estimate - exact) <= eps) ++within;
  }
  // The bound promises >= 95%; Hoeffding is loose so nearly all reps pass.
  CHECK(within >= 190);
}

TEST_CASE("sampled estimator rejects mismatched inputs") {
  PauliSum sum;
  sum.n_qubits = 1;
  sum.unit = "dimensionless";
  sum.terms = {{"Z", 1.0}, {"X", 0.5}};
  const ShotPlan short_plan{{10}, {10.0}, 10, 0.1, 0.1};
  CHECK_THROWS_AS(
      simulate_measurement_estimate(sum, basis_state(1, 0), short_plan, 1),
      ValidationError);
  const ShotPlan plan = plan_shots(sum, 0.3, 0.1);
  CHECK_THROWS_AS(
      simulate_measurement_estimate(sum, basis_state(2, 0), plan, 1),
      ValidationError);
}

TEST_CASE("sampling error shrinks like one over root shots") {
  // Single word with |<P>| well inside (-1, 1) so the binomial variance is
  // finite; fit log RMS error against log shots over four decades.
  PauliSum sum;
  sum.n_qubits = 2;
  sum.unit = "dimensionless";
  sum.terms = {{"XZ", 1.0}};
  StateVector psi = random_state(2, 31);
  const Real exact = evaluate(CostFunction::expectation_of(sum), psi);
  REQUIRE(std::abs(exact) < 0.9);

  std::vector<Real> log_n, log_rms;
  const int seeds = 40;
  for (const long long n : {100LL, 1000LL, 10000LL, 100000LL, 1000000LL}) {
    ShotPlan plan;
    plan.shots = {n};
    plan.raw = {static_cast<Real>(n)};
    plan.total = n;
    Real sq = 0.0;
    for (int rep = 0; rep < seeds; ++rep) {
      const Real estimate = simulate_measurement_estimate(
          sum, psi, plan, derive_seed(9090, static_cast<std::uint64_t>(rep)));
      sq += (estimate - exact) * (estimate - exact);
    }
    log_n.push_back(std::log(static_cast<Real>(n)));
    log_rms.push_back(0.5 * std::log(sq / seeds));
  }
  // Least-squares slope of log RMS vs log N.
  const auto mean = [](const std::vector<Real>& v) {
    Real s = 0.0;
    for (Real x : v) s += x;
    return s / static_cast<Real>(v.size());
  };
  const Real mx = mean(log_n), my = mean(log_rms);
  Real sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sxy += (log_n[i] - mx) * (log_rms[i] - my);
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const Real slope = sxy / sxx;
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));  // within +-0.1 absolute
}
