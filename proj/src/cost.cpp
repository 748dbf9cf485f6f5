// Cost evaluation, Hoeffding shot allocation, and sampled estimation.

#include "spinmet/cost.hpp"

#include <algorithm>
#include <cmath>

#include "spinmet/errors.hpp"
#include "spinmet/rng.hpp"

namespace spinmet {

namespace {

bool is_identity_word(const std::string& word) {
  return word.find_first_not_of('I') == std::string::npos;
}

}  // namespace

CostFunction CostFunction::expectation_of(PauliSum observable,
                                          Real reference_floor) {
  CostFunction cost;
  cost.kind = CostKind::PauliExpectation;
  cost.observable = std::move(observable);
  cost.reference_floor = reference_floor;
  return cost;
}

CostFunction CostFunction::infidelity_to(const StateVector& target) {
  CostFunction cost;
  cost.kind = CostKind::Infidelity;
  const Real norm = target.norm();
  if (!(norm > 0.0)) {
    throw ValidationError("cost", "infidelity target must be a nonzero state");
  }
  cost.target = target / norm;
  cost.reference_floor = 0.0;
  return cost;
}

Eigen::Index CostFunction::dim() const {
  return kind == CostKind::PauliExpectation ? observable.dim() : target.size();
}

Real evaluate(const CostFunction& cost, const StateVector& psi) {
  if (psi.size() != cost.dim()) {
    throw ValidationError("cost",
                          "state dimension " + std::to_string(psi.size()) +
                              " does not match cost dimension " +
                              std::to_string(cost.dim()));
  }
  if (cost.kind == CostKind::Infidelity) {
    return 1.0 - std::norm(cost.target.dot(psi));
  }
  return pauli_expectation(cost.observable, psi);
}

ShotPlan plan_shots(const PauliSum& sum, Real epsilon, Real delta) {
  if (sum.terms.empty()) {
    throw ValidationError("plan_shots", "Pauli sum has no terms");
  }
  if (!(epsilon > 0.0)) {
    throw ValidationError("plan_shots", "epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ValidationError("plan_shots", "delta must lie in (0, 1)");
  }

  ShotPlan plan;
  plan.epsilon = epsilon;
  plan.delta = delta;
  plan.shots.assign(sum.terms.size(), 0);
  plan.raw.assign(sum.terms.size(), 0.0);

  Real lambda = 0.0;  // sum of |c| over measured (non-identity) terms
  for (const PauliTerm& term : sum.terms) {
    if (!is_identity_word(term.word)) lambda += std::abs(term.coeff);
  }
  const Real budget = lambda * (2.0 / (epsilon * epsilon)) * std::log(2.0 / delta);

  for (std::size_t i = 0; i < sum.terms.size(); ++i) {
    const PauliTerm& term = sum.terms[i];
    if (is_identity_word(term.word) || term.coeff == 0.0) continue;
    plan.raw[i] = std::abs(term.coeff) * budget;
    plan.shots[i] = static_cast<long long>(std::ceil(plan.raw[i]));
    plan.total += plan.shots[i];
  }
  return plan;
}

Real simulate_measurement_estimate(const PauliSum& sum, const StateVector& psi,
                                   const ShotPlan& plan, std::uint64_t seed) {
  if (psi.size() != sum.dim()) {
    throw ValidationError("simulate_measurement",
                          "state dimension does not match Pauli sum");
  }
  if (plan.shots.size() != sum.terms.size()) {
    throw ValidationError("simulate_measurement",
                          "shot plan does not cover every term");
  }

  Real estimate = 0.0;
  for (std::size_t i = 0; i < sum.terms.size(); ++i) {
    const PauliTerm& term = sum.terms[i];
    if (is_identity_word(term.word)) {
      estimate += term.coeff;  // outcome is always +1; no sampling needed
      continue;
    }
    const long long n = plan.shots[i];
    if (n <= 0) continue;
    const CompiledWord word = compile_word(term.word, sum.n_qubits);
    const Real mean = std::real(psi.dot(apply_word(word, psi)));
    const Real p_plus = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
    std::uint64_t stream = derive_seed(seed, static_cast<std::uint64_t>(i));
    const long long plus = binomial(stream, n, p_plus);
    estimate +=
        term.coeff * (2.0 * static_cast<Real>(plus) / static_cast<Real>(n) - 1.0);
  }
  return estimate;
}

}  // namespace spinmet
