#pragma once
// Optimization objectives on propagated states — exact Pauli-sum expectation
// values (molecular energies) and target-state infidelities — plus the
// Hoeffding shot-allocation planner and a seeded sampling simulator that
// emulates estimating the objective from projective measurements.

#include <cstdint>
#include <vector>

#include "spinmet/pauli.hpp"
#include "spinmet/types.hpp"

namespace spinmet {

enum class CostKind { PauliExpectation, Infidelity };

struct CostFunction {
  CostKind kind = CostKind::PauliExpectation;
  PauliSum observable;   // payload when kind == PauliExpectation
  StateVector target;    // payload when kind == Infidelity (kept normalized)
  Real reference_floor = 0.0;  // known minimum (ground energy; 0 for infidelity)

  static CostFunction expectation_of(PauliSum observable,
                                     Real reference_floor = 0.0);
  static CostFunction infidelity_to(const StateVector& target);

  Eigen::Index dim() const;
  // Excess of a raw cost value above the known floor (the scan threshold
  // applies to this quantity, not to the raw value).
  Real excess(Real value) const { return value - reference_floor; }
};

// Exact statevector cost: <psi|C|psi> for Pauli sums, 1 - |<target|psi>|^2 for
// infidelity. Throws ValidationError on dimension mismatch.
Real evaluate(const CostFunction& cost, const StateVector& psi);

// --- measurement budgeting --------------------------------------------------

struct ShotPlan {
  // Aligned with PauliSum::terms. Identity words need no measurement (their
  // contribution is exact) and get zero shots.
  std::vector<long long> shots;
  std::vector<Real> raw;  // pre-ceiling counts, proportional to |coeff|
  long long total = 0;
  Real epsilon = 0.0;  // target accuracy of the estimator
  Real delta = 0.0;    // failure probability bound (confidence 1 - delta)
};

// Per-term budget N_P = ceil(|c_P| * Lambda * (2/eps^2) * ln(2/delta)) with
// Lambda the sum of |c| over non-identity terms; guarantees |estimate - exact|
// <= epsilon with probability >= 1 - delta. Throws ValidationError for an
// empty sum, epsilon <= 0, or delta outside (0, 1).
ShotPlan plan_shots(const PauliSum& sum, Real epsilon, Real delta);

// Draws each term's +/-1 outcome counts from the exact probabilities
// (binomial on p+ = (1 + <P>)/2, one decorrelated stream per term) and
// assembles the estimator sum_P c_P (N+ - N-)/N_P; identity coefficients are
// added exactly. Deterministic given seed.
Real simulate_measurement_estimate(const PauliSum& sum, const StateVector& psi,
                                   const ShotPlan& plan, std::uint64_t seed);

}  // namespace spinmet
