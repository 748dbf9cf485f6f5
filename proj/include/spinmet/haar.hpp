#pragma once
// Random-state-pair campaigns and their statistics: Haar sampling, per-pair
// minimal-time scans aggregated into an empirical MET CDF, bootstrap
// confidence bands with a variance floor, the closed-form CDF of the
// constant-speed geodesic model, its sin-power series generalization with
// normalization and flat-top constraints, weighted chi-squared fits, and the
// add-terms-until-flat model-selection rule.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spinmet/cost.hpp"
#include "spinmet/device.hpp"
#include "spinmet/grape.hpp"
#include "spinmet/types.hpp"

namespace spinmet {

// --- sampling ---------------------------------------------------------------

struct StatePairSample {
  int n_qubits = 1;
  std::uint64_t seed = 0;
  std::vector<std::pair<StateVector, StateVector>> pairs;  // (start, target)
};

// n_pairs independent (start, target) pairs, each state a normalized vector
// of standard complex Gaussians (Haar-distributed). Deterministic in seed.
StatePairSample sample_pairs(int n_qubits, int n_pairs, std::uint64_t seed);

// --- empirical MET CDF -------------------------------------------------------

struct PairRecord {
  std::vector<Real> infidelity;  // optimized value per grid duration
  std::vector<char> feasible;    // converged and below threshold, per duration
  std::vector<char> passes;      // after monotone repair (pass at T implies
                                 // pass at every longer grid duration)
  std::optional<Real> met_above;  // smallest passing duration
  Real met_below = 0.0;           // grid neighbor just under it (0 if none)
  bool excluded = false;          // optimizer error; see notice
  std::string notice;
};

struct CdfEstimate {
  int n_qubits = 1;
  Real threshold = 1e-7;
  std::vector<Real> t_grid;  // ascending
  std::vector<PairRecord> pairs;
  std::vector<Real> cdf;  // fraction of included pairs passing, per duration

  // Bootstrap summary; empty until bootstrap_cdf fills it.
  std::vector<Real> variance;  // per duration, floored at 1/n_included^2
  std::vector<Real> ci_low;
  std::vector<Real> ci_high;
  long long n_resamples = 0;
  Real confidence = 0.0;

  Eigen::Index n_included() const;
};

// Per-pair minimal-time chains over the duration grid (given longest-first,
// matching the scan order: each shorter duration warm-starts from the
// previous winner plus two random companions, and the longest duration seeds
// the chain with three random starts). Pairs whose optimization throws are
// excluded with a notice instead of aborting the campaign. The CDF counts a
// pair as passing at T when it passed at any grid duration <= T. Pairs may
// run on `threads` workers (0 = all cores); results are identical for every
// thread count because each pair owns its record slot.
CdfEstimate estimate_cdf(const StatePairSample& sample,
                         const DeviceParams& params,
                         const std::vector<Real>& t_grid_descending,
                         int n_segments, Real threshold,
                         const OptimizerConfig& grape_config, int threads = 1);

// Campaign protocol defaults (resamples and confidence follow the reference
// analysis; the variance floor is the squared resolution of the estimate).
inline constexpr long long kDefaultBootstrapResamples = 100000;
inline constexpr Real kDefaultBootstrapConfidence = 0.9999;

// Resamples pairs with replacement and fills variance (floored at
// 1/n_included^2) and percentile confidence bands per duration. Returns an
// updated copy; deterministic in seed.
CdfEstimate bootstrap_cdf(const CdfEstimate& estimate,
                          long long n_resamples = kDefaultBootstrapResamples,
                          Real confidence = kDefaultBootstrapConfidence,
                          std::uint64_t seed = 0);

// --- constant-speed geodesic model --------------------------------------------

// Integral of sin^n from 0 to u by the stable reduction formula; exact for
// integer n >= 0.
Real sin_power_integral(Real u, int n);

// CDF of the MET between Haar pairs when every pair travels geodesics at
// constant speed v in Hilbert-space dimension d: the normalized integral of
// sin^(2d-3) up to vT/2. Clamped to 0 below T = 0 and 1 above T = pi/v.
Real hi_cdf(Real T, Real v, int d);

// --- weighted fits -------------------------------------------------------------

struct CdfFit {
  enum class Model { ConstantSpeed, Expansion };
  Model model = Model::ConstantSpeed;
  int d = 2;            // Hilbert-space dimension assumed by the fit
  Real v = 0.0;         // speed (constant-speed) or domain-edge pi/T_star
  int first_power = 1;  // leading sine power 2d-3
  std::vector<Real> coefficients;  // c_n for n = first_power..L
  Real chi2 = 0.0;
  int n_dof = 0;
  MatrixXd covariance;  // free parameters: v, then interior coefficients

  Real chi2_per_dof() const { return chi2 / static_cast<Real>(n_dof); }
  int n_parameters() const;
  Real evaluate(Real T) const;  // fitted CDF value (clamped domain)
};

// Single-parameter weighted least squares of the constant-speed model
// against estimate.cdf with weights 1/variance (bootstrap must have run).
// d = 0 infers 2^n_qubits; passing a different d is allowed (mismatch
// studies) and simply fits that model. Throws ValidationError on degenerate
// data (all-zero or all-one CDF, missing variances).
CdfFit fit_hi(const CdfEstimate& estimate, int d = 0);

// Truncated sin-power series with terms n = 2d-3..L. Two constraints are
// eliminated analytically: the CDF equals 1 at its domain edge, and the
// coefficient sum vanishes (flat top) whenever more than one term is
// present. Free parameters: the edge speed and the L-1-(2d-3) interior
// coefficients, matching "terms minus one" overall. L = 2d-3 reduces to the
// constant-speed model.
CdfFit fit_expansion(const CdfEstimate& estimate, int d, int L);

struct ExpansionSelection {
  CdfFit best;
  std::vector<CdfFit> trail;  // one fit per tried term count, in order
};

// Adds terms one at a time and stops at the first fit with chi2/N_DoF < 1,
// or one step before chi2/N_DoF stops decreasing, or when the data cannot
// support more parameters; max_terms caps the search.
ExpansionSelection select_expansion(const CdfEstimate& estimate, int d,
                                    int max_terms = 12);

// --- goodness-of-fit helpers ----------------------------------------------------

// Kolmogorov-Smirnov sup-distance between the sample and a reference CDF.
Real ks_statistic(std::vector<Real> samples,
                  const std::function<Real(Real)>& reference_cdf);

// Large-n critical value sqrt(-ln(alpha/2) / (2n)); the campaign sizes of
// interest are n = 64 and n = 1024 at alpha = 1% and 5%.
Real ks_critical(int n, Real alpha);

// --- infidelity-distribution map --------------------------------------------------

// P(infidelity <= delta | T): one row per grid duration, one column per
// delta. Excluded pairs are skipped.
MatrixXd infidelity_cdf_map(const CdfEstimate& estimate,
                            const VectorXd& delta_grid);

// Optional post-processing for durations beyond the computed region: rows
// with T >= t_cutoff are replaced by the average of the n_average computed
// rows just below the cutoff, and flagged.
struct ExtrapolatedMap {
  MatrixXd values;
  std::vector<char> extrapolated;  // per row
};
ExtrapolatedMap extrapolate_map(const MatrixXd& map,
                                const std::vector<Real>& t_grid, Real t_cutoff,
                                int n_average = 10);

}  // namespace spinmet
