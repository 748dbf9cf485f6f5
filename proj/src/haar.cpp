// Haar-pair campaign statistics: sampling, per-pair minimal-time chains, the
// empirical MET CDF with bootstrap bands, the constant-speed geodesic CDF,
// sin-power expansion fits, and model selection.

#include "spinmet/haar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinmet/errors.hpp"
#include "spinmet/metscan.hpp"
#include "spinmet/optim.hpp"
#include "spinmet/parallel.hpp"
#include "spinmet/rng.hpp"

namespace spinmet {

namespace {

StateVector random_state(Eigen::Index dim, std::uint64_t stream_seed) {
  std::uint64_t state = stream_seed;
  StateVector psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Real re = standard_normal(state);
    const Real im = standard_normal(state);
    psi[i] = Complex(re, im);
  }
  psi.normalize();
  return psi;
}

// 2 / Beta(d - 1, 1/2), the normalization of the (2d-3) sine power.
Real hi_normalization(int d) {
  if (d == 2) return 1.0;
  return 2.0 / std::beta(static_cast<Real>(d - 1), 0.5);
}

void check_dimension(int d) {
  if (d < 2) {
    throw ValidationError("fit.d",
                          "Hilbert-space dimension must be at least 2");
  }
}

}  // namespace

// --- sampling ----------------------------------------------------------------

StatePairSample sample_pairs(int n_qubits, int n_pairs, std::uint64_t seed) {
  if (n_qubits < 1) {
    throw ValidationError("sample.n_qubits", "need at least one qubit");
  }
  if (n_pairs < 1) {
    throw ValidationError("sample.n_pairs", "need at least one pair");
  }
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  StatePairSample sample;
  sample.n_qubits = n_qubits;
  sample.seed = seed;
  sample.pairs.reserve(static_cast<std::size_t>(n_pairs));
  for (int p = 0; p < n_pairs; ++p) {
    const std::uint64_t a = derive_seed(seed, 2 * static_cast<std::uint64_t>(p));
    const std::uint64_t b =
        derive_seed(seed, 2 * static_cast<std::uint64_t>(p) + 1);
    sample.pairs.emplace_back(random_state(dim, a), random_state(dim, b));
  }
  return sample;
}

// --- empirical MET CDF ---------------------------------------------------------

Eigen::Index CdfEstimate::n_included() const {
  Eigen::Index n = 0;
  for (const auto& record : pairs) {
    if (!record.excluded) ++n;
  }
  return n;
}

CdfEstimate estimate_cdf(const StatePairSample& sample,
                         const DeviceParams& params,
                         const std::vector<Real>& t_grid_descending,
                         int n_segments, Real threshold,
                         const OptimizerConfig& grape_config, int threads) {
  if (sample.pairs.empty()) {
    throw ValidationError("campaign.pairs", "state-pair sample is empty");
  }
  if ((Eigen::Index(1) << sample.n_qubits) != params.dim() ||
      sample.n_qubits != params.n_qubits) {
    throw ValidationError("campaign.n_qubits",
                          "sample and device qubit counts differ");
  }
  if (t_grid_descending.empty()) {
    throw ValidationError("campaign.t_grid", "duration grid is empty");
  }
  for (std::size_t i = 1; i < t_grid_descending.size(); ++i) {
    if (!(t_grid_descending[i] < t_grid_descending[i - 1])) {
      throw ValidationError("campaign.t_grid",
                            "grid must be strictly descending (the chain runs "
                            "from the longest duration down)");
    }
  }

  MetScanConfig scan;
  scan.t_grid.assign(t_grid_descending.rbegin(), t_grid_descending.rend());
  scan.threshold = threshold;
  scan.n_segments = n_segments;
  scan.scan_direction = ScanDirection::Descending;
  scan.warm_start = true;
  scan.seed_starts = 3;
  scan.warm_starts = 2;

  const std::size_t n_t = scan.t_grid.size();
  CdfEstimate estimate;
  estimate.n_qubits = sample.n_qubits;
  estimate.threshold = threshold;
  estimate.t_grid = scan.t_grid;
  estimate.pairs.resize(sample.pairs.size());

  // Pairs are independent; each body writes only to its own record slot, so
  // any thread count produces identical results. Invariant violations inside
  // a worker are parked per-slot and rethrown after the join.
  std::vector<std::string> hard_errors(sample.pairs.size());
  parallel_for(sample.pairs.size(), threads, [&](std::size_t p) {
    PairRecord& record = estimate.pairs[p];
    MetScanConfig pair_scan = scan;
    pair_scan.seed =
        derive_seed(sample.seed, 100000 + static_cast<std::uint64_t>(p));
    MetScanResult result;
    try {
      result = scan_met(params,
                        CostFunction::infidelity_to(sample.pairs[p].second),
                        sample.pairs[p].first, pair_scan, grape_config);
    } catch (const std::exception& error) {
      record.excluded = true;
      record.notice = error.what();
      return;
    }
    record.infidelity.reserve(n_t);
    record.feasible.reserve(n_t);
    for (const MetPoint& point : result.points) {
      if (point.refined) continue;  // zero-duration probe, not a grid column
      record.infidelity.push_back(point.best_cost);
      record.feasible.push_back(point.feasible ? 1 : 0);
    }
    if (record.infidelity.size() != n_t) {
      hard_errors[p] = "scan returned an unexpected grid point count";
      return;
    }
    record.passes.resize(n_t, 0);
    bool seen = false;
    for (std::size_t i = 0; i < n_t; ++i) {
      seen = seen || record.feasible[i] != 0;
      record.passes[i] = seen ? 1 : 0;
      if (record.feasible[i] != 0 && !record.met_above.has_value()) {
        record.met_above = pair_scan.t_grid[i];
        record.met_below = i > 0 ? pair_scan.t_grid[i - 1] : 0.0;
      }
    }
    if (!record.met_above.has_value()) record.met_below = pair_scan.t_grid.back();
  });
  for (const std::string& message : hard_errors) {
    if (!message.empty()) throw ValidationError("campaign.scan", message);
  }

  const Eigen::Index n_inc = estimate.n_included();
  if (n_inc == 0) {
    throw ValidationError("campaign.pairs",
                          "every pair's optimization failed: " +
                              estimate.pairs.front().notice);
  }
  estimate.cdf.assign(n_t, 0.0);
  for (const PairRecord& record : estimate.pairs) {
    if (record.excluded) continue;
    for (std::size_t i = 0; i < n_t; ++i) {
      estimate.cdf[i] += record.passes[i] ? 1.0 : 0.0;
    }
  }
  for (Real& value : estimate.cdf) value /= static_cast<Real>(n_inc);
  return estimate;
}

CdfEstimate bootstrap_cdf(const CdfEstimate& estimate, long long n_resamples,
                          Real confidence, std::uint64_t seed) {
  if (estimate.t_grid.empty() || estimate.cdf.size() != estimate.t_grid.size()) {
    throw ValidationError("bootstrap.estimate", "estimate has no CDF data");
  }
  if (n_resamples < 1) {
    throw ValidationError("bootstrap.n_resamples", "need at least one resample");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ValidationError("bootstrap.confidence", "confidence must be in (0, 1)");
  }
  const std::size_t n_t = estimate.t_grid.size();

  // Each pair is fully described by the first grid index at which it passes
  // (n_t when it never does): a resampled CDF is a histogram prefix sum.
  std::vector<std::size_t> first_pass;
  for (const PairRecord& record : estimate.pairs) {
    if (record.excluded) continue;
    std::size_t index = n_t;
    for (std::size_t i = 0; i < n_t; ++i) {
      if (record.passes[i] != 0) {
        index = i;
        break;
      }
    }
    first_pass.push_back(index);
  }
  const std::size_t n_inc = first_pass.size();
  if (n_inc == 0) {
    throw ValidationError("bootstrap.estimate", "no included pairs");
  }

  MatrixXd values(n_resamples, static_cast<Eigen::Index>(n_t));
  std::vector<std::size_t> histogram(n_t + 1);
  for (long long r = 0; r < n_resamples; ++r) {
    std::uint64_t state = derive_seed(seed, static_cast<std::uint64_t>(r));
    std::fill(histogram.begin(), histogram.end(), 0);
    for (std::size_t j = 0; j < n_inc; ++j) {
      ++histogram[first_pass[uniform_index(state, n_inc)]];
    }
    std::size_t passing = 0;
    for (std::size_t i = 0; i < n_t; ++i) {
      passing += histogram[i];
      values(r, static_cast<Eigen::Index>(i)) =
          static_cast<Real>(passing) / static_cast<Real>(n_inc);
    }
  }

  CdfEstimate out = estimate;
  out.n_resamples = n_resamples;
  out.confidence = confidence;
  out.variance.assign(n_t, 0.0);
  out.ci_low.assign(n_t, 0.0);
  out.ci_high.assign(n_t, 0.0);
  const Real floor = 1.0 / (static_cast<Real>(n_inc) * static_cast<Real>(n_inc));
  const Real alpha_half = 0.5 * (1.0 - confidence);
  long long lo_rank = static_cast<long long>(
      std::floor(alpha_half * static_cast<Real>(n_resamples)));
  lo_rank = std::clamp<long long>(lo_rank, 0, n_resamples - 1);
  const long long hi_rank = n_resamples - 1 - lo_rank;

  std::vector<Real> column(static_cast<std::size_t>(n_resamples));
  for (std::size_t i = 0; i < n_t; ++i) {
    const auto col = values.col(static_cast<Eigen::Index>(i));
    const Real mean = col.mean();
    const Real var = (col.array() - mean).square().sum() /
                     static_cast<Real>(n_resamples);
    out.variance[i] = std::max(var, floor);
    for (long long r = 0; r < n_resamples; ++r) {
      column[static_cast<std::size_t>(r)] = col[r];
    }
    std::nth_element(column.begin(), column.begin() + lo_rank, column.end());
    out.ci_low[i] = column[static_cast<std::size_t>(lo_rank)];
    std::nth_element(column.begin(), column.begin() + hi_rank, column.end());
    out.ci_high[i] = column[static_cast<std::size_t>(hi_rank)];
  }
  return out;
}

// --- constant-speed geodesic model ----------------------------------------------

Real sin_power_integral(Real u, int n) {
  if (n < 0) {
    throw ValidationError("sin_power_integral.n", "power must be nonnegative");
  }
  const Real s = std::sin(u);
  const Real c = std::cos(u);
  // Away from the right edge, substitute t = sin x: the integrand becomes
  // t^n (1-t^2)^(-1/2), whose binomial series has all-positive coefficients
  // (2j-1)!!/(2j)!! — no cancellation, so the tiny values near u = 0 keep
  // full relative accuracy (the reduction formula only keeps ~1e-16 absolute
  // there, which would break monotonicity at machine scale).
  if (n >= 1 && u >= 0.0 && u <= 0.5 * pi && s < 0.9) {
    Real coefficient = 1.0;
    Real s_power = std::pow(s, n + 1);
    const Real s2 = s * s;
    Real sum = s_power / (n + 1);
    for (int j = 1; j < 400; ++j) {
      coefficient *= (2.0 * j - 1.0) / (2.0 * j);
      s_power *= s2;
      const Real term = coefficient * s_power / (n + 2 * j + 1);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  }
  Real value = (n % 2 == 0) ? u : 2.0 * std::pow(std::sin(0.5 * u), 2);
  // Reduction: S_k = (-sin^(k-1) u cos u + (k-1) S_(k-2)) / k, climbing by 2.
  Real sin_power = (n % 2 == 0) ? s : s * s;  // sin^(k+1) for the next step
  for (int k = (n % 2) + 2; k <= n; k += 2) {
    value = (-sin_power * c + (k - 1) * value) / k;
    sin_power *= s * s;
  }
  return value;
}

Real hi_cdf(Real T, Real v, int d) {
  check_dimension(d);
  if (!(v > 0.0)) {
    throw ValidationError("hi_cdf.v", "speed must be positive");
  }
  if (T <= 0.0) return 0.0;
  const Real u = std::min(0.5 * v * T, 0.5 * pi);
  if (d == 2) return 1.0 - std::cos(u);
  return hi_normalization(d) * sin_power_integral(u, 2 * d - 3);
}

// --- weighted fits ---------------------------------------------------------------

namespace {

struct FitData {
  std::vector<Real> t;
  std::vector<Real> y;
  std::vector<Real> w;  // 1 / variance
  Real t_max = 0.0;
  Real t_min_positive = 0.0;
};

FitData prepare_fit_data(const CdfEstimate& estimate) {
  if (estimate.t_grid.empty() || estimate.cdf.size() != estimate.t_grid.size()) {
    throw ValidationError("fit.estimate", "estimate has no CDF data");
  }
  if (estimate.variance.size() != estimate.t_grid.size()) {
    throw ValidationError("fit.estimate",
                          "estimate has no variances; run bootstrap_cdf first");
  }
  FitData data;
  bool any_low = false;
  bool any_high = false;
  for (std::size_t i = 0; i < estimate.t_grid.size(); ++i) {
    if (!(estimate.variance[i] > 0.0)) {
      throw ValidationError("fit.estimate", "nonpositive variance entry");
    }
    data.t.push_back(estimate.t_grid[i]);
    data.y.push_back(estimate.cdf[i]);
    data.w.push_back(1.0 / estimate.variance[i]);
    any_low = any_low || estimate.cdf[i] < 1.0;
    any_high = any_high || estimate.cdf[i] > 0.0;
    data.t_max = std::max(data.t_max, estimate.t_grid[i]);
    if (estimate.t_grid[i] > 0.0 &&
        (data.t_min_positive == 0.0 || estimate.t_grid[i] < data.t_min_positive)) {
      data.t_min_positive = estimate.t_grid[i];
    }
  }
  if (!any_low || !any_high) {
    throw ValidationError("fit.estimate",
                          "degenerate CDF (constant 0 or 1) cannot pin a speed");
  }
  if (data.t_min_positive == 0.0) {
    throw ValidationError("fit.estimate", "grid has no positive duration");
  }
  return data;
}

std::vector<Real> speed_starts(const FitData& data) {
  std::vector<Real> starts;
  for (std::size_t i = 0; i < data.t.size(); ++i) {
    if (data.y[i] >= 0.999 && data.t[i] > 0.0) {
      starts.push_back(pi / data.t[i]);  // domain edge at the first saturation
      break;
    }
  }
  for (const Real factor : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    starts.push_back(factor * pi / data.t_max);
  }
  return starts;
}

// Coefficients c_n (n = n0..L) from the free parameters: the normalization
// fixes c_n0 and, with two or more terms, the flat-top constraint fixes c_L.
std::vector<Real> expansion_coefficients(int n0, int L,
                                         const std::vector<Real>& interior) {
  const int n_terms = L - n0 + 1;
  std::vector<Real> c(static_cast<std::size_t>(n_terms), 0.0);
  const Real edge = 0.5 * pi;
  if (n_terms == 1) {
    c[0] = 1.0 / sin_power_integral(edge, n0);
    return c;
  }
  const Real s_last = sin_power_integral(edge, L);
  const Real alpha0 = sin_power_integral(edge, n0) - s_last;
  Real weighted = 0.0;
  Real total = 0.0;
  for (int m = 0; m < n_terms - 2; ++m) {
    const Real alpha_m = sin_power_integral(edge, n0 + 1 + m) - s_last;
    weighted += interior[static_cast<std::size_t>(m)] * alpha_m;
    total += interior[static_cast<std::size_t>(m)];
  }
  c[0] = (1.0 - weighted) / alpha0;
  for (int m = 0; m < n_terms - 2; ++m) {
    c[static_cast<std::size_t>(m) + 1] = interior[static_cast<std::size_t>(m)];
  }
  c.back() = -(c[0] + total);
  return c;
}

Real expansion_value(Real T, Real v_edge, int n0,
                     const std::vector<Real>& coefficients) {
  if (T <= 0.0) return 0.0;
  const Real u = std::min(0.5 * v_edge * T, 0.5 * pi);
  Real value = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    value += coefficients[i] * sin_power_integral(u, n0 + static_cast<int>(i));
  }
  return value;
}

struct WeightedFitResult {
  VectorXd parameters;
  Real chi2 = 0.0;
  MatrixXd covariance;
};

// Multistart bounded weighted least squares; model_jacobian fills one row of
// partials per call. Returns the best run by final chi-squared.
WeightedFitResult weighted_fit(
    const FitData& data, Eigen::Index n_params,
    const std::function<Real(Real /*T*/, const VectorXd&)>& model,
    const std::function<void(Real /*T*/, const VectorXd&, VectorXd&)>&
        model_jacobian,
    const std::vector<VectorXd>& starts, const VectorXd& lower,
    const VectorXd& upper) {
  const Objective objective = [&](const VectorXd& p, VectorXd& grad) {
    grad.setZero(n_params);
    Real chi2 = 0.0;
    VectorXd row(n_params);
    for (std::size_t i = 0; i < data.t.size(); ++i) {
      const Real residual = model(data.t[i], p) - data.y[i];
      chi2 += data.w[i] * residual * residual;
      model_jacobian(data.t[i], p, row);
      grad += 2.0 * data.w[i] * residual * row;
    }
    return chi2;
  };

  LbfgsOptions options;
  options.max_iterations = 600;
  options.gradient_tol = 1e-13;
  options.relative_cost_tol = 1e-15;
  options.max_line_search_steps = 60;

  WeightedFitResult best;
  best.chi2 = std::numeric_limits<Real>::infinity();
  for (const VectorXd& start : starts) {
    const LbfgsResult run = minimize_bounded(objective, start, lower, upper,
                                             options);
    if (run.cost < best.chi2) {
      best.chi2 = run.cost;
      best.parameters = run.x;
    }
  }

  // Gauss-Newton covariance (J^T W J)^-1 at the optimum.
  MatrixXd normal = MatrixXd::Zero(n_params, n_params);
  VectorXd row(n_params);
  for (std::size_t i = 0; i < data.t.size(); ++i) {
    model_jacobian(data.t[i], best.parameters, row);
    normal += data.w[i] * row * row.transpose();
  }
  const Eigen::LDLT<MatrixXd> ldlt(normal);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    best.covariance = ldlt.solve(MatrixXd::Identity(n_params, n_params));
  }
  return best;
}

}  // namespace

int CdfFit::n_parameters() const {
  if (model == Model::ConstantSpeed) return 1;
  return coefficients.size() <= 1 ? 1
                                  : static_cast<int>(coefficients.size()) - 1;
}

Real CdfFit::evaluate(Real T) const {
  if (model == Model::ConstantSpeed) return hi_cdf(T, v, d);
  return expansion_value(T, v, first_power, coefficients);
}

CdfFit fit_hi(const CdfEstimate& estimate, int d) {
  if (d == 0) d = 1 << estimate.n_qubits;
  check_dimension(d);
  const FitData data = prepare_fit_data(estimate);
  if (static_cast<int>(data.t.size()) < 2) {
    throw ValidationError("fit.estimate", "need at least two grid points");
  }
  const int n0 = 2 * d - 3;
  const Real norm = hi_normalization(d);

  const auto model = [&](Real T, const VectorXd& p) {
    return hi_cdf(T, p[0], d);
  };
  const auto jacobian = [&](Real T, const VectorXd& p, VectorXd& row) {
    const Real u = 0.5 * p[0] * T;
    row[0] = (T > 0.0 && u < 0.5 * pi)
                 ? norm * std::pow(std::sin(u), n0) * 0.5 * T
                 : 0.0;
  };

  VectorXd lower(1), upper(1);
  lower[0] = 0.1 * pi / data.t_max;
  upper[0] = 10.0 * pi / data.t_min_positive;
  std::vector<VectorXd> starts;
  for (const Real v0 : speed_starts(data)) {
    VectorXd p(1);
    p[0] = std::clamp(v0, lower[0], upper[0]);
    starts.push_back(p);
  }

  const WeightedFitResult run =
      weighted_fit(data, 1, model, jacobian, starts, lower, upper);
  CdfFit fit;
  fit.model = CdfFit::Model::ConstantSpeed;
  fit.d = d;
  fit.v = run.parameters[0];
  fit.first_power = n0;
  fit.coefficients = {norm};
  fit.chi2 = run.chi2;
  fit.n_dof = static_cast<int>(data.t.size()) - 1;
  fit.covariance = run.covariance;
  return fit;
}

CdfFit fit_expansion(const CdfEstimate& estimate, int d, int L) {
  check_dimension(d);
  const int n0 = 2 * d - 3;
  if (L < n0) {
    throw ValidationError("fit.L", "truncation below the leading sine power");
  }
  const FitData data = prepare_fit_data(estimate);
  const int n_terms = L - n0 + 1;
  const int n_params = n_terms == 1 ? 1 : n_terms - 1;
  if (static_cast<int>(data.t.size()) <= n_params) {
    throw ValidationError("fit.L", "more parameters than grid points");
  }

  const auto coefficients_of = [&](const VectorXd& p) {
    std::vector<Real> interior(p.size() > 1 ? p.size() - 1 : 0);
    for (Eigen::Index m = 1; m < p.size(); ++m) {
      interior[static_cast<std::size_t>(m - 1)] = p[m];
    }
    return expansion_coefficients(n0, L, interior);
  };
  const auto model = [&](Real T, const VectorXd& p) {
    return expansion_value(T, p[0], n0, coefficients_of(p));
  };
  const auto jacobian = [&](Real T, const VectorXd& p, VectorXd& row) {
    row.setZero();
    if (T <= 0.0) return;
    const Real u = 0.5 * p[0] * T;
    const std::vector<Real> c = coefficients_of(p);
    if (u < 0.5 * pi) {
      Real slope = 0.0;
      const Real s = std::sin(u);
      for (std::size_t i = 0; i < c.size(); ++i) {
        slope += c[i] * std::pow(s, n0 + static_cast<int>(i));
      }
      row[0] = slope * 0.5 * T;
    }
    if (p.size() == 1) return;
    const Real uc = std::min(u, 0.5 * pi);
    const Real edge = 0.5 * pi;
    const Real s_last = sin_power_integral(edge, L);
    const Real alpha0 = sin_power_integral(edge, n0) - s_last;
    const Real s0 = sin_power_integral(uc, n0);
    const Real sL = sin_power_integral(uc, L);
    for (Eigen::Index m = 1; m < p.size(); ++m) {
      const int n_m = n0 + static_cast<int>(m);
      const Real alpha_m = sin_power_integral(edge, n_m) - s_last;
      const Real g0 = -alpha_m / alpha0;  // dc_n0 / d interior_m
      row[m] = g0 * s0 + sin_power_integral(uc, n_m) - (g0 + 1.0) * sL;
    }
  };

  VectorXd lower(n_params), upper(n_params);
  lower[0] = 0.1 * pi / data.t_max;
  upper[0] = 10.0 * pi / data.t_min_positive;
  for (Eigen::Index m = 1; m < n_params; ++m) {
    lower[m] = -100.0;
    upper[m] = 100.0;
  }
  std::vector<VectorXd> starts;
  for (const Real v0 : speed_starts(data)) {
    VectorXd p = VectorXd::Zero(n_params);
    p[0] = std::clamp(v0, lower[0], upper[0]);
    starts.push_back(p);
  }

  const WeightedFitResult run =
      weighted_fit(data, n_params, model, jacobian, starts, lower, upper);
  CdfFit fit;
  fit.model = CdfFit::Model::Expansion;
  fit.d = d;
  fit.v = run.parameters[0];
  fit.first_power = n0;
  fit.coefficients = coefficients_of(run.parameters);
  fit.chi2 = run.chi2;
  fit.n_dof = static_cast<int>(data.t.size()) - n_params;
  fit.covariance = run.covariance;
  return fit;
}

ExpansionSelection select_expansion(const CdfEstimate& estimate, int d,
                                    int max_terms) {
  check_dimension(d);
  if (max_terms < 1) {
    throw ValidationError("fit.max_terms", "need at least one term");
  }
  const int n0 = 2 * d - 3;
  ExpansionSelection selection;
  for (int terms = 1; terms <= max_terms; ++terms) {
    const int L = n0 + terms - 1;
    CdfFit fit;
    try {
      fit = fit_expansion(estimate, d, L);
    } catch (const ValidationError&) {
      break;  // data cannot support more parameters
    }
    selection.trail.push_back(fit);
    if (fit.chi2_per_dof() < 1.0) break;  // good fit: stop at minimal terms
    const std::size_t k = selection.trail.size();
    if (k >= 2 && selection.trail[k - 1].chi2_per_dof() >=
                      selection.trail[k - 2].chi2_per_dof()) {
      break;  // no longer improving: keep the previous fit
    }
  }
  if (selection.trail.empty()) {
    throw ValidationError("fit.estimate", "no expansion order could be fitted");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < selection.trail.size(); ++i) {
    if (selection.trail[i].chi2_per_dof() <
        selection.trail[best].chi2_per_dof()) {
      best = i;
    }
  }
  selection.best = selection.trail[best];
  return selection;
}

// --- goodness-of-fit helpers -------------------------------------------------------

Real ks_statistic(std::vector<Real> samples,
                  const std::function<Real(Real)>& reference_cdf) {
  if (samples.empty()) {
    throw ValidationError("ks.samples", "no samples");
  }
  std::sort(samples.begin(), samples.end());
  const Real n = static_cast<Real>(samples.size());
  Real sup = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Real f = reference_cdf(samples[i]);
    sup = std::max(sup, f - static_cast<Real>(i) / n);
    sup = std::max(sup, static_cast<Real>(i + 1) / n - f);
  }
  return sup;
}

Real ks_critical(int n, Real alpha) {
  if (n < 1) throw ValidationError("ks.n", "need at least one sample");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("ks.alpha", "level must be in (0, 1)");
  }
  return std::sqrt(-std::log(0.5 * alpha) / (2.0 * static_cast<Real>(n)));
}

// --- infidelity-distribution map ------------------------------------------------------

MatrixXd infidelity_cdf_map(const CdfEstimate& estimate,
                            const VectorXd& delta_grid) {
  const Eigen::Index n_t = static_cast<Eigen::Index>(estimate.t_grid.size());
  const Eigen::Index n_inc = estimate.n_included();
  if (n_t == 0 || n_inc == 0) {
    throw ValidationError("map.estimate", "estimate has no included pairs");
  }
  MatrixXd map = MatrixXd::Zero(n_t, delta_grid.size());
  for (const PairRecord& record : estimate.pairs) {
    if (record.excluded) continue;
    for (Eigen::Index i = 0; i < n_t; ++i) {
      const Real value = record.infidelity[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < delta_grid.size(); ++j) {
        if (value <= delta_grid[j]) map(i, j) += 1.0;
      }
    }
  }
  return map / static_cast<Real>(n_inc);
}

ExtrapolatedMap extrapolate_map(const MatrixXd& map,
                                const std::vector<Real>& t_grid, Real t_cutoff,
                                int n_average) {
  if (static_cast<std::size_t>(map.rows()) != t_grid.size()) {
    throw ValidationError("map.t_grid", "row count does not match the grid");
  }
  if (n_average < 1) {
    throw ValidationError("map.n_average", "need at least one row to average");
  }
  Eigen::Index cutoff = map.rows();
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    if (t_grid[static_cast<std::size_t>(i)] >= t_cutoff) {
      cutoff = i;
      break;
    }
  }
  if (cutoff == 0) {
    throw ValidationError("map.t_cutoff", "no computed rows below the cutoff");
  }
  ExtrapolatedMap out;
  out.values = map;
  out.extrapolated.assign(static_cast<std::size_t>(map.rows()), 0);
  const Eigen::Index first = std::max<Eigen::Index>(0, cutoff - n_average);
  const Eigen::Index count = cutoff - first;
  const auto mean_row =
      map.middleRows(first, count).colwise().mean().eval();
  for (Eigen::Index i = cutoff; i < map.rows(); ++i) {
    out.values.row(i) = mean_row;
    out.extrapolated[static_cast<std::size_t>(i)] = 1;
  }
  return out;
}

}  // namespace spinmet
