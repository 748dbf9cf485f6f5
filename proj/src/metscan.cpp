// Duration scans that estimate minimal evolution times, the chained
// bond-distance protocol for molecular series, and device-parameter sweeps.

#include "spinmet/metscan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinmet/errors.hpp"
#include "spinmet/rng.hpp"

namespace spinmet {

namespace {

void check_scan_config(const MetScanConfig& config) {
  if (config.t_grid.empty())
    throw ValidationError("scan.t_grid", "duration grid is empty");
  for (std::size_t i = 0; i < config.t_grid.size(); ++i) {
    if (!(config.t_grid[i] >= 0.0))
      throw ValidationError("scan.t_grid[" + std::to_string(i) + "]",
                            "durations must be nonnegative");
    if (i > 0 && !(config.t_grid[i] > config.t_grid[i - 1]))
      throw ValidationError("scan.t_grid[" + std::to_string(i) + "]",
                            "grid must be strictly ascending");
  }
  if (!(config.threshold > 0.0))
    throw ValidationError("scan.threshold", "threshold must be positive");
  if (config.n_segments < 1)
    throw ValidationError("scan.n_segments", "need at least one segment");
  if (config.seed_starts < 1 && !config.seed_with_zero)
    throw ValidationError("scan.seed_starts",
                          "first point needs at least one start");
  if (config.warm_starts < 0)
    throw ValidationError("scan.warm_starts", "must be nonnegative");
  if (config.refine_resolution && !(*config.refine_resolution > 0.0))
    throw ValidationError("scan.refine_resolution", "must be positive");
}

MetPoint make_point(Real total_time, const CostFunction& cost, Real threshold,
                    OptimizationOutcome outcome, bool refined) {
  MetPoint p;
  p.total_time = total_time;
  p.best_cost = outcome.best_cost;
  p.excess = cost.excess(outcome.best_cost);
  p.converged = outcome.converged;
  p.feasible = outcome.converged && p.excess <= threshold;
  p.refined = refined;
  p.outcome = std::move(outcome);
  return p;
}

// Start recipe for the first scanned point (and, with warm starts disabled,
// for every point): seed_starts random schedules, optionally alongside a
// zero-amplitude base.
InitStrategy seed_init(const MetScanConfig& config, OptimizerConfig& oc) {
  if (config.seed_with_zero) {
    oc.n_random_restarts = config.seed_starts;
    return InitStrategy::zero();
  }
  oc.n_random_restarts = config.seed_starts - 1;
  return InitStrategy::random();
}

// Seed-stream layout: grid point k uses stream k (independent of scan
// direction), bisection probe j uses stream 1000 + j, and the zero-duration
// check uses stream 2000. Keeps reruns and direction flips comparable.
constexpr std::uint64_t kRefineStreamBase = 1000;
constexpr std::uint64_t kZeroProbeStream = 2000;

// Shared tail of every scan flavor: locate the smallest grid duration from
// which all longer grid points are feasible, probe T = 0 when even the
// smallest one passes, then optionally bisect the bracket.
void bracket_and_refine(const DeviceParams& params, const CostFunction& cost,
                        const StateVector& psi0, const MetScanConfig& config,
                        const OptimizerConfig& grape_config,
                        const std::vector<MetPoint>& grid_points,
                        MetScanResult& out) {
  const int n = static_cast<int>(grid_points.size());
  int first_ok = n;  // smallest index whose suffix is entirely feasible
  for (int i = n - 1; i >= 0 && grid_points[i].feasible; --i) first_ok = i;

  if (first_ok == n) {
    out.met_estimate.reset();
    out.bracket_below = config.t_grid.back();
    out.bracket_above.reset();
    return;
  }

  Real lo = 0.0;
  Real hi = config.t_grid[first_ok];
  ControlSchedule winner = grid_points[first_ok].outcome.best_schedule;
  if (first_ok > 0) {
    lo = config.t_grid[first_ok - 1];
  } else if (config.t_grid[0] > 0.0) {
    // Everything passed: maybe the initial state already meets the target.
    OptimizerConfig oc = grape_config;
    oc.seed = derive_seed(config.seed, kZeroProbeStream);
    OptimizationOutcome zero = optimize(params, cost, psi0, 0.0,
                                        config.n_segments,
                                        InitStrategy::zero(), oc);
    MetPoint p = make_point(0.0, cost, config.threshold, std::move(zero), true);
    const bool instant = p.feasible;
    out.points.push_back(std::move(p));
    if (instant) {
      out.met_estimate = 0.0;
      out.bracket_below = 0.0;
      out.bracket_above = 0.0;
      return;
    }
  } else {
    // The grid starts at T = 0 and that point is feasible.
    out.met_estimate = 0.0;
    out.bracket_below = 0.0;
    out.bracket_above = 0.0;
    return;
  }

  if (config.refine_resolution) {
    const Real res = *config.refine_resolution;
    for (std::uint64_t probe = 0; hi - lo > res && probe < 64; ++probe) {
      const Real mid = 0.5 * (lo + hi);
      OptimizerConfig oc = grape_config;
      oc.seed = derive_seed(config.seed, kRefineStreamBase + probe);
      oc.n_random_restarts = config.warm_starts;
      OptimizationOutcome outcome =
          optimize(params, cost, psi0, mid, config.n_segments,
                   InitStrategy::warm_from(winner), oc);
      MetPoint p =
          make_point(mid, cost, config.threshold, std::move(outcome), true);
      const bool ok = p.feasible;
      out.points.push_back(std::move(p));
      if (ok) {
        hi = mid;
        winner = out.points.back().outcome.best_schedule;
      } else {
        lo = mid;
      }
    }
  }

  out.met_estimate = hi;
  out.bracket_below = lo;
  out.bracket_above = hi;
}

void sort_points(MetScanResult& out) {
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const MetPoint& a, const MetPoint& b) {
                     return a.total_time < b.total_time;
                   });
}

// Scan core. When external_warm is non-null it carries one schedule per grid
// index (the previous bond's winners); every point then starts from its
// same-duration schedule plus seed_starts random companions and the in-scan
// chain is not used.
MetScanResult scan_core(const DeviceParams& params, const CostFunction& cost,
                        const StateVector& psi0, const MetScanConfig& config,
                        const OptimizerConfig& grape_config,
                        const std::vector<ControlSchedule>* external_warm) {
  check_scan_config(config);
  const int n = static_cast<int>(config.t_grid.size());

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i)
    order[i] = config.scan_direction == ScanDirection::Ascending ? i
                                                                 : n - 1 - i;

  std::vector<MetPoint> grid_points(n);
  const ControlSchedule* prev = nullptr;
  for (int k : order) {
    OptimizerConfig oc = grape_config;
    oc.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
    InitStrategy init;
    if (external_warm != nullptr) {
      init = InitStrategy::warm_from((*external_warm)[k]);
      oc.n_random_restarts = config.seed_starts;
    } else if (prev != nullptr && config.warm_start) {
      init = InitStrategy::warm_from(*prev);
      oc.n_random_restarts = config.warm_starts;
    } else {
      init = seed_init(config, oc);
    }
    OptimizationOutcome outcome = optimize(
        params, cost, psi0, config.t_grid[k], config.n_segments, init, oc);
    grid_points[k] =
        make_point(config.t_grid[k], cost, config.threshold,
                   std::move(outcome), false);
    prev = &grid_points[k].outcome.best_schedule;
  }

  MetScanResult out;
  out.points = grid_points;
  bracket_and_refine(params, cost, psi0, config, grape_config, grid_points,
                     out);
  sort_points(out);
  return out;
}

}  // namespace

MetScanResult scan_met(const DeviceParams& params, const CostFunction& cost,
                       const StateVector& psi0, const MetScanConfig& config,
                       const OptimizerConfig& grape_config) {
  return scan_core(params, cost, psi0, config, grape_config, nullptr);
}

std::vector<MetScanResult> bond_distance_sweep(
    const DeviceParams& params, const std::vector<PauliSum>& series,
    const MetScanConfig& config, const OptimizerConfig& grape_config) {
  if (series.empty())
    throw ValidationError("series", "bond-distance series is empty");
  for (std::size_t k = 0; k < series.size(); ++k) {
    const std::string where = "series[" + std::to_string(k) + "]";
    if (series[k].n_qubits != params.n_qubits)
      throw ValidationError(where, "qubit count differs from the device");
    if (!series[k].metadata.hf_state)
      throw ValidationError(where, "missing Hartree-Fock state metadata");
    if (series.size() > 1 && !series[k].metadata.bond_distance_angstrom)
      throw ValidationError(where, "missing bond-distance metadata");
  }
  if (series.size() > 1) {
    const bool up = *series[1].metadata.bond_distance_angstrom >
                    *series[0].metadata.bond_distance_angstrom;
    for (std::size_t k = 1; k < series.size(); ++k) {
      const Real prev = *series[k - 1].metadata.bond_distance_angstrom;
      const Real cur = *series[k].metadata.bond_distance_angstrom;
      if (!(up ? cur > prev : cur < prev))
        throw ValidationError("series[" + std::to_string(k) + "]",
                              "bond distances must be strictly monotone");
    }
  }

  std::vector<MetScanResult> results;
  results.reserve(series.size());
  std::vector<ControlSchedule> prev_winners;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const GroundTruth truth = ground_truth(series[k]);
    const CostFunction cost =
        CostFunction::expectation_of(series[k], truth.energy);
    const StateVector psi0 = basis_state(
        series[k].n_qubits,
        basis_index_from_bits(*series[k].metadata.hf_state));

    MetScanConfig entry_config = config;
    entry_config.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
    if (k == 0) entry_config.seed = config.seed;  // entry 0 IS scan_met
    results.push_back(scan_core(params, cost, psi0, entry_config, grape_config,
                                k == 0 ? nullptr : &prev_winners));

    prev_winners.clear();
    prev_winners.reserve(config.t_grid.size());
    for (const MetPoint& p : results.back().points)
      if (!p.refined) prev_winners.push_back(p.outcome.best_schedule);
  }
  return results;
}

DeviceParams scale_device(const DeviceParams& base, SweepAxis axis,
                          Real factor) {
  if (!(factor > 0.0))
    throw ValidationError("sweep.factor", "factors must be positive");
  DeviceParams scaled = base;
  switch (axis) {
    case SweepAxis::IqMax:
      scaled.iq_max *= factor;
      break;
    case SweepAxis::JMax:
      scaled.j_max *= factor;
      break;
    case SweepAxis::DeltaB:
      scaled.zeeman_offsets *= factor;
      break;
  }
  return scaled;
}

std::vector<SweepEntry> parameter_sweep(const DeviceParams& base,
                                        SweepAxis axis,
                                        const std::vector<Real>& factors,
                                        const MetScanTask& inner) {
  if (factors.empty())
    throw ValidationError("sweep.factors", "factor list is empty");
  std::vector<SweepEntry> entries;
  entries.reserve(factors.size());
  for (Real factor : factors) {
    SweepEntry entry;
    entry.factor = factor;
    entry.device = scale_device(base, axis, factor);
    entry.result = scan_met(entry.device, inner.cost, inner.initial_state,
                            inner.scan, inner.optimizer);
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace spinmet
