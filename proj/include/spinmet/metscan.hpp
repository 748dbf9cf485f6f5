#pragma once
// Minimal-evolution-time (MET) estimation. A scan optimizes pulses at every
// point of a duration grid, chaining warm starts between neighboring points,
// and reports the smallest duration from which every longer grid point stays
// within threshold of the cost floor — optionally sharpened by bisection.
// On top of the single scan sit the chained bond-distance protocol for
// molecular Hamiltonian series and device-parameter sweeps (drive amplitude,
// exchange ceiling, Zeeman spread) that rerun one scan task per scaled device.

#include <cstdint>
#include <optional>
#include <vector>

#include "spinmet/cost.hpp"
#include "spinmet/device.hpp"
#include "spinmet/grape.hpp"
#include "spinmet/pauli.hpp"
#include "spinmet/types.hpp"

namespace spinmet {

enum class ScanDirection { Ascending, Descending };

struct MetScanConfig {
  std::vector<Real> t_grid;  // ns; strictly ascending, nonnegative
  Real threshold = 1e-7;     // feasibility bound on cost excess over the floor
  int n_segments = 10;       // piecewise-constant segments per control
  // Descending replays the random-state protocol: seed the chain at the
  // longest duration (where optimization is easy) and shorten from there.
  ScanDirection scan_direction = ScanDirection::Descending;
  bool warm_start = true;  // chain each point from the previous winner
  // When set, bisect the bracket around the smallest feasible duration until
  // its width drops below this resolution (ns).
  std::optional<Real> refine_resolution;
  int seed_starts = 3;          // random starts at the first scanned point
  bool seed_with_zero = false;  // add a zero-amplitude start there as well
  int warm_starts = 2;          // random companions beside each warm start
  std::uint64_t seed = 0;
};

struct MetPoint {
  Real total_time = 0.0;
  Real best_cost = 0.0;  // optimized raw cost C(T)
  Real excess = 0.0;     // C(T) minus the cost floor
  bool converged = false;
  bool feasible = false;  // converged and excess <= threshold
  bool refined = false;   // bisection probe (or the zero-duration check)
  OptimizationOutcome outcome;
};

struct MetScanResult {
  std::vector<MetPoint> points;  // ascending in T; grid plus refinement probes
  // Smallest known-feasible duration; absent when even the longest grid point
  // misses the threshold (the grid ceiling is too small).
  std::optional<Real> met_estimate;
  // Bracket around the estimate: largest duration that failed (0 when none
  // failed) and smallest that passed. met_estimate equals bracket_above.
  Real bracket_below = 0.0;
  std::optional<Real> bracket_above;
};

// Optimizes at each grid duration in scan order. The first scanned point
// starts from seed_starts random schedules (plus a zero schedule if
// requested); later points start from the previous point's winner resampled
// to the new duration plus warm_starts random companions. A point counts as
// feasible only if the optimizer converged and its excess is within
// threshold; failure to converge is deliberately conflated with physical
// infeasibility (restarts are the mitigation). If every grid point is
// feasible the zero-duration cost is probed as well, so a target already
// reachable at T = 0 reports a MET of exactly 0. Fully deterministic in
// config.seed.
MetScanResult scan_met(const DeviceParams& params, const CostFunction& cost,
                       const StateVector& psi0, const MetScanConfig& config,
                       const OptimizerConfig& grape_config);

// Chained protocol across a molecular dissociation series, ordered the way it
// should be scanned (easy end first). Entry 0 runs scan_met unchanged; every
// later entry optimizes each grid duration starting from the previous entry's
// winner at that same duration plus seed_starts random companions. Each
// entry's floor is its own dense ground-state energy and its initial state is
// the Hartree-Fock bitstring from the metadata (missing metadata throws
// ValidationError). Returns one result per entry, in input order.
std::vector<MetScanResult> bond_distance_sweep(
    const DeviceParams& params, const std::vector<PauliSum>& series,
    const MetScanConfig& config, const OptimizerConfig& grape_config);

// --- device-parameter sweeps -------------------------------------------------

enum class SweepAxis { IqMax, JMax, DeltaB };

// Returns a copy of base with the chosen knob scaled: iq_max or j_max
// multiplied by factor, or every Zeeman offset multiplied jointly (equal
// spacing and zero mean are preserved). factor must be positive.
DeviceParams scale_device(const DeviceParams& base, SweepAxis axis,
                          Real factor);

// One scan task, reusable across scaled devices.
struct MetScanTask {
  CostFunction cost;
  StateVector initial_state;
  MetScanConfig scan;
  OptimizerConfig optimizer;
};

struct SweepEntry {
  Real factor = 1.0;
  DeviceParams device;
  MetScanResult result;
};

// Runs the task once per factor on the scaled device. Each entry reuses the
// task's seed verbatim, so factor 1.0 reproduces the unscaled run
// bit-for-bit and entries are independent of one another.
std::vector<SweepEntry> parameter_sweep(const DeviceParams& base,
                                        SweepAxis axis,
                                        const std::vector<Real>& factors,
                                        const MetScanTask& inner);

}  // namespace spinmet
