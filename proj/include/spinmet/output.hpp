#pragma once
// Artifact plumbing for campaign runs: run-configuration parsing (JSON),
// deterministic CSV/JSON serialization of scan, sweep, campaign, fit, and
// budget results, the run manifest, and the content hash that ties artifacts
// back to the exact configuration bytes. Everything here is pure string
// transformation except the two tiny file helpers, so reruns with identical
// configs produce byte-identical bodies.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spinmet/bounds.hpp"
#include "spinmet/grape.hpp"
#include "spinmet/haar.hpp"
#include "spinmet/metscan.hpp"
#include "spinmet/pauli.hpp"
#include "spinmet/types.hpp"

namespace spinmet {

// --- primitive formatting ---------------------------------------------------

// Shortest decimal string that round-trips to the same double (to_chars);
// the single formatter used by every CSV and JSON writer below.
std::string format_real(Real value);

// RFC-4180 quoting: cells containing commas, quotes, or newlines are wrapped
// in double quotes with inner quotes doubled; everything else passes through.
std::string csv_escape(const std::string& cell);

// One CSV record: escaped cells joined by commas, terminated by '\n'.
std::string csv_line(const std::vector<std::string>& cells);

// FNV-1a 64-bit content hash (used to fingerprint configuration bytes).
std::uint64_t fnv1a64(std::string_view bytes);

// Fixed-width lowercase hex (16 digits).
std::string hex64(std::uint64_t value);

// --- file helpers ------------------------------------------------------------

// Reads a whole file; unreadable paths raise SchemaError (they are input
// problems, not internal ones).
std::string read_text_file(const std::string& path);

// Writes bytes, creating parent directories; failures raise std::runtime_error.
void write_text_file(const std::string& path, const std::string& body);

// --- run configuration --------------------------------------------------------

enum class TaskKind { MetScan, BondSweep, ParamSweep, HaarCampaign, Fit, Bounds };

std::string task_name(TaskKind task);

// A state or cost target named in a config: either a computational basis
// bitstring or the ground space of a Pauli-sum Hamiltonian file.
struct TargetSpec {
  enum class Kind { Unset, Basis, PauliGround };
  Kind kind = Kind::Unset;
  std::string bits;              // Basis: leftmost character = qubit 1
  std::string hamiltonian_path;  // PauliGround: resolved path
};

// Parsed run configuration. Path fields are resolved against the directory
// containing the config file; output_dir is resolved against the working
// directory. The seed is mandatory for every task (no ambient randomness).
struct RunConfig {
  TaskKind task = TaskKind::Bounds;
  std::uint64_t seed = 0;
  std::string output_dir;
  int parallelism = 0;  // worker threads; 0 = all available cores

  // device-based tasks
  std::string device_path;
  TargetSpec target;
  TargetSpec initial;  // optional; Unset = task default

  // bond sweep
  std::vector<std::string> hamiltonian_paths;  // easy end of the series first

  // scan tasks (met-scan, bond-sweep, param-sweep); scan.seed = RunConfig seed
  MetScanConfig scan;
  OptimizerConfig optimizer;  // also drives Haar campaigns

  // parameter sweep
  SweepAxis axis = SweepAxis::IqMax;
  std::vector<Real> factors;

  // Haar campaign (qubit count comes from the device file)
  int campaign_n_pairs = 0;
  std::vector<Real> campaign_t_grid;  // strictly descending, as scanned
  int campaign_n_segments = 10;
  Real campaign_threshold = 1e-7;
  long long bootstrap_resamples = kDefaultBootstrapResamples;  // 0 = no bands
  Real bootstrap_confidence = kDefaultBootstrapConfidence;

  // fit task
  std::string estimate_csv;  // resolved path to a t/cdf/variance table
  int fit_d = 0;             // Hilbert-space dimension assumed by the fit
  int fit_max_terms = 12;

  // bounds task
  Real pi_gate_time = 200.0;  // ns
  Real swap_time = 0.5;       // ns

  std::string raw_text;  // exact config bytes (manifest hash input)
  std::string base_dir;  // directory of the config file
};

// Parses and validates a configuration. Structural problems (bad JSON,
// missing or mistyped fields, unknown task names) raise SchemaError with the
// offending element's path; semantic ones (non-monotone grids, out-of-range
// values) raise ValidationError.
RunConfig parse_run_config(const std::string& json_text,
                           const std::string& origin = "",
                           const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);

// --- scan / sweep serializers ---------------------------------------------

// kind,t_ns,best_cost,excess,converged,feasible,refined,best_restart: one
// "point" row per optimized duration (grid plus bisection probes, ascending)
// and a final "met" row whose t_ns is the MET estimate (empty when the grid
// ceiling is infeasible).
std::string met_scan_csv(const MetScanResult& result);

// met_scan_csv prefixed by the sweep factor column.
std::string sweep_csv(const std::vector<SweepEntry>& entries);

// met_scan_csv prefixed by entry index and bond distance metadata.
std::string bond_sweep_csv(const std::vector<PauliSum>& series,
                           const std::vector<MetScanResult>& results);

std::string met_summary_json(const MetScanResult& result);
std::string sweep_summary_json(SweepAxis axis,
                               const std::vector<SweepEntry>& entries);
std::string bond_sweep_summary_json(const std::vector<PauliSum>& series,
                                    const std::vector<MetScanResult>& results);

// --- campaign serializers ---------------------------------------------------

// pair,t_ns,infidelity,feasible,passes — one row per included pair and grid
// duration (ascending durations within each pair).
std::string campaign_pairs_csv(const CdfEstimate& estimate);

// pair,met_below_ns,met_above_ns,excluded,notice — every pair, including
// excluded ones (empty met cells).
std::string campaign_mets_csv(const CdfEstimate& estimate);

// t_ns,cdf,variance,ci_low,ci_high — CI cells empty without bootstrap bands.
std::string campaign_cdf_csv(const CdfEstimate& estimate);

std::string campaign_summary_json(const CdfEstimate& estimate);

// --- fit serializers ----------------------------------------------------------

// n_terms,n_parameters,edge_speed,chi2,n_dof,chi2_per_dof,selected — one row
// per tried term count, selected = 1 on the winning row.
std::string selection_trail_csv(const ExpansionSelection& selection);

// t_ns,cdf,variance,hi_fit,best_fit — data and both fitted curves.
std::string fit_curves_csv(const CdfEstimate& estimate, const CdfFit& hi_fit,
                           const CdfFit& best);

// Full fit record: the constant-speed fit (with its standard error from the
// covariance), the selected expansion, and the whole selection trail.
std::string fit_report_json(const CdfFit& hi_fit,
                            const ExpansionSelection& selection);

// A t/cdf/variance table read back from campaign_cdf_csv-style files
// (extra columns are ignored). Structural problems raise SchemaError.
struct EstimateTable {
  std::vector<Real> t;
  std::vector<Real> cdf;
  std::vector<Real> variance;
};
EstimateTable parse_estimate_csv(const std::string& text,
                                 const std::string& origin = "");

// --- bounds serializers -----------------------------------------------------

std::string bounds_json(const GateTimeBudget& budget);

// Human-readable budget table (also what the CLI prints).
std::string bounds_text(const GateTimeBudget& budget);

// --- manifest ------------------------------------------------------------------

// manifest.json body: tool/version, task, config hash, seed, parallelism,
// wall time, artifact names, and accumulated warnings. The wall time is the
// only field expected to differ between reruns.
std::string manifest_json(const RunConfig& config, std::uint64_t config_hash,
                          Real wall_seconds,
                          const std::vector<std::string>& artifacts,
                          const std::vector<std::string>& warnings);

}  // namespace spinmet
