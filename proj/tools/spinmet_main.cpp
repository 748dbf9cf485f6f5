// Command-line front end. `run` executes one configured task (MET scan,
// bond-distance or device-parameter sweep, Haar-pair campaign, CDF fit,
// gate-time budget) and writes its artifacts plus a manifest; `validate`
// checks a configuration and every file it references without running
// anything; `report` renders a human summary of a completed run directory.
// Exit codes: 0 success (recoverable issues become manifest warnings),
// 1 internal error, 2 configuration/schema problems, 3 validation failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spinmet/bounds.hpp"
#include "spinmet/cost.hpp"
#include "spinmet/device.hpp"
#include "spinmet/errors.hpp"
#include "spinmet/haar.hpp"
#include "spinmet/metscan.hpp"
#include "spinmet/output.hpp"
#include "spinmet/pauli.hpp"
#include "spinmet/rng.hpp"
#include "spinmet/types.hpp"

namespace {

using nlohmann::json;

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string join_strings(const std::vector<std::string>& parts,
                         const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

// Collects the artifacts and warnings of one run; the manifest is written
// from this after the task body finishes.
struct RunLog {
  std::string output_dir;
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;

  void emit(const std::string& name, const std::string& body) {
    spinmet::write_text_file(join_path(output_dir, name), body);
    artifacts.push_back(name);
  }
};

// --- checked loaders --------------------------------------------------------

spinmet::DeviceParams load_checked_device(const std::string& path) {
  spinmet::DeviceParams device = spinmet::load_device_params(path);
  const std::vector<std::string> issues = spinmet::device_params_issues(device);
  if (!issues.empty())
    throw spinmet::ValidationError(path, join_strings(issues, "; "));
  return device;
}

spinmet::PauliSum load_checked_pauli(const std::string& path, int n_qubits) {
  spinmet::PauliSum sum = spinmet::load_pauli_sum(path);
  const std::vector<std::string> issues = spinmet::pauli_sum_issues(sum);
  if (!issues.empty())
    throw spinmet::ValidationError(path, join_strings(issues, "; "));
  if (sum.n_qubits != n_qubits)
    throw spinmet::ValidationError(
        path, "hamiltonian acts on " + std::to_string(sum.n_qubits) +
                  " qubit(s) but the device has " + std::to_string(n_qubits));
  return sum;
}

// --- target / initial-state resolution ---------------------------------------

spinmet::StateVector state_from_bits(const std::string& bits, int n_qubits,
                                     const std::string& where) {
  if (static_cast<int>(bits.size()) != n_qubits)
    throw spinmet::ValidationError(
        where, "bitstring \"" + bits + "\" has " +
                   std::to_string(bits.size()) + " bit(s) but the device has " +
                   std::to_string(n_qubits) + " qubit(s)");
  return spinmet::basis_state(n_qubits, spinmet::basis_index_from_bits(bits));
}

struct Problem {
  spinmet::CostFunction cost;
  spinmet::StateVector initial_state;
};

// Builds the optimization target and initial state named in the config.
// A basis target costs infidelity to that basis state; a pauli-ground target
// costs the energy of the loaded Hamiltonian above its exact ground energy.
// An unset initial state defaults to the Hartree-Fock bitstring from the
// Hamiltonian metadata when available and to |0...0> otherwise.
Problem build_problem(const spinmet::RunConfig& config,
                      const spinmet::DeviceParams& device) {
  Problem problem;
  std::string default_bits(static_cast<std::size_t>(device.n_qubits), '0');

  switch (config.target.kind) {
    case spinmet::TargetSpec::Kind::Basis:
      problem.cost = spinmet::CostFunction::infidelity_to(
          state_from_bits(config.target.bits, device.n_qubits, "target.bits"));
      break;
    case spinmet::TargetSpec::Kind::PauliGround: {
      spinmet::PauliSum sum =
          load_checked_pauli(config.target.hamiltonian_path, device.n_qubits);
      if (sum.metadata.hf_state) default_bits = *sum.metadata.hf_state;
      const spinmet::GroundTruth truth = spinmet::ground_truth(sum);
      problem.cost =
          spinmet::CostFunction::expectation_of(std::move(sum), truth.energy);
      break;
    }
    case spinmet::TargetSpec::Kind::Unset:
      throw spinmet::SchemaError("target", "is required for this task");
  }

  switch (config.initial.kind) {
    case spinmet::TargetSpec::Kind::Unset:
      problem.initial_state =
          state_from_bits(default_bits, device.n_qubits, "initial (default)");
      break;
    case spinmet::TargetSpec::Kind::Basis:
      problem.initial_state =
          state_from_bits(config.initial.bits, device.n_qubits, "initial.bits");
      break;
    case spinmet::TargetSpec::Kind::PauliGround: {
      const spinmet::PauliSum sum =
          load_checked_pauli(config.initial.hamiltonian_path, device.n_qubits);
      problem.initial_state = spinmet::ground_truth(sum).state;
      break;
    }
  }
  return problem;
}

// --- task bodies --------------------------------------------------------------

std::string format_met(const std::optional<spinmet::Real>& met) {
  return met ? spinmet::format_real(*met) + " ns" : std::string("not bracketed");
}

void run_met_scan(const spinmet::RunConfig& config, RunLog& log) {
  const spinmet::DeviceParams device = load_checked_device(config.device_path);
  const Problem problem = build_problem(config, device);
  const spinmet::MetScanResult result =
      spinmet::scan_met(device, problem.cost, problem.initial_state,
                        config.scan, config.optimizer);
  log.emit("met_scan.csv", spinmet::met_scan_csv(result));
  log.emit("summary.json", spinmet::met_summary_json(result));
  if (result.met_estimate) {
    std::printf("met-scan: MET %s (bracket %s .. %s ns)\n",
                format_met(result.met_estimate).c_str(),
                spinmet::format_real(result.bracket_below).c_str(),
                spinmet::format_real(*result.bracket_above).c_str());
  } else {
    log.warnings.push_back(
        "no duration on the grid reached the threshold; raise the grid "
        "ceiling to bracket the MET");
    std::printf("met-scan: MET not bracketed by the grid\n");
  }
}

void run_bond_sweep(const spinmet::RunConfig& config, RunLog& log) {
  const spinmet::DeviceParams device = load_checked_device(config.device_path);
  std::vector<spinmet::PauliSum> series;
  series.reserve(config.hamiltonian_paths.size());
  for (const std::string& path : config.hamiltonian_paths)
    series.push_back(load_checked_pauli(path, device.n_qubits));
  const std::vector<spinmet::MetScanResult> results =
      spinmet::bond_distance_sweep(device, series, config.scan,
                                   config.optimizer);
  log.emit("bond_sweep.csv", spinmet::bond_sweep_csv(series, results));
  log.emit("summary.json", spinmet::bond_sweep_summary_json(series, results));
  for (std::size_t e = 0; e < results.size(); ++e) {
    std::string label = "entry " + std::to_string(e);
    if (series[e].metadata.bond_distance_angstrom)
      label += " (bond " +
               spinmet::format_real(*series[e].metadata.bond_distance_angstrom) +
               " A)";
    std::printf("bond-sweep %s: MET %s\n", label.c_str(),
                format_met(results[e].met_estimate).c_str());
    if (!results[e].met_estimate)
      log.warnings.push_back(label + ": no duration on the grid reached the "
                                     "threshold");
  }
}

const char* axis_name(spinmet::SweepAxis axis) {
  switch (axis) {
    case spinmet::SweepAxis::IqMax: return "iq_max";
    case spinmet::SweepAxis::JMax: return "j_max";
    case spinmet::SweepAxis::DeltaB: return "delta_b";
  }
  return "?";
}

void run_param_sweep(const spinmet::RunConfig& config, RunLog& log) {
  const spinmet::DeviceParams device = load_checked_device(config.device_path);
  const Problem problem = build_problem(config, device);
  const spinmet::MetScanTask task{problem.cost, problem.initial_state,
                                  config.scan, config.optimizer};
  const std::vector<spinmet::SweepEntry> entries =
      spinmet::parameter_sweep(device, config.axis, config.factors, task);
  log.emit("param_sweep.csv", spinmet::sweep_csv(entries));
  log.emit("summary.json", spinmet::sweep_summary_json(config.axis, entries));
  for (const spinmet::SweepEntry& entry : entries) {
    std::printf("param-sweep %s x %s: MET %s\n", axis_name(config.axis),
                spinmet::format_real(entry.factor).c_str(),
                format_met(entry.result.met_estimate).c_str());
    if (!entry.result.met_estimate)
      log.warnings.push_back("factor " + spinmet::format_real(entry.factor) +
                             ": no duration on the grid reached the threshold");
  }
}

void run_haar_campaign(const spinmet::RunConfig& config, RunLog& log) {
  const spinmet::DeviceParams device = load_checked_device(config.device_path);
  const spinmet::StatePairSample sample = spinmet::sample_pairs(
      device.n_qubits, config.campaign_n_pairs, config.seed);
  spinmet::CdfEstimate estimate = spinmet::estimate_cdf(
      sample, device, config.campaign_t_grid, config.campaign_n_segments,
      config.campaign_threshold, config.optimizer, config.parallelism);
  for (std::size_t p = 0; p < estimate.pairs.size(); ++p) {
    if (estimate.pairs[p].excluded)
      log.warnings.push_back("pair " + std::to_string(p) +
                             " excluded: " + estimate.pairs[p].notice);
  }
  if (config.bootstrap_resamples > 0) {
    estimate = spinmet::bootstrap_cdf(estimate, config.bootstrap_resamples,
                                      config.bootstrap_confidence,
                                      spinmet::derive_seed(config.seed, 1));
  }
  log.emit("pairs.csv", spinmet::campaign_pairs_csv(estimate));
  log.emit("mets.csv", spinmet::campaign_mets_csv(estimate));
  log.emit("cdf.csv", spinmet::campaign_cdf_csv(estimate));
  log.emit("summary.json", spinmet::campaign_summary_json(estimate));
  const std::size_t last = estimate.cdf.empty() ? 0 : estimate.cdf.size() - 1;
  std::printf(
      "haar-campaign: %lld/%zu pairs included; CDF reaches %s at %s ns\n",
      static_cast<long long>(estimate.n_included()), estimate.pairs.size(),
      estimate.cdf.empty() ? "-" : spinmet::format_real(estimate.cdf[last]).c_str(),
      estimate.t_grid.empty() ? "-"
                              : spinmet::format_real(estimate.t_grid[last]).c_str());

  if (config.bootstrap_resamples <= 0) {
    log.warnings.push_back(
        "fit skipped: bootstrap disabled, so no variance weights are "
        "available");
    return;
  }
  const int d = 1 << device.n_qubits;
  try {
    const spinmet::CdfFit hi = spinmet::fit_hi(estimate, d);
    const spinmet::ExpansionSelection selection =
        spinmet::select_expansion(estimate, d, config.fit_max_terms);
    log.emit("fit.json", spinmet::fit_report_json(hi, selection));
    log.emit("selection_trail.csv", spinmet::selection_trail_csv(selection));
    log.emit("fit_curves.csv",
             spinmet::fit_curves_csv(estimate, hi, selection.best));
    std::printf(
        "fit: constant-speed edge speed %s /ns (chi2/dof %s); selected "
        "%zu-term expansion (chi2/dof %s)\n",
        spinmet::format_real(hi.v).c_str(),
        spinmet::format_real(hi.chi2_per_dof()).c_str(),
        selection.best.coefficients.size(),
        spinmet::format_real(selection.best.chi2_per_dof()).c_str());
  } catch (const std::exception& e) {
    log.warnings.push_back(std::string("fit skipped: ") + e.what());
  }
}

void run_fit(const spinmet::RunConfig& config, RunLog& log) {
  const spinmet::EstimateTable table = spinmet::parse_estimate_csv(
      spinmet::read_text_file(config.estimate_csv), config.estimate_csv);
  spinmet::CdfEstimate estimate;
  estimate.t_grid = table.t;
  estimate.cdf = table.cdf;
  estimate.variance = table.variance;
  const spinmet::CdfFit hi = spinmet::fit_hi(estimate, config.fit_d);
  const spinmet::ExpansionSelection selection =
      spinmet::select_expansion(estimate, config.fit_d, config.fit_max_terms);
  log.emit("fit.json", spinmet::fit_report_json(hi, selection));
  log.emit("selection_trail.csv", spinmet::selection_trail_csv(selection));
  log.emit("fit_curves.csv",
           spinmet::fit_curves_csv(estimate, hi, selection.best));
  const spinmet::Real se = selection.best.covariance.size() > 0
                               ? std::sqrt(hi.covariance(0, 0))
                               : 0.0;
  std::printf("fit: constant-speed edge speed %s +/- %s /ns (chi2/dof %s)\n",
              spinmet::format_real(hi.v).c_str(),
              spinmet::format_real(se).c_str(),
              spinmet::format_real(hi.chi2_per_dof()).c_str());
  std::printf("fit: selected %zu-term expansion (chi2/dof %s)\n",
              selection.best.coefficients.size(),
              spinmet::format_real(selection.best.chi2_per_dof()).c_str());
}

void run_bounds(const spinmet::RunConfig& config, RunLog& log) {
  const spinmet::GateTimeBudget budget =
      spinmet::reference_bounds(config.pi_gate_time, config.swap_time);
  log.emit("bounds.json", spinmet::bounds_json(budget));
  std::fputs(spinmet::bounds_text(budget).c_str(), stdout);
}

// --- commands -----------------------------------------------------------------

int run_command(const std::string& config_path) {
  const auto start = std::chrono::steady_clock::now();
  const spinmet::RunConfig config = spinmet::load_run_config(config_path);
  RunLog log;
  log.output_dir = config.output_dir;

  switch (config.task) {
    case spinmet::TaskKind::MetScan: run_met_scan(config, log); break;
    case spinmet::TaskKind::BondSweep: run_bond_sweep(config, log); break;
    case spinmet::TaskKind::ParamSweep: run_param_sweep(config, log); break;
    case spinmet::TaskKind::HaarCampaign: run_haar_campaign(config, log); break;
    case spinmet::TaskKind::Fit: run_fit(config, log); break;
    case spinmet::TaskKind::Bounds: run_bounds(config, log); break;
  }

  const spinmet::Real wall =
      std::chrono::duration<spinmet::Real>(std::chrono::steady_clock::now() -
                                           start)
          .count();
  spinmet::write_text_file(
      join_path(config.output_dir, "manifest.json"),
      spinmet::manifest_json(config, spinmet::fnv1a64(config.raw_text), wall,
                             log.artifacts, log.warnings));
  for (const std::string& warning : log.warnings)
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  std::printf("%zu artifact(s) + manifest written to %s\n",
              log.artifacts.size(), config.output_dir.c_str());
  return 0;
}

int validate_command(const std::string& config_path) {
  const spinmet::RunConfig config = spinmet::load_run_config(config_path);
  switch (config.task) {
    case spinmet::TaskKind::MetScan:
    case spinmet::TaskKind::ParamSweep: {
      const spinmet::DeviceParams device =
          load_checked_device(config.device_path);
      build_problem(config, device);
      break;
    }
    case spinmet::TaskKind::BondSweep: {
      const spinmet::DeviceParams device =
          load_checked_device(config.device_path);
      for (const std::string& path : config.hamiltonian_paths) {
        const spinmet::PauliSum sum =
            load_checked_pauli(path, device.n_qubits);
        if (!sum.metadata.hf_state)
          throw spinmet::ValidationError(
              path, "metadata.hf_state is required for bond sweeps");
      }
      break;
    }
    case spinmet::TaskKind::HaarCampaign:
      load_checked_device(config.device_path);
      break;
    case spinmet::TaskKind::Fit:
      spinmet::parse_estimate_csv(
          spinmet::read_text_file(config.estimate_csv), config.estimate_csv);
      break;
    case spinmet::TaskKind::Bounds:
      break;
  }
  std::printf("ok: %s configuration is valid\n",
              spinmet::task_name(config.task).c_str());
  return 0;
}

// --- report -------------------------------------------------------------------

json read_json_artifact(const std::string& dir, const std::string& name) {
  const std::string path = join_path(dir, name);
  json doc = json::parse(spinmet::read_text_file(path), nullptr, false);
  if (doc.is_discarded())
    throw spinmet::SchemaError(path, "is not valid JSON");
  return doc;
}

std::string render_value(const json& value) {
  if (value.is_null()) return "-";
  if (value.is_number()) return spinmet::format_real(value.get<double>());
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

std::string field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  return it == doc.end() ? "-" : render_value(*it);
}

void report_fit_record(const json& record, const char* label) {
  std::printf("  %s: edge speed %s +/- %s /ns, %s term(s), chi2/dof %s\n",
              label, field(record, "edge_speed").c_str(),
              field(record, "edge_speed_se").c_str(),
              field(record, "n_terms").c_str(),
              field(record, "chi2_per_dof").c_str());
}

void report_fit_file(const std::string& dir) {
  const json fit = read_json_artifact(dir, "fit.json");
  if (fit.contains("constant_speed"))
    report_fit_record(fit["constant_speed"], "constant-speed model");
  if (fit.contains("selected"))
    report_fit_record(fit["selected"], "selected expansion");
  if (fit.contains("trail") && fit["trail"].is_array()) {
    std::printf("  selection trail (terms: chi2/dof):");
    for (const json& record : fit["trail"])
      std::printf(" %s: %s;", field(record, "n_terms").c_str(),
                  field(record, "chi2_per_dof").c_str());
    std::printf("\n");
  }
}

int report_command(const std::string& dir) {
  const json manifest = read_json_artifact(dir, "manifest.json");
  const std::string task = field(manifest, "task");
  std::printf("run directory: %s\n", dir.c_str());
  std::printf("  task: %s, seed %s, config hash %s\n", task.c_str(),
              field(manifest, "seed").c_str(),
              field(manifest, "config_hash_fnv1a64").c_str());
  std::printf("  wall time: %s s\n",
              field(manifest, "wall_time_seconds").c_str());

  if (task == "met-scan") {
    const json summary = read_json_artifact(dir, "summary.json");
    std::printf("  MET: %s ns (bracket %s .. %s ns), %s/%s grid+probe "
                "point(s) feasible\n",
                field(summary, "met_ns").c_str(),
                field(summary, "bracket_below_ns").c_str(),
                field(summary, "bracket_above_ns").c_str(),
                field(summary, "n_feasible").c_str(),
                field(summary, "n_points").c_str());
  } else if (task == "bond-sweep") {
    const json summary = read_json_artifact(dir, "summary.json");
    for (const json& row : summary.value("entries", json::array()))
      std::printf("  entry %s: bond %s A, MET %s ns\n",
                  field(row, "entry").c_str(),
                  field(row, "bond_angstrom").c_str(),
                  field(row, "met_ns").c_str());
  } else if (task == "param-sweep") {
    const json summary = read_json_artifact(dir, "summary.json");
    std::printf("  axis: %s\n", field(summary, "axis").c_str());
    for (const json& row : summary.value("entries", json::array()))
      std::printf("  factor %s: MET %s ns\n", field(row, "factor").c_str(),
                  field(row, "met_ns").c_str());
  } else if (task == "haar-campaign") {
    const json summary = read_json_artifact(dir, "summary.json");
    std::printf("  pairs: %s sampled, %s included, %s without a MET on the "
                "grid\n",
                field(summary, "n_pairs").c_str(),
                field(summary, "n_included").c_str(),
                field(summary, "n_pairs_without_met").c_str());
    std::printf("  largest MET: %s ns at threshold %s\n",
                field(summary, "max_met_above_ns").c_str(),
                field(summary, "threshold").c_str());
    if (std::filesystem::exists(join_path(dir, "fit.json")))
      report_fit_file(dir);
  } else if (task == "fit") {
    report_fit_file(dir);
  } else if (task == "bounds") {
    const json bounds = read_json_artifact(dir, "bounds.json");
    std::printf("  pi gate %s ns, swap ceiling %s ns\n",
                field(bounds, "pi_gate_time_ns").c_str(),
                field(bounds, "swap_alpha_max_time_ns").c_str());
    std::printf("  one-qubit max %s ns, two-qubit max %s ns, from |01> max "
                "%s ns, two-qubit min %s ns\n",
                field(bounds, "one_qubit_max_ns").c_str(),
                field(bounds, "two_qubit_max_ns").c_str(),
                field(bounds, "two_qubit_from_01_max_ns").c_str(),
                field(bounds, "two_qubit_min_ns").c_str());
  }

  const json warnings = manifest.value("warnings", json::array());
  if (!warnings.empty()) {
    std::printf("  %zu warning(s):\n", warnings.size());
    for (const json& warning : warnings)
      std::printf("    %s\n", render_value(warning).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spinmet: minimal-evolution-time toolkit for a driven spin-qubit chain"};
  app.require_subcommand(1);

  std::string config_path;
  std::string report_dir;
  CLI::App* run = app.add_subcommand(
      "run", "execute a task configuration and write its artifacts");
  run->add_option("config", config_path, "JSON run configuration")->required();
  CLI::App* validate = app.add_subcommand(
      "validate",
      "check a configuration and every file it references without running");
  validate->add_option("config", config_path, "JSON run configuration")
      ->required();
  CLI::App* report =
      app.add_subcommand("report", "summarize a completed run directory");
  report->add_option("dir", report_dir, "output directory of a previous run")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // command-line misuse is a configuration error
  }

  try {
    if (run->parsed()) return run_command(config_path);
    if (validate->parsed()) return validate_command(config_path);
    return report_command(report_dir);
  } catch (const spinmet::SchemaError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const spinmet::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
