// Serialization layer: round-trip-exact double formatting, CSV quoting, the
// FNV-1a content hash against published reference digests, run-config parsing
// with positional diagnostics, and the per-task CSV/JSON writers on hand-built
// results (frozen expected bodies).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinmet/errors.hpp"
#include "spinmet/haar.hpp"
#include "spinmet/output.hpp"

using namespace spinmet;

namespace {

// Minimal valid config text per task, used as the base for error mutations.
std::string bounds_config() {
  return R"({"task":"bounds","seed":1,"output_dir":"out"})";
}

CdfEstimate tiny_estimate() {
  CdfEstimate estimate;
  estimate.n_qubits = 1;
  estimate.threshold = 1e-7;
  estimate.t_grid = {10.0, 20.0};
  estimate.cdf = {0.5, 1.0};
  estimate.pairs.resize(3);
  estimate.pairs[0].infidelity = {1e-9, 1e-10};
  estimate.pairs[0].feasible = {1, 1};
  estimate.pairs[0].passes = {1, 1};
  estimate.pairs[0].met_above = 10.0;
  estimate.pairs[0].met_below = 0.0;
  estimate.pairs[1].infidelity = {0.25, 1e-8};
  estimate.pairs[1].feasible = {0, 1};
  estimate.pairs[1].passes = {0, 1};
  estimate.pairs[1].met_above = 20.0;
  estimate.pairs[1].met_below = 10.0;
  estimate.pairs[2].excluded = true;
  estimate.pairs[2].notice = "optimizer exception: bad, thing";
  return estimate;
}

}  // namespace

TEST_CASE("format_real is shortest and round-trips") {
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(200.5) == "200.5");
  CHECK(format_real(-3.0) == "-3");
  const std::vector<Real> tricky = {0.1 + 0.2, 1.0 / 3.0, 3.14159265358979,
                                    1e-300,    1e300,     6.02214076e23,
                                    -0.0,      5e-324};
  for (Real value : tricky) {
    const std::string text = format_real(value);
    CHECK(std::strtod(text.c_str(), nullptr) == value);
  }
}

TEST_CASE("csv quoting") {
  CHECK(csv_line({"a", "b", "c"}) == "a,b,c\n");
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("with,comma") == "\"with,comma\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_line({"x,y", "1"}) == "\"x,y\",1\n");
}

TEST_CASE("fnv1a64 matches the reference digests") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
  CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("text file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "spinmet_out_test";
  const std::string path = (dir / "nested" / "file.txt").string();
  write_text_file(path, "alpha\nbeta\n");
  CHECK(read_text_file(path) == "alpha\nbeta\n");
  CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()),
                  SchemaError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run config: bounds task and defaults") {
  const RunConfig config = parse_run_config(bounds_config());
  CHECK(config.task == TaskKind::Bounds);
  CHECK(task_name(config.task) == "bounds");
  CHECK(config.seed == 1);
  CHECK(config.output_dir == "out");
  CHECK(config.parallelism == 0);
  CHECK(config.pi_gate_time == 200.0);
  CHECK(config.swap_time == 0.5);

  const RunConfig tuned = parse_run_config(
      R"({"task":"bounds","seed":9,"output_dir":"o",
          "budget":{"pi_gate_time_ns":50,"swap_alpha_max_time_ns":0.25}})");
  CHECK(tuned.pi_gate_time == 50.0);
  CHECK(tuned.swap_time == 0.25);
}

TEST_CASE("run config: met-scan block parsing and path resolution") {
  const std::string text = R"({
    "task": "met-scan",
    "seed": 77,
    "output_dir": "artifacts",
    "parallelism": 2,
    "device": "devices/one_qubit.json",
    "target": {"kind": "basis", "bits": "1"},
    "initial": {"kind": "basis", "bits": "0"},
    "scan": {
      "t_grid_ns": [240, 120, 60],
      "threshold": 1e-6,
      "n_segments": 8,
      "refine_resolution_ns": 2.0,
      "seed_starts": 4,
      "warm_starts": 1
    },
    "optimizer": {
      "max_iterations": 300,
      "freeze_carriers": true,
      "propagation": {"phase_budget_rad": 0.01}
    }
  })";
  const RunConfig config = parse_run_config(text, "cfg", "/base/dir");
  CHECK(config.task == TaskKind::MetScan);
  CHECK(config.device_path == "/base/dir/devices/one_qubit.json");
  CHECK(config.target.kind == TargetSpec::Kind::Basis);
  CHECK(config.target.bits == "1");
  CHECK(config.initial.kind == TargetSpec::Kind::Basis);
  // grid arrives descending, is normalized ascending; the scan direction
  // field controls traversal, not storage
  CHECK(config.scan.t_grid == std::vector<Real>{60.0, 120.0, 240.0});
  CHECK(config.scan.scan_direction == ScanDirection::Descending);
  CHECK(config.scan.threshold == 1e-6);
  CHECK(config.scan.n_segments == 8);
  CHECK(config.scan.refine_resolution.has_value());
  CHECK(*config.scan.refine_resolution == 2.0);
  CHECK(config.scan.seed_starts == 4);
  CHECK(config.scan.warm_starts == 1);
  CHECK(config.scan.seed == 77);
  CHECK(config.optimizer.max_iterations == 300);
  CHECK(config.optimizer.freeze_carriers);
  CHECK(config.optimizer.propagation.phase_budget_rad == 0.01);
  CHECK(config.parallelism == 2);

  // pauli-ground target resolves its Hamiltonian path
  const RunConfig ground = parse_run_config(R"({
    "task": "met-scan", "seed": 1, "output_dir": "o",
    "device": "d.json",
    "target": {"kind": "pauli-ground", "hamiltonian": "h2.json"},
    "scan": {"t_grid_ns": [10]}
  })",
                                            "", "base");
  CHECK(ground.target.kind == TargetSpec::Kind::PauliGround);
  CHECK(ground.target.hamiltonian_path == "base/h2.json");
}

TEST_CASE("run config: campaign, fit, sweep blocks") {
  const RunConfig haar = parse_run_config(R"({
    "task": "haar-campaign", "seed": 5, "output_dir": "o",
    "device": "d.json",
    "campaign": {"n_pairs": 8, "t_grid_ns": [280, 240, 200], "n_segments": 40},
    "bootstrap": {"n_resamples": 5000, "confidence": 0.99}
  })");
  CHECK(haar.campaign_n_pairs == 8);
  CHECK(haar.campaign_t_grid == std::vector<Real>{280.0, 240.0, 200.0});
  CHECK(haar.campaign_n_segments == 40);
  CHECK(haar.campaign_threshold == 1e-7);
  CHECK(haar.bootstrap_resamples == 5000);
  CHECK(haar.bootstrap_confidence == 0.99);

  const RunConfig defaults = parse_run_config(R"({
    "task": "haar-campaign", "seed": 5, "output_dir": "o",
    "device": "d.json",
    "campaign": {"n_pairs": 2, "t_grid_ns": [50, 25]}
  })");
  CHECK(defaults.bootstrap_resamples == kDefaultBootstrapResamples);
  CHECK(defaults.bootstrap_confidence == kDefaultBootstrapConfidence);

  const RunConfig fit = parse_run_config(R"({
    "task": "fit", "seed": 3, "output_dir": "o",
    "estimate_csv": "cdf.csv", "d": 4, "max_terms": 9
  })",
                                         "", "root");
  CHECK(fit.estimate_csv == "root/cdf.csv");
  CHECK(fit.fit_d == 4);
  CHECK(fit.fit_max_terms == 9);

  const RunConfig sweep = parse_run_config(R"({
    "task": "param-sweep", "seed": 3, "output_dir": "o",
    "device": "d.json",
    "target": {"kind": "basis", "bits": "1"},
    "scan": {"t_grid_ns": [100, 50]},
    "axis": "iq_max", "factors": [1, 2]
  })");
  CHECK(sweep.axis == SweepAxis::IqMax);
  CHECK(sweep.factors == std::vector<Real>{1.0, 2.0});

  const RunConfig bond = parse_run_config(R"({
    "task": "bond-sweep", "seed": 3, "output_dir": "o",
    "device": "d.json",
    "hamiltonians": ["a.json", "b.json"],
    "scan": {"t_grid_ns": [100, 50]}
  })",
                                          "", "base");
  CHECK(bond.hamiltonian_paths ==
        std::vector<std::string>{"base/a.json", "base/b.json"});
}

TEST_CASE("run config: structural errors carry positions") {
  CHECK_THROWS_AS(parse_run_config("{nope"), SchemaError);
  CHECK_THROWS_AS(parse_run_config("[]"), SchemaError);
  CHECK_THROWS_AS(parse_run_config(R"({"seed":1,"output_dir":"o"})"),
                  SchemaError);  // missing task
  CHECK_THROWS_AS(
      parse_run_config(R"({"task":"explode","seed":1,"output_dir":"o"})"),
      SchemaError);  // unknown task
  CHECK_THROWS_AS(parse_run_config(R"({"task":"bounds","output_dir":"o"})"),
                  SchemaError);  // seed mandatory
  CHECK_THROWS_AS(
      parse_run_config(R"({"task":"bounds","seed":-4,"output_dir":"o"})"),
      SchemaError);  // negative seed
  CHECK_THROWS_AS(parse_run_config(R"({"task":"bounds","seed":1})"),
                  SchemaError);  // missing output_dir
  CHECK_THROWS_AS(
      parse_run_config(
          R"({"task":"bounds","seed":1,"output_dir":"o","typo":1})"),
      SchemaError);  // unknown key

  // positional diagnostics name the offending element
  try {
    parse_run_config(R"({
      "task":"met-scan","seed":1,"output_dir":"o","device":"d.json",
      "target":{"kind":"basis","bits":"1"},
      "scan":{"t_grid_ns":[10,"x"]}
    })");
    CHECK(false);
  } catch (const SchemaError& error) {
    CHECK(std::string(error.what()).find("t_grid_ns[1]") !=
          std::string::npos);
  }
}

TEST_CASE("run config: semantic errors") {
  const std::string scan_head = R"({
    "task":"met-scan","seed":1,"output_dir":"o","device":"d.json",
    "target":{"kind":"basis","bits":"1"},)";
  CHECK_THROWS_AS(
      parse_run_config(scan_head + R"("scan":{"t_grid_ns":[10,30,20]}})"),
      ValidationError);  // non-monotone grid
  CHECK_THROWS_AS(
      parse_run_config(scan_head + R"("scan":{"t_grid_ns":[0,10]}})"),
      ValidationError);  // nonpositive duration
  CHECK_THROWS_AS(
      parse_run_config(scan_head +
                       R"("scan":{"t_grid_ns":[10],"threshold":-1}})"),
      ValidationError);
  CHECK_THROWS_AS(
      parse_run_config(scan_head +
                       R"("scan":{"t_grid_ns":[10],"n_segments":0}})"),
      ValidationError);
  CHECK_THROWS_AS(parse_run_config(R"({
    "task":"met-scan","seed":1,"output_dir":"o","device":"d.json",
    "target":{"kind":"basis","bits":"10x"},
    "scan":{"t_grid_ns":[10]}})"),
                  ValidationError);  // non-binary bits
  CHECK_THROWS_AS(parse_run_config(R"({
    "task":"haar-campaign","seed":1,"output_dir":"o","device":"d.json",
    "campaign":{"n_pairs":4,"t_grid_ns":[10,20]}})"),
                  ValidationError);  // campaign grid must descend
  CHECK_THROWS_AS(parse_run_config(R"({
    "task":"fit","seed":1,"output_dir":"o","estimate_csv":"e.csv","d":1})"),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_run_config(
          R"({"task":"bounds","seed":1,"output_dir":"o","parallelism":-1})"),
      ValidationError);
}

TEST_CASE("met scan csv freezes points and the met row") {
  MetScanResult result;
  MetPoint a;
  a.total_time = 60.0;
  a.best_cost = 0.25;
  a.excess = 0.25;
  a.converged = true;
  a.outcome.restart_index_of_best = 2;
  MetPoint b;
  b.total_time = 120.0;
  b.best_cost = 5e-9;
  b.excess = 5e-9;
  b.converged = true;
  b.feasible = true;
  b.outcome.restart_index_of_best = 0;
  result.points = {a, b};
  result.met_estimate = 120.0;
  result.bracket_below = 60.0;
  result.bracket_above = 120.0;

  CHECK(met_scan_csv(result) ==
        "kind,t_ns,best_cost,excess,converged,feasible,refined,best_restart\n"
        "point,60,0.25,0.25,1,0,0,2\n"
        "point,120,5e-09,5e-09,1,1,0,0\n"
        "met,120,,,,,,\n");

  const nlohmann::json summary = nlohmann::json::parse(met_summary_json(result));
  CHECK(summary["met_ns"] == 120.0);
  CHECK(summary["bracket_below_ns"] == 60.0);
  CHECK(summary["n_points"] == 2);
  CHECK(summary["n_feasible"] == 1);

  MetScanResult missing;
  missing.points = {a};
  CHECK(met_scan_csv(missing).find("met,,,,,,,\n") != std::string::npos);
  CHECK(nlohmann::json::parse(met_summary_json(missing))["met_ns"].is_null());
}

TEST_CASE("sweep csv carries the factor column") {
  MetPoint point;
  point.total_time = 10.0;
  point.best_cost = 1e-8;
  point.excess = 1e-8;
  point.converged = true;
  point.feasible = true;
  SweepEntry one;
  one.factor = 1.0;
  one.result.points = {point};
  one.result.met_estimate = 10.0;
  SweepEntry two = one;
  two.factor = 2.0;
  two.result.met_estimate = 5.0;
  const std::string body = sweep_csv({one, two});
  CHECK(body.find("factor,kind,t_ns") == 0);
  CHECK(body.find("1,point,10,") != std::string::npos);
  CHECK(body.find("1,met,10,") != std::string::npos);
  CHECK(body.find("2,met,5,") != std::string::npos);

  const nlohmann::json summary =
      nlohmann::json::parse(sweep_summary_json(SweepAxis::JMax, {one, two}));
  CHECK(summary["axis"] == "j_max");
  CHECK(summary["entries"][1]["met_ns"] == 5.0);
}

TEST_CASE("campaign csv bodies on a hand-built estimate") {
  const CdfEstimate estimate = tiny_estimate();
  CHECK(campaign_pairs_csv(estimate) ==
        "pair,t_ns,infidelity,feasible,passes\n"
        "0,10,1e-09,1,1\n"
        "0,20,1e-10,1,1\n"
        "1,10,0.25,0,0\n"
        "1,20,1e-08,1,1\n");
  CHECK(campaign_mets_csv(estimate) ==
        "pair,met_below_ns,met_above_ns,excluded,notice\n"
        "0,0,10,0,\n"
        "1,10,20,0,\n"
        "2,,,1,\"optimizer exception: bad, thing\"\n");
  // without bootstrap bands the CI cells stay empty
  CHECK(campaign_cdf_csv(estimate) ==
        "t_ns,cdf,variance,ci_low,ci_high\n"
        "10,0.5,,,\n"
        "20,1,,,\n");

  CdfEstimate banded = estimate;
  banded.variance = {0.001, 0.0005};
  banded.ci_low = {0.25, 0.9};
  banded.ci_high = {0.75, 1.0};
  banded.n_resamples = 1000;
  banded.confidence = 0.99;
  CHECK(campaign_cdf_csv(banded) ==
        "t_ns,cdf,variance,ci_low,ci_high\n"
        "10,0.5,0.001,0.25,0.75\n"
        "20,1,5e-04,0.9,1\n");

  const nlohmann::json summary =
      nlohmann::json::parse(campaign_summary_json(banded));
  CHECK(summary["n_pairs"] == 3);
  CHECK(summary["n_included"] == 2);
  CHECK(summary["max_met_above_ns"] == 20.0);
  CHECK(summary["n_pairs_without_met"] == 0);
  CHECK(summary["n_resamples"] == 1000);
}

TEST_CASE("estimate csv parses back what the cdf writer emits") {
  CdfEstimate banded = tiny_estimate();
  banded.variance = {0.001, 0.0005};
  banded.ci_low = {0.25, 0.9};
  banded.ci_high = {0.75, 1.0};
  const EstimateTable table = parse_estimate_csv(campaign_cdf_csv(banded));
  CHECK(table.t == std::vector<Real>{10.0, 20.0});
  CHECK(table.cdf == std::vector<Real>{0.5, 1.0});
  CHECK(table.variance == std::vector<Real>{0.001, 0.0005});

  // column lookup is by name, so extra columns and reordering are fine
  const EstimateTable shuffled = parse_estimate_csv(
      "cdf,junk,t_ns,variance\n0.5,x,10,0.001\n1,y,20,0.0005\n");
  CHECK(shuffled.t == std::vector<Real>{10.0, 20.0});
  CHECK(shuffled.cdf == std::vector<Real>{0.5, 1.0});

  CHECK_THROWS_AS(parse_estimate_csv("t_ns,cdf\n1,2\n"), SchemaError);
  CHECK_THROWS_AS(parse_estimate_csv("t_ns,cdf,variance\n"), SchemaError);
  CHECK_THROWS_AS(
      parse_estimate_csv("t_ns,cdf,variance\n1,abc,0.1\n"), SchemaError);
}

TEST_CASE("fit serializers expose the trail and the winner") {
  // noiseless constant-speed data; both fits and the selection are real
  CdfEstimate estimate;
  estimate.n_qubits = 2;
  const Real v = 0.2;
  const int n_points = 24;
  for (int i = 1; i <= n_points; ++i) {
    const Real t = i * (pi / v) / n_points;
    estimate.t_grid.push_back(t);
    estimate.cdf.push_back(hi_cdf(t, v, 4));
    estimate.variance.push_back(1e-6);
    estimate.ci_low.push_back(0.0);
    estimate.ci_high.push_back(1.0);
  }
  const CdfFit hi = fit_hi(estimate, 4);
  const ExpansionSelection selection = select_expansion(estimate, 4, 6);

  const std::string trail = selection_trail_csv(selection);
  CHECK(trail.find("n_terms,n_parameters,edge_speed,chi2,n_dof,"
                   "chi2_per_dof,selected") == 0);
  CHECK(trail.find(",1\n") != std::string::npos);  // some row is selected

  const nlohmann::json report =
      nlohmann::json::parse(fit_report_json(hi, selection));
  CHECK(report["constant_speed"]["model"] == "constant-speed");
  CHECK(report["constant_speed"]["d"] == 4);
  CHECK(report["constant_speed"]["edge_speed"].get<Real>() ==
        doctest::Approx(v).epsilon(1e-6));
  CHECK(report["constant_speed"]["edge_speed_se"].is_number());
  CHECK(report["selected"]["n_terms"].get<int>() >= 1);
  CHECK(report["trail"].is_array());
  CHECK(report["trail"].size() == selection.trail.size());

  const std::string curves = fit_curves_csv(estimate, hi, selection.best);
  CHECK(curves.find("t_ns,cdf,variance,hi_fit,best_fit") == 0);
  // one header plus one row per grid point
  CHECK(std::count(curves.begin(), curves.end(), '\n') == n_points + 1);
}

TEST_CASE("bounds serializers print the reference constants") {
  const GateTimeBudget budget = reference_bounds();
  CHECK(bounds_json(budget) ==
        "{\n"
        "  \"pi_gate_time_ns\": 200.0,\n"
        "  \"swap_alpha_max_time_ns\": 0.5,\n"
        "  \"one_qubit_max_ns\": 500.0,\n"
        "  \"two_qubit_max_ns\": 1000.5,\n"
        "  \"two_qubit_from_01_max_ns\": 500.5,\n"
        "  \"two_qubit_min_ns\": 200.5\n"
        "}\n");
  const std::string text = bounds_text(budget);
  CHECK(text.find("500\n") != std::string::npos);
  CHECK(text.find("1000.5\n") != std::string::npos);
  CHECK(text.find("500.5\n") != std::string::npos);
  CHECK(text.find("200.5\n") != std::string::npos);
}

TEST_CASE("manifest carries hash, seed, artifacts, warnings") {
  const RunConfig config = parse_run_config(bounds_config());
  const std::uint64_t hash = fnv1a64(config.raw_text);
  const std::string body =
      manifest_json(config, hash, 1.5, {"bounds.json"}, {"heads up"});
  const nlohmann::json doc = nlohmann::json::parse(body);
  CHECK(doc["tool"] == "spinmet");
  CHECK(doc["task"] == "bounds");
  CHECK(doc["config_hash_fnv1a64"].get<std::string>().size() == 16);
  CHECK(doc["config_hash_fnv1a64"] == hex64(hash));
  CHECK(doc["seed"] == 1);
  CHECK(doc["wall_time_seconds"] == 1.5);
  CHECK(doc["artifacts"][0] == "bounds.json");
  CHECK(doc["warnings"][0] == "heads up");
}
