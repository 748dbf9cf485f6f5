// Acceptance suite: fourteen end-to-end checks covering the propagator, its
// closed-form exchange oracle, gradient exactness, single-qubit and scaled
// MET scans, Haar-pair statistics, the geodesic CDF model and its fits,
// bootstrap bands, gate-time bounds, shot allocation, a desk-scale campaign
// through the command-line binary, and rerun determinism. Prints one
// PASS/FAIL line per criterion and exits nonzero if any fail.
// argv[1] = spinmet binary, argv[2] = repository root.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinmet/bounds.hpp"
#include "spinmet/cost.hpp"
#include "spinmet/device.hpp"
#include "spinmet/grape.hpp"
#include "spinmet/haar.hpp"
#include "spinmet/metscan.hpp"
#include "spinmet/output.hpp"
#include "spinmet/pauli.hpp"
#include "spinmet/propagation.hpp"
#include "spinmet/rng.hpp"
#include "spinmet/types.hpp"

namespace {

using namespace spinmet;
using nlohmann::json;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

std::string fmt(Real value) { return format_real(value); }

// --- harness state -----------------------------------------------------------

struct Context {
  std::string binary;
  std::string root;
  std::filesystem::path work;
  // run artifacts reused by the determinism criterion
  std::filesystem::path c4_config, c4_dir;
  std::filesystem::path c9_config, c9_dir;
  std::filesystem::path c13_config, c13_dir;
} g;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << body;
  require(out.good(), "cannot write " + path.string());
}

int run_cli(const std::string& args) {
  static int counter = 0;
  const std::filesystem::path capture =
      g.work / ("cli_" + std::to_string(counter++) + ".log");
  const std::string command =
      "\"" + g.binary + "\" " + args + " > \"" + capture.string() + "\" 2>&1";
  const int status = std::system(command.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::fprintf(stderr, "--- command failed: %s\n%s---\n", command.c_str(),
                 read_file(capture).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  return 0;
}

json read_json(const std::filesystem::path& path) {
  return json::parse(read_file(path));
}

std::string data_file(const std::string& name) {
  return (std::filesystem::path(g.root) / "data" / name).string();
}

StateVector random_state(int n_qubits, std::uint64_t& state) {
  StateVector psi(Eigen::Index{1} << n_qubits);
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    psi(i) = Complex(standard_normal(state), standard_normal(state));
  psi.normalize();
  return psi;
}

// --- criterion 1: propagator unitarity and substep convergence ---------------

std::string c01_propagator() {
  std::uint64_t state = 0xAC01;
  Real worst_unitarity = 0.0;
  Real worst_drift = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + rep % 4;
    const DeviceParams params = DeviceParams::bench_defaults(n);
    const Real total_time = uniform(state, 4.0, 16.0);
    const int n_segments = 3 + static_cast<int>(uniform_index(state, 3));
    const ControlSchedule sched =
        random_schedule(params, total_time, n_segments, splitmix64(state));
    require(validate(params, sched).ok(), "random schedule out of bounds");
    const StateVector psi0 = random_state(n, state);

    PropagationOptions opts;
    opts.keep_segment_propagators = true;
    const PropagationResult result = propagate(params, sched, psi0, opts);
    const MatrixXcd eye = MatrixXcd::Identity(params.dim(), params.dim());
    for (const MatrixXcd& u : result.segment_propagators) {
      worst_unitarity = std::max(
          worst_unitarity, (u.adjoint() * u - eye).cwiseAbs().maxCoeff());
    }

    PropagationOptions doubled;
    doubled.substep_multiplier = 2;
    const PropagationResult refined = propagate(params, sched, psi0, doubled);
    worst_drift = std::max(
        worst_drift,
        (refined.final_state - result.final_state).cwiseAbs().maxCoeff());
  }
  require(worst_unitarity < 1e-12,
          "segment propagator unitarity defect " + fmt(worst_unitarity));
  require(worst_drift < 1e-9, "substep-doubling drift " + fmt(worst_drift));
  return "max unitarity defect " + fmt(worst_unitarity) + ", substep drift " +
         fmt(worst_drift);
}

// --- criterion 2: constant-exchange closed form -------------------------------

std::string c02_exchange_oracle() {
  std::uint64_t state = 0xAC02;
  Real worst_exact = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Real j = uniform(state, 0.0, 1.0);  // up to the 1 GHz ceiling
    const Real db = uniform(state, -0.08, 0.08);
    const Real t0 = uniform(state, 0.0, 40.0);
    const Real dt = uniform(state, 0.05, 8.0);

    DeviceParams params = DeviceParams::bench_defaults(2, 1);
    params.zeeman_offsets(0) = -db / 2.0;
    params.zeeman_offsets(1) = db / 2.0;

    ControlSchedule sched = ControlSchedule::zeros(params, dt, 1);
    sched.j_amps.setConstant(j);
    PropagationOptions opts;
    opts.start_time = t0;
    opts.keep_segment_propagators = true;
    std::uint64_t psi_seed = splitmix64(state);
    const StateVector psi0 = random_state(2, psi_seed);
    const PropagationResult result = propagate(params, sched, psi0, opts);
    require(result.segment_propagators.size() == 1, "expected one segment");

    const MatrixXcd oracle = exchange_unitary_exact(j, db, t0, dt);
    worst_exact = std::max(
        worst_exact,
        (result.segment_propagators[0] - oracle).cwiseAbs().maxCoeff());
  }
  require(worst_exact < 1e-9,
          "numeric vs closed-form deviation " + fmt(worst_exact));

  // power-of-SWAP limit in the small db*dt regime
  Real worst_limit = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Real j = uniform(state, 0.2, 1.0);
    const Real dt = uniform(state, 0.1, 1.0);
    const Real db = uniform(state, 0.0, 1e-4 / dt);  // db*dt < 1e-4
    const Real t0 = uniform(state, 0.0, 10.0);
    const MatrixXcd exact = exchange_unitary_exact(j, db, t0, dt);
    const MatrixXcd limit = exchange_unitary_limit(j, db, t0, dt);
    worst_limit =
        std::max(worst_limit, (exact - limit).cwiseAbs().maxCoeff());
  }
  require(worst_limit < 1e-3, "SWAP-power limit deviation " + fmt(worst_limit));
  return "closed form to " + fmt(worst_exact) + ", SWAP-power limit to " +
         fmt(worst_limit);
}

// --- criterion 3: gradient vs finite differences ------------------------------

// Fourth-order central difference of the cost along one flattened coordinate.
Real finite_difference(const DeviceParams& params, ControlSchedule sched,
                       const CostFunction& cost, const StateVector& psi0,
                       const PropagationOptions& opts, Eigen::Index index,
                       Real h) {
  VectorXd x = flatten_schedule(sched);
  const auto eval = [&](Real delta) {
    VectorXd probe = x;
    probe(index) += delta;
    unflatten_schedule(probe, sched);
    return schedule_cost(params, sched, cost, psi0, opts);
  };
  return (8.0 * (eval(h) - eval(-h)) - (eval(2.0 * h) - eval(-2.0 * h))) /
         (12.0 * h);
}

std::string c03_gradient() {
  std::uint64_t state = 0xAC03;
  const PauliSum dimer = load_pauli_sum(data_file("dimer_b0p8.json"));
  Real worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const DeviceParams params = DeviceParams::bench_defaults(2);
    const Real total_time = uniform(state, 3.0, 6.0);
    const int n_segments = 3 + static_cast<int>(uniform_index(state, 2));
    ControlSchedule sched =
        random_schedule(params, total_time, n_segments, splitmix64(state));
    for (int tone = 0; tone < params.n_signals; ++tone)
      sched.carriers(tone) =
          uniform(state, params.omega_low + 0.9, params.omega_high - 0.9);
    const StateVector psi0 = random_state(2, state);
    const CostFunction cost =
        (rep % 2 == 0) ? CostFunction::infidelity_to(random_state(2, state))
                       : CostFunction::expectation_of(dimer);

    PropagationOptions opts;
    opts.substeps_override = 8;  // pin the discretization the gradient targets
    const CostValueAndGradient cg =
        cost_and_gradient(params, sched, cost, psi0, opts);
    const VectorXd analytic = flatten_gradient(cg.grad);

    // flattened layout: I, Q (S x M each), J ((n-1) x M), carriers (S)
    const Eigen::Index m = n_segments;
    const Eigen::Index s = params.n_signals;
    const struct {
      Eigen::Index begin, end;
      Real step;
    } classes[] = {
        {0, s * m, 1e-5 * params.iq_max},              // I
        {s * m, 2 * s * m, 1e-5 * params.iq_max},      // Q
        {2 * s * m, 2 * s * m + m, 1e-5 * params.j_max},  // J (one bond)
        {2 * s * m + m, 2 * s * m + m + s, 1e-5},      // carriers (GHz)
    };
    for (const auto& cls : classes) {
      Real sup_analytic = 0.0;
      Real sup_err = 0.0;
      for (Eigen::Index i = cls.begin; i < cls.end; ++i) {
        const Real fd =
            finite_difference(params, sched, cost, psi0, opts, i, cls.step);
        sup_analytic = std::max(sup_analytic, std::abs(analytic(i)));
        sup_err = std::max(sup_err, std::abs(fd - analytic(i)));
      }
      worst = std::max(worst, sup_err / std::max(sup_analytic, Real(1e-10)));
    }
  }
  require(worst < 1e-6, "worst per-class relative error " + fmt(worst));
  return "worst per-class relative error " + fmt(worst);
}

// --- criterion 4: single-qubit MET through the CLI -----------------------------

std::string c04_single_qubit_met() {
  const std::filesystem::path dir = g.work / "c04";
  g.c4_config = dir / "config.json";
  g.c4_dir = dir / "out";
  write_file(g.c4_config, R"({
  "task": "met-scan",
  "seed": 11,
  "output_dir": ")" + g.c4_dir.string() + R"(",
  "device": ")" + data_file("device_1q_singletone.json") + R"(",
  "target": {"kind": "basis", "bits": "1"},
  "scan": {
    "t_grid_ns": [240.0, 215.0, 205.0, 195.0, 185.0, 160.0],
    "threshold": 1e-7,
    "n_segments": 8,
    "refine_resolution_ns": 1.0
  },
  "optimizer": {"max_iterations": 500, "n_random_restarts": 2}
})");
  require(run_cli("run \"" + g.c4_config.string() + "\"") == 0,
          "met-scan run failed");
  const json summary = read_json(g.c4_dir / "summary.json");
  require(summary.at("met_ns").is_number(), "MET not bracketed by the grid");
  const Real met = summary["met_ns"].get<Real>();

  // one bounded tone: max two-quadrature amplitude sqrt(2)*iq_max, so the
  // resonant pi time is 2 / (sqrt(2) * iq_max) = 200 ns at the 20 MHz bound
  const DeviceParams device =
      load_device_params(data_file("device_1q_singletone.json"));
  const Real analytic = 2.0 / (std::sqrt(2.0) * device.iq_max);
  require(std::abs(met - analytic) <= 0.02 * analytic,
          "MET " + fmt(met) + " ns vs analytic " + fmt(analytic) + " ns");
  require(met <= 1.25 * 200.0 && met >= 200.0 / 1.25,
          "MET " + fmt(met) + " ns outside factor 1.25 of the 200 ns clock");
  return "MET " + fmt(met) + " ns, analytic " + fmt(analytic) + " ns";
}

// --- criteria 5 and 6: amplitude and exchange scaling laws ---------------------

MetScanConfig scaling_scan(std::vector<Real> grid_ascending, Real resolution) {
  MetScanConfig scan;
  scan.t_grid = std::move(grid_ascending);
  scan.threshold = 1e-7;
  scan.n_segments = 8;
  scan.refine_resolution = resolution;
  scan.seed = 17;
  return scan;
}

std::string c05_amplitude_scaling() {
  const DeviceParams device =
      load_device_params(data_file("device_1q_singletone.json"));
  MetScanTask task;
  task.cost = CostFunction::infidelity_to(basis_state(1, 1));
  task.initial_state = basis_state(1, 0);
  task.scan = scaling_scan({60, 90, 120, 150, 180, 210, 240}, 0.5);
  task.optimizer.max_iterations = 400;
  task.optimizer.n_random_restarts = 1;

  const std::vector<SweepEntry> entries =
      parameter_sweep(device, SweepAxis::IqMax, {1.0, 2.0}, task);
  require(entries[0].result.met_estimate && entries[1].result.met_estimate,
          "sweep entry without a MET");
  const Real met_base = *entries[0].result.met_estimate;
  const Real met_double = *entries[1].result.met_estimate;
  const Real ratio = met_double / met_base;
  require(std::abs(ratio - 0.5) <= 0.02 * 0.5,
          "doubling iq_max gave ratio " + fmt(ratio));
  return "MET " + fmt(met_base) + " -> " + fmt(met_double) +
         " ns, ratio " + fmt(ratio);
}

std::string c06_exchange_scaling() {
  const DeviceParams device =
      load_device_params(data_file("device_2q_exchange.json"));
  MetScanTask task;
  task.cost = CostFunction::infidelity_to(basis_state(2, 2));  // |10>
  task.initial_state = basis_state(2, 1);                      // |01>
  task.scan = scaling_scan({15, 35, 55, 75, 95, 115}, 0.25);
  task.scan.n_segments = 4;
  task.optimizer.max_iterations = 300;
  task.optimizer.n_random_restarts = 1;

  const std::vector<SweepEntry> entries =
      parameter_sweep(device, SweepAxis::JMax, {1.0, 0.5}, task);
  require(entries[0].result.met_estimate && entries[1].result.met_estimate,
          "sweep entry without a MET");
  const Real met_base = *entries[0].result.met_estimate;
  const Real met_half = *entries[1].result.met_estimate;
  const Real ratio = met_half / met_base;
  require(std::abs(ratio - 2.0) <= 0.05 * 2.0,
          "halving j_max gave ratio " + fmt(ratio));
  return "MET " + fmt(met_base) + " -> " + fmt(met_half) + " ns, ratio " +
         fmt(ratio);
}

// --- criterion 7: Haar squared-overlap law -------------------------------------

std::string c07_haar_overlap() {
  // d = 2: the squared overlap of a Haar pair is uniform on [0, 1]
  const StatePairSample two = sample_pairs(1, 1024, 0xAC07);
  std::vector<Real> overlaps;
  overlaps.reserve(two.pairs.size());
  for (const auto& [a, b] : two.pairs)
    overlaps.push_back(std::norm(a.dot(b)));
  const Real ks = ks_statistic(
      overlaps, [](Real x) { return std::clamp(x, Real(0), Real(1)); });
  const Real critical = ks_critical(1024, 0.01);
  require(ks < critical,
          "KS statistic " + fmt(ks) + " >= critical " + fmt(critical));

  // d = 4: mean squared overlap 1/d within three standard errors
  const StatePairSample four = sample_pairs(2, 1024, 0xAC08);
  Real mean = 0.0, sq = 0.0;
  for (const auto& [a, b] : four.pairs) {
    const Real f = std::norm(a.dot(b));
    mean += f;
    sq += f * f;
  }
  const Real n = static_cast<Real>(four.pairs.size());
  mean /= n;
  const Real se = std::sqrt((sq / n - mean * mean) / n);
  require(std::abs(mean - 0.25) <= 3.0 * se,
          "d=4 mean overlap " + fmt(mean) + " +/- " + fmt(se));
  return "KS " + fmt(ks) + " < " + fmt(critical) + "; d=4 mean " + fmt(mean) +
         " (se " + fmt(se) + ")";
}

// --- criterion 8: geodesic CDF closed form vs quadrature -----------------------

Real adaptive_simpson(const std::function<Real(Real)>& f, Real a, Real b,
                      Real fa, Real fm, Real fb, Real whole, Real tol,
                      int depth) {
  const Real m = 0.5 * (a + b);
  const Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Real flm = f(lm), frm = f(rm);
  const Real left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Real right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

Real integrate(const std::function<Real(Real)>& f, Real a, Real b, Real tol) {
  const Real fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const Real whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

std::string c08_cdf_quadrature() {
  const Real v = 0.025;
  Real worst = 0.0;
  for (const int d : {2, 4, 8, 16}) {
    const auto integrand = [d](Real u) {
      return std::pow(std::sin(u), 2 * d - 3);
    };
    const Real norm = integrate(integrand, 0.0, pi / 2.0, 1e-14);
    const Real t_star = pi / v;
    for (int k = 0; k < 250; ++k) {
      const Real T = (k / 249.0) * 1.05 * t_star;
      const Real u = std::clamp(v * T / 2.0, Real(0), pi / 2.0);
      const Real reference = integrate(integrand, 0.0, u, 1e-14) / norm;
      worst = std::max(worst, std::abs(hi_cdf(T, v, d) - reference));
    }
  }
  require(worst < 1e-10, "quadrature deviation " + fmt(worst));

  Real worst2 = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const Real T = (k / 200.0) * (pi / v);
    worst2 = std::max(
        worst2, std::abs(hi_cdf(T, v, 2) - (1.0 - std::cos(v * T / 2.0))));
  }
  require(worst2 < 1e-14, "d=2 closed form deviation " + fmt(worst2));
  return "quadrature agreement " + fmt(worst) + ", d=2 exact to " +
         fmt(worst2);
}

// --- criterion 9: fit recovery through the CLI ---------------------------------

std::string synthetic_estimate_csv(const std::function<Real(Real)>& cdf,
                                   Real t_max, int n_points, long long n_pairs,
                                   std::uint64_t seed) {
  std::uint64_t state = seed;
  std::string out = "t_ns,cdf,variance\n";
  for (int k = 0; k < n_points; ++k) {
    const Real T = (k + 1) * t_max / n_points;
    const Real f = std::clamp(cdf(T), Real(0), Real(1));
    const long long hits = binomial(state, n_pairs, f);
    const Real f_hat = static_cast<Real>(hits) / n_pairs;
    const Real floor = 1.0 / (static_cast<Real>(n_pairs) * n_pairs);
    const Real variance = std::max(f_hat * (1.0 - f_hat) / n_pairs, floor);
    out += csv_line({fmt(T), fmt(f_hat), fmt(variance)});
  }
  return out;
}

std::string c09_fit_recovery() {
  const std::filesystem::path dir = g.work / "c09";
  const Real v_true = 0.02;

  // single-speed data: the constant-speed fit must recover v within 2%
  write_file(dir / "single.csv",
             synthetic_estimate_csv(
                 [&](Real T) { return hi_cdf(T, v_true, 4); }, 160.0, 24,
                 1024, 0xAC09));
  g.c9_config = dir / "fit_single.json";
  g.c9_dir = dir / "out_single";
  write_file(g.c9_config, R"({
  "task": "fit", "seed": 2,
  "output_dir": ")" + g.c9_dir.string() + R"(",
  "estimate_csv": "single.csv", "d": 4, "max_terms": 8
})");
  require(run_cli("run \"" + g.c9_config.string() + "\"") == 0,
          "fit run failed");
  const json single = read_json(g.c9_dir / "fit.json");
  const Real v_fit = single.at("constant_speed").at("edge_speed").get<Real>();
  require(std::abs(v_fit - v_true) <= 0.02 * v_true,
          "recovered v " + fmt(v_fit) + " vs true " + fmt(v_true));

  // two-speed mixture: the sine-power expansion must strictly improve on the
  // constant-speed model and the add-a-term selection loop must terminate
  write_file(dir / "mixture.csv",
             synthetic_estimate_csv(
                 [](Real T) {
                   return 0.5 * hi_cdf(T, 0.013, 4) + 0.5 * hi_cdf(T, 0.03, 4);
                 },
                 250.0, 30, 1024, 0xAC0A));
  write_file(dir / "fit_mixture.json", R"({
  "task": "fit", "seed": 2,
  "output_dir": ")" + (dir / "out_mixture").string() + R"(",
  "estimate_csv": "mixture.csv", "d": 4, "max_terms": 10
})");
  require(run_cli("run \"" + (dir / "fit_mixture.json").string() + "\"") == 0,
          "mixture fit run failed");
  const json mixture = read_json(dir / "out_mixture" / "fit.json");
  const Real chi_hi = mixture.at("constant_speed").at("chi2_per_dof").get<Real>();
  const Real chi_best = mixture.at("selected").at("chi2_per_dof").get<Real>();
  const std::size_t trail = mixture.at("trail").size();
  require(chi_best < chi_hi, "expansion chi2/dof " + fmt(chi_best) +
                                 " did not improve on " + fmt(chi_hi));
  require(trail >= 1 && trail <= 10, "selection trail has " +
                                         std::to_string(trail) + " entries");
  return "v " + fmt(v_fit) + " (true " + fmt(v_true) + "); mixture chi2/dof " +
         fmt(chi_hi) + " -> " + fmt(chi_best) + " in " +
         std::to_string(trail) + " step(s)";
}

// --- criterion 10: bootstrap protocol ------------------------------------------

int binomial_quantile(int n, Real p, Real q) {
  Real cumulative = 0.0;
  for (int k = 0; k <= n; ++k) {
    const Real log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                         std::lgamma(n - k + 1.0) + k * std::log(p) +
                         (n - k) * std::log1p(-p);
    cumulative += std::exp(log_pmf);
    if (cumulative >= q) return k;
  }
  return n;
}

std::string c10_bootstrap() {
  require(kDefaultBootstrapResamples == 100000,
          "default resample count is not 1e5");
  require(kDefaultBootstrapConfidence == 0.9999,
          "default confidence is not 99.99%");

  // synthetic campaign: 1024 pairs, half passing at the first duration
  CdfEstimate estimate;
  estimate.n_qubits = 1;
  estimate.threshold = 1e-7;
  estimate.t_grid = {1.0, 2.0};
  for (int i = 0; i < 1024; ++i) {
    PairRecord record;
    const bool early = i < 512;
    record.infidelity = {early ? 0.0 : 1.0, 0.0};
    record.feasible = {static_cast<char>(early), 1};
    record.passes = {static_cast<char>(early), 1};
    record.met_above = early ? 1.0 : 2.0;
    record.met_below = early ? 0.0 : 1.0;
    estimate.pairs.push_back(record);
  }
  estimate.cdf = {0.5, 1.0};

  const CdfEstimate banded = bootstrap_cdf(estimate, 10000, 0.9999, 0xAC10);
  require(banded.variance.size() == 2, "bootstrap variance missing");
  const Real floor = 1.0 / (1024.0 * 1024.0);
  require(banded.variance[1] == floor,
          "variance floor " + fmt(banded.variance[1]) + " != " + fmt(floor));

  const Real width = banded.ci_high[0] - banded.ci_low[0];
  const Real alpha = 1.0 - 0.9999;
  const Real width_oracle =
      (binomial_quantile(1024, 0.5, 1.0 - alpha / 2) -
       binomial_quantile(1024, 0.5, alpha / 2)) /
      1024.0;
  require(std::abs(width - width_oracle) <= 0.15 * width_oracle,
          "CI width " + fmt(width) + " vs binomial oracle " +
              fmt(width_oracle));
  return "CI width " + fmt(width) + " vs oracle " + fmt(width_oracle) +
         "; floor " + fmt(banded.variance[1]);
}

// --- criterion 11: gate-time bounds --------------------------------------------

std::string c11_gate_bounds() {
  const GateTimeBudget budget = reference_bounds(200.0, 0.5);
  require(budget.one_qubit_max == 500.0 && budget.two_qubit_max == 1000.5 &&
              budget.two_qubit_from_01_max == 500.5 &&
              budget.two_qubit_min == 200.5,
          "reference budget is not (500, 1000.5, 500.5, 200.5)");

  std::uint64_t state = 0xAC11;
  Real worst = 1.0;
  for (int rep = 0; rep < 100; ++rep) {
    const StateVector psi0 = random_state(2, state);
    const StateVector target = random_state(2, state);
    const TransitionCircuit circuit = construct_transition(psi0, target);
    const Real overlap = std::abs(target.dot(circuit.apply(psi0)));
    worst = std::min(worst, overlap);
  }
  require(worst >= 1.0 - 1e-9, "worst transition overlap " + fmt(worst));
  return "budget exact; worst overlap 1 - " + fmt(1.0 - worst);
}

// --- criterion 12: shot allocation ---------------------------------------------

std::string c12_shot_allocation() {
  const PauliSum sum = load_pauli_sum(data_file("dimer_b0p8.json"));
  const ShotPlan plan = plan_shots(sum, 0.1, 0.05);

  // pre-ceiling counts proportional to |coeff|, identity terms unmeasured
  Real scale = 0.0;
  for (std::size_t i = 0; i < sum.terms.size(); ++i) {
    const bool identity =
        sum.terms[i].word.find_first_not_of('I') == std::string::npos;
    if (identity) {
      require(plan.shots[i] == 0 && plan.raw[i] == 0.0,
              "identity term got shots");
      continue;
    }
    const Real r = plan.raw[i] / std::abs(sum.terms[i].coeff);
    if (scale == 0.0) scale = r;
    require(std::abs(r - scale) <= 1e-9 * scale,
            "raw shot ratio deviates from |coeff| weighting");
  }

  const StateVector psi = ground_truth(sum).state;
  const Real exact = pauli_expectation(sum, psi);
  int covered = 0;
  for (int run = 0; run < 200; ++run) {
    const Real estimate =
        simulate_measurement_estimate(sum, psi, plan, derive_seed(0xAC12, run));
    if (std::abs(estimate - exact) <= 0.1) ++covered;
  }
  require(covered >= 190, "coverage " + std::to_string(covered) + " / 200");
  return "raw counts track |coeff|; coverage " + std::to_string(covered) +
         "/200 at (0.1, 0.05), " + std::to_string(plan.total) + " shots";
}

// --- criterion 13: desk-scale Haar campaign through the CLI --------------------

std::string c13_campaign() {
  const std::filesystem::path dir = g.work / "c13";
  g.c13_config = dir / "config.json";
  g.c13_dir = dir / "out";
  write_file(g.c13_config, R"({
  "task": "haar-campaign",
  "seed": 4242,
  "output_dir": ")" + g.c13_dir.string() + R"(",
  "parallelism": 1,
  "device": ")" + data_file("device_1q_singletone.json") + R"(",
  "campaign": {
    "n_pairs": 64,
    "t_grid_ns": [240.0, 220.0, 200.0, 180.0, 160.0, 140.0, 120.0, 100.0,
                  80.0, 60.0, 40.0, 20.0],
    "n_segments": 40,
    "threshold": 1e-7
  },
  "optimizer": {"max_iterations": 300, "n_random_restarts": 0}
})");
  require(run_cli("run \"" + g.c13_config.string() + "\"") == 0,
          "campaign run failed");

  const json summary = read_json(g.c13_dir / "summary.json");
  require(summary.at("n_included").get<int>() == 64, "pairs were excluded");
  const std::vector<Real> cdf = summary.at("cdf").get<std::vector<Real>>();
  require(cdf.size() == 12, "unexpected grid size");
  for (std::size_t i = 1; i < cdf.size(); ++i)
    require(cdf[i] >= cdf[i - 1], "CDF is not monotone");
  require(cdf.back() == 1.0, "CDF does not reach 1 (tops out at " +
                                 fmt(cdf.back()) + ")");
  require(summary.at("max_met_above_ns").is_number(), "no pair has a MET");
  const Real max_met = summary["max_met_above_ns"].get<Real>();
  require(max_met >= 0.75 * 200.0 && max_met <= 1.25 * 200.0,
          "max MET " + fmt(max_met) + " ns vs the 200 ns pi-time scale");
  return "64/64 pairs, CDF reaches 1, max MET " + fmt(max_met) + " ns";
}

// --- criterion 14: rerun determinism -------------------------------------------

std::string c14_determinism() {
  struct Job {
    const char* label;
    std::filesystem::path config, dir;
    std::vector<std::string> files;
  };
  const std::vector<Job> jobs = {
      {"met-scan", g.c4_config, g.c4_dir, {"met_scan.csv"}},
      {"fit", g.c9_config, g.c9_dir, {"selection_trail.csv", "fit_curves.csv"}},
      {"campaign", g.c13_config, g.c13_dir, {"pairs.csv", "mets.csv", "cdf.csv"}},
  };
  int compared = 0;
  for (const Job& job : jobs) {
    require(!job.config.empty() && std::filesystem::exists(job.dir),
            std::string(job.label) + " artifacts unavailable (criterion "
                                     "above failed?)");
    std::vector<std::string> before;
    for (const std::string& name : job.files)
      before.push_back(read_file(job.dir / name));
    require(run_cli("run \"" + job.config.string() + "\"") == 0,
            std::string(job.label) + " rerun failed");
    for (std::size_t i = 0; i < job.files.size(); ++i) {
      require(before[i] == read_file(job.dir / job.files[i]),
              std::string(job.label) + " rerun changed " + job.files[i]);
      ++compared;
    }
  }
  return std::to_string(compared) + " CSV bodies byte-identical on rerun";
}

// --- runner ---------------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  std::function<std::string()> body;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <spinmet-binary> <repo-root>\n", argv[0]);
    return 1;
  }
  g.binary = std::filesystem::absolute(argv[1]).string();
  g.root = std::filesystem::absolute(argv[2]).string();
  g.work = std::filesystem::temp_directory_path() / "spinmet_acceptance";
  std::filesystem::remove_all(g.work);
  std::filesystem::create_directories(g.work);

  const std::vector<Criterion> criteria = {
      {1, "propagator-unitarity", c01_propagator},
      {2, "exchange-closed-form", c02_exchange_oracle},
      {3, "gradient-exactness", c03_gradient},
      {4, "single-qubit-met", c04_single_qubit_met},
      {5, "amplitude-scaling", c05_amplitude_scaling},
      {6, "exchange-scaling", c06_exchange_scaling},
      {7, "haar-overlap-law", c07_haar_overlap},
      {8, "geodesic-cdf-closed-form", c08_cdf_quadrature},
      {9, "fit-recovery", c09_fit_recovery},
      {10, "bootstrap-protocol", c10_bootstrap},
      {11, "gate-time-bounds", c11_gate_bounds},
      {12, "shot-allocation", c12_shot_allocation},
      {13, "desk-scale-campaign", c13_campaign},
      {14, "rerun-determinism", c14_determinism},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool passed = true;
    try {
      detail = criterion.body();
    } catch (const std::exception& e) {
      passed = false;
      detail = e.what();
      ++failures;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("criterion %2d %-26s %s %7.1fs  %s\n", criterion.id,
                criterion.name, passed ? "PASS" : "FAIL", seconds,
                detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/14 criteria passed\n", 14 - failures);
  return failures == 0 ? 0 : 1;
}
