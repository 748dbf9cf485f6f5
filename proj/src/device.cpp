// Device parameterization, schedule validation, and the reference
// rotating-frame Hamiltonian.

#include "spinmet/device.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spinmet/errors.hpp"
#include "spinmet/linalg.hpp"

namespace spinmet {

using nlohmann::json;

DeviceParams DeviceParams::bench_defaults(int n_qubits, int n_signals) {
  DeviceParams p;
  p.n_qubits = n_qubits;
  p.n_signals = n_signals;
  p.zeeman_offsets = VectorXd::Zero(n_qubits);
  if (n_qubits > 1) {
    const Real span = 0.060;  // -30..+30 MHz in GHz
    for (int i = 0; i < n_qubits; ++i)
      p.zeeman_offsets(i) = -span / 2.0 + span * i / (n_qubits - 1);
  }
  return p;
}

ControlSchedule ControlSchedule::zeros(const DeviceParams& params,
                                       Real total_time, int n_segments) {
  ControlSchedule s;
  s.total_time = total_time;
  s.n_segments = n_segments;
  s.i_amps = MatrixXd::Zero(params.n_signals, n_segments);
  s.q_amps = MatrixXd::Zero(params.n_signals, n_segments);
  s.j_amps = MatrixXd::Zero(params.n_qubits - 1, n_segments);
  s.carriers = VectorXd(params.n_signals);
  for (int k = 0; k < params.n_signals; ++k) {
    const Real target = params.zeeman(k % params.n_qubits);
    s.carriers(k) =
        std::min(std::max(target, params.omega_low), params.omega_high);
  }
  return s;
}

// --- validation -------------------------------------------------------------

namespace {

void check_shape(const MatrixXd& m, int rows, int cols, const char* channel,
                 ValidationReport& report) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << channel << " has shape " << m.rows() << "x" << m.cols()
        << ", expected " << rows << "x" << cols;
    report.violations.push_back({channel, -1, -1, 0.0, msg.str()});
  }
}

void check_range(const MatrixXd& m, Real lo, Real hi, const char* channel,
                 ValidationReport& report) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const Real v = m(r, c);
      if (v < lo || v > hi) {
        std::ostringstream msg;
        msg << channel << "[" << r << "][" << c << "] = " << v
            << " outside [" << lo << ", " << hi << "]";
        report.violations.push_back({channel, r, c, v, msg.str()});
      }
    }
  }
}

}  // namespace

ValidationReport validate(const DeviceParams& params,
                          const ControlSchedule& sched) {
  ValidationReport report;
  if (!(sched.total_time > 0.0))
    report.violations.push_back(
        {"total_time", -1, -1, sched.total_time, "total_time must be > 0"});
  if (sched.n_segments < 1)
    report.violations.push_back({"n_segments", -1, -1,
                                 static_cast<Real>(sched.n_segments),
                                 "n_segments must be >= 1"});
  const int s = params.n_signals;
  const int m = sched.n_segments;
  check_shape(sched.i_amps, s, m, "i_amp", report);
  check_shape(sched.q_amps, s, m, "q_amp", report);
  check_shape(sched.j_amps, params.n_qubits - 1, m, "j_amp", report);
  if (sched.carriers.size() != s) {
    std::ostringstream msg;
    msg << "carriers has length " << sched.carriers.size() << ", expected "
        << s;
    report.violations.push_back({"carrier", -1, -1, 0.0, msg.str()});
  }
  if (!report.ok()) return report;  // shape errors make bound checks moot

  check_range(sched.i_amps, -params.iq_max, params.iq_max, "i_amp", report);
  check_range(sched.q_amps, -params.iq_max, params.iq_max, "q_amp", report);
  check_range(sched.j_amps, 0.0, params.j_max, "j_amp", report);
  for (int k = 0; k < s; ++k) {
    const Real w = sched.carriers(k);
    if (w < params.omega_low || w > params.omega_high) {
      std::ostringstream msg;
      msg << "carrier[" << k << "] = " << w << " outside ["
          << params.omega_low << ", " << params.omega_high << "]";
      report.violations.push_back({"carrier", k, -1, w, msg.str()});
    }
  }
  return report;
}

std::vector<std::string> device_params_issues(const DeviceParams& params) {
  std::vector<std::string> issues;
  if (params.n_qubits < 1) issues.push_back("n_qubits must be >= 1");
  if (params.zeeman_offsets.size() != params.n_qubits)
    issues.push_back("zeeman_offsets length must equal n_qubits");
  else if (params.n_qubits >= 1 &&
           std::abs(params.zeeman_offsets.mean()) > 1e-9)
    issues.push_back("zeeman_offsets must average to zero");
  if (!(params.iq_max > 0.0)) issues.push_back("iq_max must be > 0");
  if (params.j_max < 0.0) issues.push_back("j_max must be >= 0");
  if (!(params.omega_low < params.omega_high))
    issues.push_back("omega window must satisfy low < high");
  if (params.n_signals < 1) issues.push_back("n_signals must be >= 1");
  return issues;
}

// --- elementary operators ----------------------------------------------------

MatrixXcd sigma_x() {
  MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

MatrixXcd sigma_y() {
  MatrixXcd m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

MatrixXcd sigma_z() {
  MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

MatrixXcd site_operator(int n_qubits, int site, const MatrixXcd& op) {
  MatrixXcd out = MatrixXcd::Identity(1, 1);
  for (int i = 0; i < n_qubits; ++i) {
    const MatrixXcd factor =
        (i == site) ? op : MatrixXcd::Identity(2, 2).eval();
    out = kron<Complex>(out, factor);
  }
  return out;
}

MatrixXcd collective_sigma_x(int n_qubits) {
  MatrixXcd out = MatrixXcd::Zero(1 << n_qubits, 1 << n_qubits);
  for (int i = 0; i < n_qubits; ++i) out += site_operator(n_qubits, i, sigma_x());
  return out;
}

MatrixXcd collective_sigma_y(int n_qubits) {
  MatrixXcd out = MatrixXcd::Zero(1 << n_qubits, 1 << n_qubits);
  for (int i = 0; i < n_qubits; ++i) out += site_operator(n_qubits, i, sigma_y());
  return out;
}

MatrixXcd heisenberg_bond(int n_qubits, int bond) {
  MatrixXcd out = MatrixXcd::Zero(1 << n_qubits, 1 << n_qubits);
  const MatrixXcd ops[3] = {sigma_x(), sigma_y(), sigma_z()};
  for (const MatrixXcd& op : ops)
    out += site_operator(n_qubits, bond, op) *
           site_operator(n_qubits, bond + 1, op);
  return out;
}

MatrixXcd total_sigma_z(int n_qubits) {
  MatrixXcd out = MatrixXcd::Zero(1 << n_qubits, 1 << n_qubits);
  for (int i = 0; i < n_qubits; ++i) out += site_operator(n_qubits, i, sigma_z());
  return out;
}

// --- rotating-frame generator --------------------------------------------------

MatrixXcd rotating_frame_hamiltonian(const DeviceParams& params,
                                     const ControlSchedule& sched, Real t,
                                     bool rwa) {
  const Eigen::Index d = params.dim();
  MatrixXcd h = MatrixXcd::Zero(d, d);

  int seg = static_cast<int>(std::floor(t / sched.segment_duration()));
  seg = std::min(std::max(seg, 0), sched.n_segments - 1);

  // Drive: lab term (g(t)/4) sum_i sigma_x^(i); in the co-rotating frame each
  // tone contributes (I_k - iQ_k)/8 e^{+i 2 pi (f_k - B_i) t} on sigma_plus.
  MatrixXcd sigma_plus(2, 2);
  sigma_plus << 0, 1, 0, 0;  // |0><1| (Z|0> = +|0>)
  for (int i = 0; i < params.n_qubits; ++i) {
    Complex amp{0.0, 0.0};
    for (int k = 0; k < params.n_signals; ++k) {
      const Complex iq{sched.i_amps(k, seg), -sched.q_amps(k, seg)};
      amp += iq * std::exp(Complex(
                 0.0, two_pi * (sched.carriers(k) - params.zeeman(i)) * t));
      if (!rwa) {
        const Complex iq_counter{sched.i_amps(k, seg), sched.q_amps(k, seg)};
        amp += iq_counter *
               std::exp(Complex(
                   0.0, -two_pi * (sched.carriers(k) + params.zeeman(i)) * t));
      }
    }
    const MatrixXcd raise = site_operator(params.n_qubits, i, sigma_plus);
    h += (amp / 8.0) * raise + std::conj(amp / 8.0) * raise.adjoint();
  }

  // Exchange: -(J_j/4) E_j(t); E_j is the Heisenberg bond whose flip-flop
  // corners precess at the bond's Zeeman difference.
  for (int j = 0; j + 1 < params.n_qubits; ++j) {
    const Real J = sched.j_amps(j, seg);
    if (J == 0.0) continue;
    const Real db = params.zeeman_offsets(j + 1) - params.zeeman_offsets(j);
    const Complex phase = std::exp(Complex(0.0, two_pi * db * t));
    MatrixXcd bond(4, 4);
    bond << 1, 0, 0, 0,
            0, -1, 2.0 * phase, 0,
            0, 2.0 * std::conj(phase), -1, 0,
            0, 0, 0, 1;
    // embed the 4x4 two-site operator on (j, j+1)
    const int left = j;
    MatrixXcd embedded = MatrixXcd::Identity(1, 1);
    int i = 0;
    while (i < params.n_qubits) {
      if (i == left) {
        embedded = kron<Complex>(embedded, bond);
        i += 2;
      } else {
        embedded = kron<Complex>(embedded, MatrixXcd::Identity(2, 2).eval());
        i += 1;
      }
    }
    h += -(J / 4.0) * embedded;
  }
  return h;
}

// --- serialization ------------------------------------------------------------

namespace {

const json& require_field(const json& obj, const char* key,
                          const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError(where, std::string("missing field \"") + key + "\"");
  return *it;
}

Real require_number(const json& obj, const char* key,
                    const std::string& where) {
  const json& f = require_field(obj, key, where);
  if (!f.is_number())
    throw SchemaError(where + "." + key, "must be a number");
  return f.get<Real>();
}

}  // namespace

DeviceParams parse_device_params(const std::string& json_text,
                                 const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(origin, e.what());
  }
  const std::string root = origin.empty() ? "$" : origin;
  if (!doc.is_object()) throw SchemaError(root, "top level must be an object");

  DeviceParams p;
  const json& nq = require_field(doc, "n_qubits", root);
  if (!nq.is_number_integer() || nq.get<int>() < 1)
    throw SchemaError(root + ".n_qubits", "must be an integer >= 1");
  p.n_qubits = nq.get<int>();

  p.mean_zeeman = require_number(doc, "b_ghz", root);

  const json& offsets = require_field(doc, "zeeman_offsets_mhz", root);
  if (!offsets.is_array() ||
      static_cast<int>(offsets.size()) != p.n_qubits)
    throw SchemaError(root + ".zeeman_offsets_mhz",
                      "must be an array of length n_qubits");
  p.zeeman_offsets = VectorXd(p.n_qubits);
  for (int i = 0; i < p.n_qubits; ++i) {
    const json& o = offsets[static_cast<std::size_t>(i)];
    if (!o.is_number())
      throw SchemaError(root + ".zeeman_offsets_mhz[" + std::to_string(i) + "]",
                        "must be a number");
    p.zeeman_offsets(i) = o.get<Real>() * 1e-3;  // MHz -> GHz
  }

  p.iq_max = require_number(doc, "iq_max_mhz", root) * 1e-3;
  p.j_max = require_number(doc, "j_max_ghz", root);

  const json& window = require_field(doc, "omega_window_ghz", root);
  if (!window.is_array() || window.size() != 2 || !window[0].is_number() ||
      !window[1].is_number())
    throw SchemaError(root + ".omega_window_ghz",
                      "must be a [low, high] pair of numbers");
  p.omega_low = window[0].get<Real>();
  p.omega_high = window[1].get<Real>();

  const json& ns = require_field(doc, "n_signals", root);
  if (!ns.is_number_integer() || ns.get<int>() < 1)
    throw SchemaError(root + ".n_signals", "must be an integer >= 1");
  p.n_signals = ns.get<int>();
  return p;
}

DeviceParams load_device_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_device_params(buf.str(), path);
}

}  // namespace spinmet
