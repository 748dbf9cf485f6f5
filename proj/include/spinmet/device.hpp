#pragma once
// Device parameterization of a linear silicon spin-qubit chain with a shared
// microwave line and nearest-neighbor exchange, plus piecewise-constant
// control schedules, bound validation, and a reference rotating-frame
// Hamiltonian assembled at any instant. All frequencies are linear
// frequencies in GHz (h = 1), all times in ns; evolution is exp(-i 2*pi H t).

#include <string>
#include <vector>

#include "spinmet/types.hpp"

namespace spinmet {

struct DeviceParams {
  int n_qubits = 1;
  Real mean_zeeman = 28.0;   // GHz; B_i = mean_zeeman + zeeman_offsets[i]
  VectorXd zeeman_offsets;   // GHz, length n_qubits, mean 0
  Real iq_max = 0.020 / (2.0 * 1.4142135623730951);  // GHz, bound on |I|,|Q|
  Real j_max = 1.0;          // GHz, exchange in [0, j_max]
  Real omega_low = 27.0;     // GHz, carrier window
  Real omega_high = 29.0;
  int n_signals = 4;         // number of microwave tones S

  Real zeeman(int site) const { return mean_zeeman + zeeman_offsets(site); }
  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }

  // Bench defaults: B = 28 GHz, offsets equally spaced spanning -30..+30 MHz
  // (single qubit: 0), iq_max = 20 MHz / (2*sqrt(2)), j_max = 1 GHz, carrier
  // window 27-29 GHz, four tones unless overridden.
  static DeviceParams bench_defaults(int n_qubits, int n_signals = 4);
};

// Piecewise-constant controls: segment m in [0, M) holds over
// [m*dt, (m+1)*dt) with dt = total_time / n_segments. Carriers are global
// (one per tone), not segmented.
struct ControlSchedule {
  Real total_time = 0.0;  // ns
  int n_segments = 1;
  MatrixXd i_amps;   // S x M, GHz
  MatrixXd q_amps;   // S x M, GHz
  MatrixXd j_amps;   // (n_qubits-1) x M, GHz, nonnegative
  VectorXd carriers; // S entries, GHz

  Real segment_duration() const { return total_time / n_segments; }

  // All-zero amplitudes; carriers parked on the qubit splittings (tone k on
  // qubit k mod n), clamped into the carrier window.
  static ControlSchedule zeros(const DeviceParams& params, Real total_time,
                               int n_segments);
};

// --- validation -------------------------------------------------------------

struct BoundViolation {
  std::string channel;  // "i_amp", "q_amp", "j_amp", "carrier", "shape", ...
  int row = -1;         // tone or bond index; -1 when not applicable
  int segment = -1;     // -1 when not applicable
  Real value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<BoundViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks shapes against (params.n_signals, n_segments), amplitude bounds
// |I|,|Q| <= iq_max, 0 <= J <= j_max, carriers inside the window, T > 0.
ValidationReport validate(const DeviceParams& params,
                          const ControlSchedule& sched);

// Device-level consistency (offsets mean zero and length, positive bounds,
// ordered window, S >= 1). Returns human-readable issues; empty means clean.
std::vector<std::string> device_params_issues(const DeviceParams& params);

// --- rotating-frame generator ------------------------------------------------

// Hermitian generator at time t in the frame that removes the full Zeeman
// drift (each qubit co-rotating at its own splitting). The drive enters as
// (1/8) sum_k (I_k - iQ_k) e^{+i 2 pi (f_k - B_i) t} sigma_plus^(i) + h.c.;
// with rwa set, the counter-rotating (f_k + B_i) parts are dropped. Exchange
// enters as -(J_j/4) E_j(t), where E_j is the Heisenberg bond operator whose
// flip-flop corners carry e^{+-i 2 pi (B_{j+1}-B_j) t}.
MatrixXcd rotating_frame_hamiltonian(const DeviceParams& params,
                                     const ControlSchedule& sched, Real t,
                                     bool rwa = true);

// --- elementary operators (test and assembly helpers) -----------------------

MatrixXcd sigma_x();
MatrixXcd sigma_y();
MatrixXcd sigma_z();

// Embeds a 2x2 operator on one site (site 0 = most significant bit).
MatrixXcd site_operator(int n_qubits, int site, const MatrixXcd& op);

MatrixXcd collective_sigma_x(int n_qubits);  // sum_i sigma_x^(i)
MatrixXcd collective_sigma_y(int n_qubits);  // sum_i sigma_y^(i)

// sigma.sigma on sites (bond, bond+1): XX + YY + ZZ.
MatrixXcd heisenberg_bond(int n_qubits, int bond);

// sum_i sigma_z^(i) (total magnetization).
MatrixXcd total_sigma_z(int n_qubits);

// --- serialization -----------------------------------------------------------

// JSON schema with unit-suffixed keys: {"n_qubits", "b_ghz",
// "zeeman_offsets_mhz", "iq_max_mhz", "j_max_ghz", "omega_window_ghz":
// [lo, hi], "n_signals"}. Structural problems raise SchemaError.
DeviceParams parse_device_params(const std::string& json_text,
                                 const std::string& origin = "");
DeviceParams load_device_params(const std::string& path);

}  // namespace spinmet
