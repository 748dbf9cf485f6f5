#pragma once
// Time evolution over piecewise-constant control schedules. States are
// propagated in a "mid" frame co-rotating at the device's mean Zeeman
// splitting (a control-independent constant), where the Zeeman residuals and
// exchange couplings are static within each segment and all explicit time
// dependence is carried by a handful of drive phasors. Each substep advances by the exact exponential of an effective
// generator: the exact interval average of the Hamiltonian plus a two-node
// commutator correction (fourth-order Magnus). Inputs and outputs live in
// the fully co-rotating frame (every qubit at its own splitting), reached
// from the mid frame by a diagonal phase map.
//
// Also provides the exact closed-form propagator for constant exchange on a
// single bond, used as an independent oracle against the generic integrator.

#include <vector>

#include "spinmet/device.hpp"
#include "spinmet/linalg.hpp"
#include "spinmet/types.hpp"

namespace spinmet {

struct PropagationOptions {
  bool rwa = true;           // drop counter-rotating (carrier + splitting) terms
  Real start_time = 0.0;     // ns; absolute time at which the schedule begins
  Real phase_budget_rad = 0.005;  // max oscillatory phase advance per substep
  int substeps_override = 0;      // > 0: force this many substeps per segment
  int substep_multiplier = 1;     // scales the automatic count (convergence tests)
  bool keep_segment_propagators = false;
};

struct PropagationResult {
  StateVector final_state;  // co-rotating frame at start_time + total_time
  std::vector<MatrixXcd> segment_propagators;  // co-rotating frame; optional
  int substeps_per_segment = 0;
};

// One oscillating drive component: its amplitude multiplies e^{i theta t}
// (theta in rad/ns) on the collective raising operator. With the rotating-
// wave approximation there is one phasor per tone at the tone's detuning
// from the reference frequency; the full-frame mode adds the counter-
// rotating partner at -(carrier + reference).
struct DrivePhasor {
  Real theta = 0.0;
  int tone = 0;
  bool counter = false;
};

// Precomputed frame-independent pieces of (params, schedule).
struct MidFrameModel {
  int n_qubits = 0;
  int n_segments = 0;
  Real f_ref = 0.0;       // GHz; reference frame frequency (mean Zeeman)
  Real start_time = 0.0;  // ns
  Real dt_segment = 0.0;  // ns
  int n_substeps = 4;     // per segment
  bool uniform = false;   // all phasor frequencies are exactly zero

  ControlSchedule sched;  // retained for per-segment amplitudes
  std::vector<DrivePhasor> phasors;

  VectorXd w_gen;     // diagonal generator of the frame map W(t)
  MatrixXcd xbar;     // sum_i sigma_x^(i)
  MatrixXcd ybar;     // sum_i sigma_y^(i)
  MatrixXcd comm_xy;  // [xbar, ybar]
  std::vector<MatrixXcd> bond_ops;     // sigma.sigma per bond
  std::vector<MatrixXcd> bond_comm_x;  // [bond_op, xbar] per bond
  std::vector<MatrixXcd> bond_comm_y;  // [bond_op, ybar] per bond

  std::vector<MatrixXcd> h_static;  // per segment: Zeeman residual + exchange
  std::vector<MatrixXcd> comm_x;    // per segment: [h_static, xbar]
  std::vector<MatrixXcd> comm_y;    // per segment: [h_static, ybar]

  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }
  Real segment_start(int seg) const { return start_time + seg * dt_segment; }
  Real substep_duration() const { return dt_segment / n_substeps; }
  // Phasor amplitude on segment seg: I - iQ for co-rotating components,
  // I + iQ for counter-rotating ones.
  Complex phasor_amp(const DrivePhasor& p, int seg) const {
    const Real i = sched.i_amps(p.tone, seg);
    const Real q = sched.q_amps(p.tone, seg);
    return p.counter ? Complex(i, q) : Complex(i, -q);
  }
};

MidFrameModel build_mid_frame_model(const DeviceParams& params,
                                    const ControlSchedule& sched,
                                    const PropagationOptions& opts = {});

// Exact interval averages and Gauss-node samples of the drive envelopes for
// one substep; the drive term is (a(t) xbar + b(t) ybar)/8.
struct SubstepEnvelope {
  Real u0 = 0.0, u1 = 0.0, h = 0.0;  // absolute substep interval
  Real t1 = 0.0, t2 = 0.0;           // Gauss nodes, t1 < t2
  std::vector<Complex> mean;   // per phasor: average of e^{i theta t}
  std::vector<Complex> node1;  // per phasor: e^{i theta t1}
  std::vector<Complex> node2;  // per phasor: e^{i theta t2}
  Real abar = 0, bbar = 0, a1 = 0, b1 = 0, a2 = 0, b2 = 0;
};

SubstepEnvelope substep_envelope(const MidFrameModel& model, int seg, int sub);

// Effective Hermitian generator for one substep; its exact exponential over
// the substep duration is the substep propagator.
MatrixXcd substep_generator(const MidFrameModel& model, int seg,
                            const SubstepEnvelope& env);

// Diagonal of the map W(t) from the mid frame to the co-rotating frame:
// psi_rot = W(t) .* psi_mid, entries exp(-i 2 pi t w_gen).
VectorXcd frame_diagonal(const MidFrameModel& model, Real t);

PropagationResult propagate(const DeviceParams& params,
                            const ControlSchedule& sched,
                            const StateVector& psi0,
                            const PropagationOptions& opts = {});

// --- constant-exchange closed form -------------------------------------------

// Exact 4x4 propagator (basis {00,01,10,11}, co-rotating frame) for constant
// exchange J on a bond whose Zeeman splittings differ by db, switched on at
// absolute time t0 for duration dt. Exact for all arguments.
MatrixXcd exchange_unitary_exact(Real j, Real db, Real t0, Real dt);

// Power-of-SWAP approximation of the same propagator: a SWAP^alpha block
// with alpha = 2*sqrt(J^2+db^2)*dt and corner dressing e^{+-i 2 pi db t0}.
// Error is O(db*dt) in the oscillating phases and O(db/J) in the diagonal
// block entries.
MatrixXcd exchange_unitary_limit(Real j, Real db, Real t0, Real dt);

}  // namespace spinmet
