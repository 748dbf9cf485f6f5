#pragma once
// Box-constrained limited-memory quasi-Newton minimizer. Self-contained and
// deterministic: the pulse optimizer layers multi-start logic on top of this.
//
// Internally the box is mapped to the unit cube (each coordinate scaled by its
// bound width), which equalizes parameter scales (amplitudes in 1e-2 GHz next
// to carriers near 28 GHz) without any problem-specific tuning. Coordinates
// with zero width (lower == upper) are held fixed, which doubles as the
// mechanism for freezing parameters.

#include <functional>
#include <vector>

#include "spinmet/types.hpp"

namespace spinmet {

struct LbfgsOptions {
  int max_iterations = 2000;
  Real gradient_tol = 1e-9;       // sup norm of the scaled projected gradient
  Real relative_cost_tol = 1e-10; // |df| / max(1, |f|) between accepted steps
  int memory = 10;                // stored curvature pairs
  int max_line_search_steps = 40; // backtracking halvings per iteration
  Real armijo_c1 = 1e-4;
};

enum class LbfgsStop {
  GradientTol,   // projected gradient below tolerance
  CostTol,       // relative cost change below tolerance
  Stalled,       // no descent available at double precision
  MaxIterations,
};

struct LbfgsResult {
  VectorXd x;
  Real cost = 0.0;
  std::vector<Real> history;  // cost after each accepted step, incl. start
  Real projected_gradient_norm = 0.0;  // scaled sup norm at exit
  int iterations = 0;
  bool converged = false;  // true unless the iteration budget ran out
  LbfgsStop stop = LbfgsStop::MaxIterations;
};

// Objective fills `grad` (same size as x) and returns the cost.
using Objective = std::function<Real(const VectorXd& x, VectorXd& grad)>;

// Minimizes objective over the box [lower, upper] starting from x0 (clamped
// into the box first). Deterministic: no randomness, no time dependence.
LbfgsResult minimize_bounded(const Objective& objective, VectorXd x0,
                             const VectorXd& lower, const VectorXd& upper,
                             const LbfgsOptions& options = {});

}  // namespace spinmet
