// Projected L-BFGS over a box, run in bound-width-scaled coordinates.

#include "spinmet/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "spinmet/errors.hpp"

namespace spinmet {

namespace {

struct CurvaturePair {
  VectorXd s;
  VectorXd y;
  Real rho = 0.0;
};

// Two-loop recursion; `g` is already masked on the active set.
VectorXd lbfgs_direction(const std::deque<CurvaturePair>& pairs,
                         const VectorXd& g) {
  VectorXd q = -g;
  if (pairs.empty()) return q;
  std::vector<Real> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  const CurvaturePair& last = pairs.back();
  const Real gamma = last.s.dot(last.y) / last.y.squaredNorm();
  q *= gamma;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Real beta = pairs[i].rho * pairs[i].y.dot(q);
    q += (alpha[i] - beta) * pairs[i].s;
  }
  return q;
}

}  // namespace

LbfgsResult minimize_bounded(const Objective& objective, VectorXd x0,
                             const VectorXd& lower, const VectorXd& upper,
                             const LbfgsOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) {
    throw ValidationError("optimizer", "bound vectors must match x0 in size");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lower[i] > upper[i]) {
      throw ValidationError("optimizer", "lower bound exceeds upper bound at index " +
                                            std::to_string(i));
    }
  }

  // Scaled coordinates: x = lower + width .* z with z in [0,1]; zero-width
  // coordinates are pinned at their bound value.
  VectorXd width(n);
  for (Eigen::Index i = 0; i < n; ++i) width[i] = upper[i] - lower[i];
  const auto to_x = [&](const VectorXd& z) {
    return VectorXd(lower + width.cwiseProduct(z));
  };
  const auto project = [&](VectorXd z) {
    for (Eigen::Index i = 0; i < n; ++i) {
      z[i] = width[i] > 0.0 ? std::clamp(z[i], 0.0, 1.0) : 0.0;
    }
    return z;
  };

  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real x = std::clamp(x0[i], lower[i], upper[i]);
    z[i] = width[i] > 0.0 ? (x - lower[i]) / width[i] : 0.0;
  }

  VectorXd grad_x(n);
  const auto eval = [&](const VectorXd& zz, VectorXd& gz) {
    const Real f = objective(to_x(zz), grad_x);
    gz = width.cwiseProduct(grad_x);
    return f;
  };

  LbfgsResult result;
  VectorXd g(n);
  Real f = eval(z, g);
  result.history.push_back(f);

  // Sup norm of the projected gradient in the unit cube.
  const auto pg_norm = [&](const VectorXd& zz, const VectorXd& gz) {
    Real sup = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (width[i] <= 0.0) continue;
      const Real moved = std::clamp(zz[i] - gz[i], 0.0, 1.0);
      sup = std::max(sup, std::abs(zz[i] - moved));
    }
    return sup;
  };

  std::deque<CurvaturePair> pairs;
  result.stop = LbfgsStop::MaxIterations;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const Real pg = pg_norm(z, g);
    result.projected_gradient_norm = pg;
    if (pg <= options.gradient_tol) {
      result.stop = LbfgsStop::GradientTol;
      break;
    }

    // Mask the gradient on the active set so the quasi-Newton direction does
    // not push against a bound we are sitting on.
    VectorXd gm = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_low = z[i] <= 0.0 && g[i] > 0.0;
      const bool at_high = z[i] >= 1.0 && g[i] < 0.0;
      if (width[i] <= 0.0 || at_low || at_high) gm[i] = 0.0;
    }

    bool accepted = false;
    Real f_new = f;
    VectorXd z_new, g_new(n);
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) pairs.clear();  // retry as steepest descent
      VectorXd d = lbfgs_direction(pairs, gm);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (width[i] <= 0.0) d[i] = 0.0;
      }
      if (d.dot(g) >= 0.0) d = -gm;  // guard: ensure a descent direction
      const Real dmax = d.cwiseAbs().maxCoeff();
      if (dmax == 0.0) continue;
      // First step capped at a quarter of the unit cube to avoid wild
      // excursions before any curvature information exists.
      Real step = pairs.empty() ? std::min(1.0, 0.25 / dmax) : 1.0;
      for (int ls = 0; ls < options.max_line_search_steps; ++ls, step *= 0.5) {
        const VectorXd z_try = project(z + step * d);
        const Real pred = std::min(0.0, g.dot(z_try - z));
        if ((z_try - z).cwiseAbs().maxCoeff() == 0.0) continue;
        const Real f_try = eval(z_try, g_new);
        if (f_try <= f + options.armijo_c1 * pred && (pred < 0.0 || f_try < f)) {
          z_new = z_try;
          f_new = f_try;
          accepted = true;
          break;
        }
      }
    }

    if (!accepted) {
      // No decrease found even along steepest descent: numerically at a
      // minimum (the projected gradient just isn't tiny in these units).
      result.stop = LbfgsStop::Stalled;
      break;
    }

    CurvaturePair pair;
    pair.s = z_new - z;
    pair.y = g_new - g;
    const Real sy = pair.s.dot(pair.y);
    if (sy > 1e-12 * pair.s.norm() * pair.y.norm()) {
      pair.rho = 1.0 / sy;
      pairs.push_back(std::move(pair));
      if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
    }

    const Real df = std::abs(f - f_new);
    z = z_new;
    g = g_new;
    f = f_new;
    result.history.push_back(f);
    if (df <= options.relative_cost_tol * std::max(Real(1), std::abs(f))) {
      ++iter;
      result.stop = LbfgsStop::CostTol;
      break;
    }
  }

  result.x = to_x(z);
  result.cost = f;
  result.iterations = iter;
  result.projected_gradient_norm = pg_norm(z, g);
  result.converged = result.stop != LbfgsStop::MaxIterations;
  return result;
}

}  // namespace spinmet
