#include "lpoa/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpoa {
namespace {

bool strictly_feasible(const BarrierProblem& prob, const Vector& u) {
  for (int k = 0; k < prob.num_constraints(); ++k) {
    const double g = prob.constraint(k, u, nullptr, nullptr);
    if (!(g < 0.0)) return false;
  }
  return true;
}

double barrier_value(const BarrierProblem& prob, const Vector& u, double t) {
  double phi = t * prob.objective(u, nullptr, nullptr);
  for (int k = 0; k < prob.num_constraints(); ++k) {
    phi -= std::log(-prob.constraint(k, u, nullptr, nullptr));
  }
  return phi;
}

Vector multiplier_estimates(const BarrierProblem& prob, const Vector& u, double t) {
  Vector lam(prob.num_constraints());
  for (int k = 0; k < prob.num_constraints(); ++k) {
    lam[k] = 1.0 / (t * -prob.constraint(k, u, nullptr, nullptr));
  }
  return lam;
}

}  // namespace

BarrierResult barrier_minimize(const BarrierProblem& prob, const Vector& u0,
                               const BarrierOptions& opt) {
  const int n = prob.dim();
  const int m = prob.num_constraints();
  if (u0.size() != n) throw InvalidInput("barrier_minimize: start has wrong dimension");
  if (!strictly_feasible(prob, u0)) {
    throw InvalidInput("barrier_minimize: start is not strictly feasible");
  }
  BarrierResult res;
  res.u = u0;
  if (prob.early_stop(u0)) {
    res.objective = prob.objective(u0, nullptr, nullptr);
    res.stopped_early = true;
    res.converged = true;
    return res;
  }
  const double f0 = prob.objective(u0, nullptr, nullptr);
  double t = m / std::max(1e-8, std::fabs(f0));
  Vector u = u0;
  Vector grad(n), gk(n);
  Matrix hess(n, n), hk(n, n);

  for (;;) {
    // Centering for the current t.
    for (int inner = 0; inner < 200; ++inner) {
      if (res.newton_iterations >= opt.max_newton) {
        res.u = u;
        res.objective = prob.objective(u, nullptr, nullptr);
        res.gap = m / t;
        res.multipliers = multiplier_estimates(prob, u, t);
        return res;
      }
      ++res.newton_iterations;
      prob.objective(u, &gk, &hk);
      grad = t * gk;
      hess = t * hk;
      for (int k = 0; k < m; ++k) {
        const double g = prob.constraint(k, u, &gk, &hk);
        grad -= gk / g;
        hess += gk * gk.transpose() / (g * g) - hk / g;
      }
      Eigen::LDLT<Matrix> ldlt(hess);
      Vector step = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(grad) >= 0.0) {
        const double shift = 1e-10 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
        step = (hess + shift * Matrix::Identity(n, n)).llt().solve(-grad);
        if (!step.allFinite() || step.dot(grad) >= 0.0) step = -grad;
      }
      const double decrement2 = -grad.dot(step);
      if (decrement2 / 2.0 <= opt.centering_tolerance) break;

      double s = 1.0;
      while (!strictly_feasible(prob, u + s * step) && s > 1e-20) s *= 0.5;
      // Near the center the quadratic model is trusted; function values at
      // large t carry rounding error far above the decrement.
      if (decrement2 > 1e-2) {
        const double phi = barrier_value(prob, u, t);
        while (s > 1e-20 &&
               barrier_value(prob, u + s * step, t) > phi - 0.25 * s * decrement2) {
          s *= 0.5;
        }
      }
      if (s <= 1e-20) break;
      u += s * step;
      if (prob.early_stop(u)) {
        res.u = u;
        res.objective = prob.objective(u, nullptr, nullptr);
        res.gap = m / t;
        res.multipliers = multiplier_estimates(prob, u, t);
        res.stopped_early = true;
        res.converged = true;
        return res;
      }
    }
    res.gap = m / t;
    if (res.gap <= opt.gap_tolerance) break;
    t *= opt.mu;
  }
  res.u = u;
  res.objective = prob.objective(u, nullptr, nullptr);
  res.multipliers = multiplier_estimates(prob, u, t);
  res.converged = true;
  return res;
}

}  // namespace lpoa
