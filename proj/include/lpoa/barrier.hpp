#pragma once

#include "lpoa/lp_geometry.hpp"

namespace lpoa {

/// Smooth convex program min f(u) s.t. g_k(u) <= 0, k < num_constraints().
/// Derivative pointers may be null when not needed.
class BarrierProblem {
 public:
  virtual ~BarrierProblem() = default;
  virtual int dim() const = 0;
  virtual int num_constraints() const = 0;
  virtual double objective(const Vector& u, Vector* grad, Matrix* hess) const = 0;
  virtual double constraint(int k, const Vector& u, Vector* grad, Matrix* hess) const = 0;
  /// Lets a solve stop early once the current iterate is good enough.
  virtual bool early_stop(const Vector&) const { return false; }
};

struct BarrierOptions {
  double gap_tolerance = 1e-12;  // stop once m / t falls below this
  double mu = 10.0;              // barrier weight growth per stage
  double centering_tolerance = 1e-10;  // Newton decrement^2 / 2
  int max_newton = 2000;
};

struct BarrierResult {
  Vector u;
  double objective = 0.0;
  double gap = 0.0;  // m / t at the last completed stage
  /// Multiplier estimates 1 / (t * -g_k(u)) at the returned point.
  Vector multipliers;
  int newton_iterations = 0;
  bool converged = false;
  bool stopped_early = false;
};

/// Log-barrier path following with damped Newton centering. u0 must be
/// strictly feasible.
BarrierResult barrier_minimize(const BarrierProblem& prob, const Vector& u0,
                               const BarrierOptions& opt);

}  // namespace lpoa
