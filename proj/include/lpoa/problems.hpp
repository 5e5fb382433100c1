#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpoa/lp_geometry.hpp"

namespace lpoa {

/// Raised when an iterative solver exhausts its budget without meeting its
/// stopping rule.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class UnknownProblem : public InvalidInput {
 public:
  explicit UnknownProblem(const std::string& key) : InvalidInput("unknown problem: " + key) {}
};

/// Smooth convex constraint c(x) <= 0 on the decision space.
struct ConvexConstraint {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

enum class ProblemKind { Example1, RotatedEllipse, Example2 };

/// Convex vector optimization instance min Gamma(x) over X with respect to the
/// nonnegative orthant, together with the slice {y : w_bar^T y <= gamma_slice}.
struct ProblemInstance {
  std::string key;
  ProblemKind kind = ProblemKind::Example1;
  int q = 0;
  int n = 0;

  std::function<Vector(const Vector&)> gamma_eval;
  std::function<Matrix(const Vector&)> gamma_jacobian;
  /// Hessian of the i-th objective component.
  std::function<Matrix(int, const Vector&)> gamma_hessian;
  /// X = {x : c(x) <= 0 for every constraint}.
  std::vector<ConvexConstraint> constraints;
  std::function<Vector(const Vector&)> feasible_project;
  /// Exact weighted-sum minimizer when one is known.
  std::function<std::optional<Vector>(const Vector&)> weighted_sum_closed_form;

  Vector w_bar;
  double gamma_slice = 0.0;
  /// Lower bounds min_x Gamma_i(x); the e_i weighted-sum offsets.
  Vector lower_offsets;
  /// Every point of the slice has l_1 norm (hence any l_p norm) at most this.
  double diameter_hint = 0.0;
  /// Strictly feasible decision with w_bar^T Gamma(x) < gamma_slice.
  Vector interior_point;

  bool identity_objective() const { return kind != ProblemKind::Example2; }
  /// Largest constraint value at x (<= 0 means feasible).
  double constraint_violation(const Vector& x) const;
};

ProblemInstance example1(int q);
ProblemInstance rotated_ellipse();
ProblemInstance example2();
/// "example1-q2", "example1-q3", "ellipse", "example2".
ProblemInstance make_problem(const std::string& key);
const std::vector<std::string>& problem_keys();

struct WeightedSumOptions {
  int max_iterations = 10000;
  double tolerance = 1e-9;
};

struct WeightedSumResult {
  Vector x_star;
  double support_offset = 0.0;
  int iterations = 0;
};

/// Minimizes omega^T Gamma(x) over X (closed form if the instance has one,
/// projected gradient with Armijo backtracking otherwise).
WeightedSumResult weighted_sum(const ProblemInstance& prob, const Vector& omega,
                               const WeightedSumOptions& opt = {});

/// Whether y lies in the slice of the upper image, within tol.
bool in_upper_slice(const ProblemInstance& prob, const Vector& y, double tol = 1e-12);

/// l_p distance from v to the slice of the upper image by dense sampling of
/// its Pareto boundary and of the slice face. Only for identity objectives.
/// The q = 2 frontier is sampled at `samples` arc parameters; q = 3 uses a
/// samples x samples grid. Never smaller than the true distance.
double oracle_distance(const ProblemInstance& prob, const Vector& v, const NormExponent& ne,
                       int samples);

}  // namespace lpoa
