#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpoa/problems.hpp"

namespace lpoa {

struct SolverTolerances {
  double objective = 1e-7;   // required accuracy of the residual norm
  double gap = 1e-11;        // barrier duality gap at termination
  double zero = 1e-10;       // residuals at or below this mean v lies in A
  double vi = 1e-6;          // supporting-halfspace check
  double feasibility = 1e-7; // support point membership
  int max_newton = 3000;
};

struct ScalarizationResult {
  Vector vertex;
  Vector x_opt;
  Vector z_opt;
  Vector y_support;
  double residual_norm = 0.0;
  /// Gradient of the l_p norm at z_opt; absent when the vertex lies in A.
  std::optional<Vector> cut_normal;
  int iterations = 0;
  double kkt_residual = 0.0;
  double wall_ms = 0.0;
  bool from_cache = false;
};

class SubproblemFailure : public std::runtime_error {
 public:
  SubproblemFailure(const std::string& msg, ScalarizationResult best)
      : std::runtime_error(msg), best_(std::move(best)) {}
  const ScalarizationResult& best_iterate() const { return best_; }

 private:
  ScalarizationResult best_;
};

/// The slice does not meet the upper image.
class InfeasibleSlice : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// min ||z||_p s.t. Gamma(x) - z - v <= 0, w_bar^T (v + z) <= gamma, x in X.
/// x_start (strictly feasible for X and the slice) overrides the default start.
ScalarizationResult solve_subproblem(const ProblemInstance& prob, const Vector& v,
                                     const NormExponent& ne, const SolverTolerances& tol = {},
                                     const std::optional<Vector>& x_start = std::nullopt);

/// Exact l_p projection of v onto {y : y >= lower, w_bar^T y <= gamma}:
/// returns the residual z = y - v. Requires w_bar^T lower < gamma.
Vector project_onto_orthant_slice(const Vector& v, const Vector& lower, const Vector& w_bar,
                                  double gamma, const NormExponent& ne);

/// Solved subproblems keyed by vertex coordinates rounded to 1e-9. Safe for
/// concurrent lookup and insert.
class SubproblemCache {
 public:
  std::optional<ScalarizationResult> find(const Vector& v) const;
  void insert(const Vector& v, const ScalarizationResult& r);
  size_t size() const;

 private:
  using Key = std::vector<long long>;
  static Key key_of(const Vector& v);

  mutable std::shared_mutex mu_;
  std::map<Key, ScalarizationResult> entries_;
};

class BatchSolveError : public std::runtime_error {
 public:
  BatchSolveError(const std::string& msg, size_t index, Vector vertex)
      : std::runtime_error(msg), index_(index), vertex_(std::move(vertex)) {}
  size_t index() const { return index_; }
  const Vector& vertex() const { return vertex_; }

 private:
  size_t index_;
  Vector vertex_;
};

/// Solves every vertex, reusing cached results (returned with iterations 0 and
/// from_cache set). Vertices are distributed over OpenMP threads.
std::vector<ScalarizationResult> solve_batch(const ProblemInstance& prob,
                                             const std::vector<Vector>& vertices,
                                             const NormExponent& ne, const SolverTolerances& tol,
                                             SubproblemCache& cache);

/// Single-threaded reference for solve_batch.
std::vector<ScalarizationResult> solve_batch_serial(const ProblemInstance& prob,
                                                    const std::vector<Vector>& vertices,
                                                    const NormExponent& ne,
                                                    const SolverTolerances& tol,
                                                    SubproblemCache& cache);

}  // namespace lpoa
