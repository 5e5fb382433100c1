#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lpoa/lp_geometry.hpp"

namespace lpoa {

/// The closed halfspace {y : <normal, y> <= offset}. The normal is stored
/// exactly as given (not normalized).
struct Halfspace {
  Vector normal;
  double offset = 0.0;

  double slack(const Vector& y) const { return normal.dot(y) - offset; }
};

struct PolytopeTolerances {
  /// Activity / feasibility tolerance, relative to ||normal||_2 * max(1, ||y||_inf).
  double feasibility = 1e-9;
  /// Vertices closer than this in l_inf (relative to max(1, ||y||_inf)) are merged.
  double merge = 1e-8;
  /// Half-width of the bounding box used by batch construction.
  double bounding_box = 1e6;
};

class InfeasiblePolytope : public std::runtime_error {
 public:
  InfeasiblePolytope(const std::string& msg, Vector certificate)
      : std::runtime_error(msg), certificate_(std::move(certificate)) {}
  /// Normal of the halfspace that emptied the intersection.
  const Vector& certificate() const { return certificate_; }

 private:
  Vector certificate_;
};

class UnboundedPolytope : public std::runtime_error {
 public:
  UnboundedPolytope(const std::string& msg, Vector direction)
      : std::runtime_error(msg), direction_(std::move(direction)) {}
  /// Recession direction d with <n_j, d> <= 0 for every halfspace (approximately).
  const Vector& direction() const { return direction_; }

 private:
  Vector direction_;
};

struct CutResult;

/// Bounded polytope held simultaneously as a halfspace list and a vertex list
/// with per-vertex incidence (indices of the halfspaces active at the vertex).
/// Values are immutable; cut() produces a new polytope.
class Polytope {
 public:
  static Polytope from_halfspaces(const std::vector<Halfspace>& hs,
                                  const PolytopeTolerances& tol = {});

  /// Intersection with h. When no vertex violates h the polytope is returned
  /// unchanged and the result is flagged as a null cut.
  CutResult cut(const Halfspace& h) const;

  int dimension() const { return q_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  /// Extreme points in lexicographic order.
  const std::vector<Vector>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& incidence() const { return incidence_; }
  const PolytopeTolerances& tolerances() const { return tol_; }

  /// Volume for q = 2 (area) and q = 3; throws for other dimensions.
  double volume() const;

  /// Consistency report: empty when every structural invariant holds.
  std::vector<std::string> validate() const;

  bool contains(const Vector& y, double rel_tol = 1e-9) const;

 private:
  Polytope() = default;

  static Polytope box(int q, double half_width, const PolytopeTolerances& tol);
  // Clips against h (appended at index halfspaces_.size()). Returns false for
  // a null cut, in which case *this is left unchanged unless record_null is set.
  bool clip(const Halfspace& h, bool record_null, int* removed, int* created);
  double activity_tol(int j, const Vector& y) const;
  void sort_lexicographic();

  int q_ = 0;
  PolytopeTolerances tol_;
  std::vector<Halfspace> halfspaces_;
  std::vector<Vector> vertices_;
  std::vector<std::vector<int>> incidence_;
};

struct CutResult {
  Polytope polytope;
  bool null_cut = false;
  int removed_vertices = 0;
  int new_vertices = 0;
};

/// Lexicographic comparison on coordinates.
bool lex_less(const Vector& a, const Vector& b);

}  // namespace lpoa
