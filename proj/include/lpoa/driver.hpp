#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpoa/polytope.hpp"
#include "lpoa/problems.hpp"
#include "lpoa/scalarization.hpp"

namespace lpoa {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct RunConfig {
  std::string problem_key;
  double p = 2.0;
  double epsilon = 1e-2;
  int max_iterations = 1000;
  SolverTolerances solver;
  PolytopeTolerances polytope;
  std::uint64_t seed = kDefaultSeed;
  /// Keep every solved (support point, normal) pair, not only the cuts.
  bool record_pairs = false;

  void validate() const;
};

class ConfigurationError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct IterationRecord {
  int k = 0;
  Vector farthest_vertex;
  double residual_norm = 0.0;  // Hausdorff distance between P_k and A
  Vector support_point;
  /// Normal of the supporting halfspace {y : <w, y> >= <w, support_point>}.
  Vector cut_normal;
  Vector x_opt;
  /// False only for a final record that met the tolerance.
  bool cut_applied = true;
  int vertex_count = 0;
  int new_vertex_count = 0;
  int removed_vertex_count = 0;
  int cache_hits = 0;
  double wall_ms = 0.0;
};

/// A solved support point and its normal; `level` is the Hausdorff error of
/// the iteration that produced it.
struct SupportRecord {
  int iteration = 0;
  Vector y;
  Vector w;
  double level = 0.0;
};

enum class Termination { Converged, MaxIterations, SolverFailure };
std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct RunTrace {
  RunConfig config;
  int initial_halfspace_count = 0;
  std::vector<Halfspace> initial_halfspaces;
  std::vector<IterationRecord> iterations;
  std::optional<Polytope> final_polytope;
  Termination termination = Termination::MaxIterations;
  std::string termination_message;
  std::vector<SupportRecord> support_pairs;
  double total_ms = 0.0;
  int threads = 1;

  int cuts_applied() const;
  /// Support points and normals of every applied cut, in order.
  std::vector<SupportRecord> cut_records() const;
};

struct InitialPolytope {
  Polytope polytope;
  std::vector<Halfspace> halfspaces;
};

/// P_0 from the coordinate weighted sums {y_i >= offset_i} and the slice.
InitialPolytope initialize(const ProblemInstance& prob, const PolytopeTolerances& tol = {});

RunTrace run(const RunConfig& config);
RunTrace run(const ProblemInstance& prob, const RunConfig& config);

std::vector<double> hausdorff_series(const RunTrace& trace);

}  // namespace lpoa
