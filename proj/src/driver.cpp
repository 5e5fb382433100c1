#include "lpoa/driver.hpp"

#include <chrono>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lpoa {

void RunConfig::validate() const {
  NormExponent ne(p);
  if (!(epsilon > solver.zero) || !std::isfinite(epsilon)) {
    throw ConfigurationError("epsilon must be finite and exceed the zero-residual threshold");
  }
  if (max_iterations < 1) throw ConfigurationError("max_iterations must be at least 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIterations:
      return "max_iterations";
    case Termination::SolverFailure:
      return "solver_failure";
  }
  return "unknown";
}

Termination termination_from_string(const std::string& s) {
  if (s == "converged") return Termination::Converged;
  if (s == "max_iterations") return Termination::MaxIterations;
  if (s == "solver_failure") return Termination::SolverFailure;
  throw InvalidInput("unknown termination status: " + s);
}

int RunTrace::cuts_applied() const {
  int n = 0;
  for (const auto& it : iterations) n += it.cut_applied ? 1 : 0;
  return n;
}

std::vector<SupportRecord> RunTrace::cut_records() const {
  std::vector<SupportRecord> out;
  for (const auto& it : iterations) {
    if (it.cut_applied) out.push_back({it.k, it.support_point, it.cut_normal, it.residual_norm});
  }
  return out;
}

InitialPolytope initialize(const ProblemInstance& prob, const PolytopeTolerances& tol) {
  std::vector<Halfspace> hs;
  for (int i = 0; i < prob.q; ++i) hs.push_back({-Vector::Unit(prob.q, i), -prob.lower_offsets[i]});
  hs.push_back({prob.w_bar, prob.gamma_slice});
  try {
    return {Polytope::from_halfspaces(hs, tol), hs};
  } catch (const UnboundedPolytope& e) {
    throw ConfigurationError(std::string("initial polytope is unbounded: ") + e.what());
  }
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Largest residual; near-ties go to the first vertex in lexicographic order.
size_t farthest_index(const std::vector<ScalarizationResult>& results) {
  double best = -1.0;
  for (const auto& r : results) best = std::max(best, r.residual_norm);
  const double cutoff = best - 1e-12 * std::max(1.0, best);
  for (size_t i = 0; i < results.size(); ++i) {
    if (results[i].residual_norm >= cutoff) return i;
  }
  return 0;
}

}  // namespace

RunTrace run(const RunConfig& config) { return run(make_problem(config.problem_key), config); }

RunTrace run(const ProblemInstance& prob, const RunConfig& config) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const NormExponent ne(config.p);
  RunTrace trace;
  trace.config = config;
#ifdef _OPENMP
  trace.threads = omp_get_max_threads();
#endif
  auto init = initialize(prob, config.polytope);
  trace.initial_halfspaces = init.halfspaces;
  trace.initial_halfspace_count = static_cast<int>(init.halfspaces.size());
  Polytope poly = std::move(init.polytope);
  SubproblemCache cache;

  for (int k = 0;; ++k) {
    if (k >= config.max_iterations) {
      trace.termination = Termination::MaxIterations;
      break;
    }
    const auto t_iter = std::chrono::steady_clock::now();
    const auto& verts = poly.vertices();
    std::vector<ScalarizationResult> results;
    try {
      results = solve_batch(prob, verts, ne, config.solver, cache);
    } catch (const std::exception& e) {
      trace.termination = Termination::SolverFailure;
      trace.termination_message = e.what();
      break;
    }
    IterationRecord rec;
    rec.k = k;
    rec.vertex_count = static_cast<int>(verts.size());
    for (const auto& r : results) {
      rec.cache_hits += r.from_cache ? 1 : 0;
      if (config.record_pairs && !r.from_cache && r.cut_normal) {
        trace.support_pairs.push_back({k, r.y_support, *r.cut_normal, r.residual_norm});
      }
    }
    const auto& best = results[farthest_index(results)];
    rec.farthest_vertex = best.vertex;
    rec.residual_norm = best.residual_norm;
    rec.support_point = best.y_support;
    rec.x_opt = best.x_opt;
    if (best.cut_normal) rec.cut_normal = *best.cut_normal;

    if (best.residual_norm <= config.epsilon) {
      rec.cut_applied = false;
      rec.wall_ms = ms_since(t_iter);
      trace.iterations.push_back(std::move(rec));
      trace.termination = Termination::Converged;
      break;
    }
    const Halfspace cut{-rec.cut_normal, -rec.cut_normal.dot(rec.support_point)};
    CutResult cr = poly.cut(cut);
    if (cr.null_cut) {
      rec.cut_applied = false;
      rec.wall_ms = ms_since(t_iter);
      trace.iterations.push_back(std::move(rec));
      trace.termination = Termination::SolverFailure;
      trace.termination_message =
          "cut at iteration " + std::to_string(k) + " removes no vertex";
      break;
    }
    rec.new_vertex_count = cr.new_vertices;
    rec.removed_vertex_count = cr.removed_vertices;
    poly = std::move(cr.polytope);
    rec.wall_ms = ms_since(t_iter);
    trace.iterations.push_back(std::move(rec));
  }
  trace.final_polytope = std::move(poly);
  trace.total_ms = ms_since(t_start);
  return trace;
}

std::vector<double> hausdorff_series(const RunTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.iterations.size());
  for (const auto& it : trace.iterations) out.push_back(it.residual_norm);
  return out;
}

}  // namespace lpoa
