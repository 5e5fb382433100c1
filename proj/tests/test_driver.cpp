#include <doctest.h>

#include <cmath>
#include <random>

#include "lpoa/analysis.hpp"
#include "lpoa/driver.hpp"

using namespace lpoa;

namespace {

RunConfig config(const std::string& key, double p, double eps) {
  RunConfig c;
  c.problem_key = key;
  c.p = p;
  c.epsilon = eps;
  return c;
}

// Frontier points of example1 (q = 2 or 3) that lie in the slice.
std::vector<Vector> slice_frontier(const ProblemInstance& prob, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Vector> out;
  while (static_cast<int>(out.size()) < count) {
    Vector d(prob.q);
    for (int i = 0; i < prob.q; ++i) d[i] = std::fabs(g(rng));
    const Vector y = Vector::Ones(prob.q) - d / d.norm();
    if (prob.w_bar.dot(y) <= prob.gamma_slice) out.push_back(y);
  }
  return out;
}

}  // namespace

TEST_CASE("initial polytope") {
  const auto i2 = initialize(example1(2));
  CHECK(i2.halfspaces.size() == 3);
  CHECK(i2.polytope.vertices().size() == 3);
  const auto i3 = initialize(example1(3));
  CHECK(i3.halfspaces.size() == 4);
  CHECK(i3.polytope.vertices().size() == 4);
  const auto ie = initialize(example2());
  CHECK(ie.halfspaces.size() == 4);
  CHECK(ie.polytope.vertices().size() == 4);
  // The slice of example1 q=2 is y1 + y2 <= 1 over the orthant.
  CHECK(i2.polytope.volume() == doctest::Approx(0.5));

  std::mt19937_64 rng(1);
  for (const char* key : {"example1-q2", "example1-q3"}) {
    const auto prob = make_problem(key);
    const auto init = initialize(prob);
    for (const auto& y : slice_frontier(prob, 500, rng)) CHECK(init.polytope.contains(y));
  }
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(run(config("example1-q2", 2.0, 0.0)), ConfigurationError);
  CHECK_THROWS_AS(run(config("example1-q2", 2.0, -1.0)), ConfigurationError);
  CHECK_THROWS_AS(run(config("example1-q2", 1.0, 0.1)), InvalidInput);
  CHECK_THROWS_AS(run(config("nowhere", 2.0, 0.1)), UnknownProblem);
  auto c = config("example1-q2", 2.0, 0.1);
  c.max_iterations = 0;
  CHECK_THROWS_AS(run(c), ConfigurationError);
}

TEST_CASE("termination modes") {
  SUBCASE("tolerance above the initial error") {
    const auto t = run(config("example1-q2", 2.0, 10.0));
    CHECK(t.termination == Termination::Converged);
    CHECK(t.iterations.size() == 1);
    CHECK(t.cuts_applied() == 0);
    CHECK(t.iterations[0].residual_norm == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-8));
  }
  SUBCASE("coarse tolerance") {
    const auto t = run(config("example1-q2", 2.0, 0.5));
    CHECK(t.termination == Termination::Converged);
    CHECK(t.iterations.size() <= 5);
  }
  SUBCASE("iteration limit") {
    auto c = config("example1-q2", 2.0, 1e-6);
    c.max_iterations = 3;
    const auto t = run(c);
    CHECK(t.termination == Termination::MaxIterations);
    CHECK(t.iterations.size() == 3);
    CHECK(t.cuts_applied() == 3);
  }
  SUBCASE("solver failure keeps the partial trace") {
    auto c = config("example1-q2", 2.0, 1e-3);
    c.solver.max_newton = 3;
    const auto t = run(c);
    CHECK(t.termination == Termination::SolverFailure);
    CHECK_FALSE(t.termination_message.empty());
    CHECK(t.final_polytope.has_value());
  }
  CHECK(termination_from_string(to_string(Termination::MaxIterations)) ==
        Termination::MaxIterations);
  CHECK_THROWS_AS(termination_from_string("done"), InvalidInput);
}

TEST_CASE("golden iteration counts") {
  // Recorded from the first oracle-checked build.
  CHECK(run(config("example1-q2", 2.0, 0.5)).iterations.size() == 1);
  CHECK(run(config("example1-q2", 2.0, 0.01)).iterations.size() == 8);
  CHECK(run(config("example1-q3", 2.0, 0.01)).iterations.size() == 86);
}

TEST_CASE("trace invariants across problems and norms") {
  std::mt19937_64 rng(9);
  for (const auto& key : problem_keys()) {
    const auto prob = make_problem(key);
    const double eps = prob.q == 2 ? 1e-3 : 0.05;
    for (double p : {1.25, 2.0, 8.0}) {
      auto c = config(key, p, eps);
      c.record_pairs = true;
      const auto t = run(prob, c);
      INFO(key << " p=" << p);
      REQUIRE(t.termination == Termination::Converged);
      CHECK(t.initial_halfspace_count == prob.q + 1);
      const auto series = hausdorff_series(t);
      CHECK(series.back() <= eps);
      int rises = 0;
      for (size_t k = 1; k < series.size(); ++k) rises += series[k] > series[k - 1] + 1e-6;
      CHECK(rises <= 0.05 * static_cast<double>(series.size()));
      for (const auto& it : t.iterations) {
        CHECK(it.residual_norm >= 0.0);
        if (!it.cut_applied) continue;
        CHECK(lp_norm(it.cut_normal, NormExponent(p).dual()) == doctest::Approx(1.0).epsilon(1e-6));
        // The cut {<w, y> >= <w, y_support>} removes the farthest vertex.
        CHECK(it.cut_normal.dot(it.farthest_vertex - it.support_point) < 0.0);
        CHECK(it.removed_vertex_count >= 1);
      }
      CHECK(t.cut_records().size() == static_cast<size_t>(t.cuts_applied()));
      CHECK(t.support_pairs.size() >= t.cut_records().size());
      CHECK(verify_cut_accounting(t).passed());
      REQUIRE(t.final_polytope.has_value());
      CHECK(t.final_polytope->validate().empty());
      if (prob.kind == ProblemKind::Example1) {
        for (const auto& y : slice_frontier(prob, 500, rng)) CHECK(t.final_polytope->contains(y, 1e-7));
      }
    }
  }
}

TEST_CASE("hausdorff series") {
  RunTrace t;
  CHECK(hausdorff_series(t).empty());
  for (double r : {0.9, 0.4, 0.2}) {
    IterationRecord rec;
    rec.residual_norm = r;
    t.iterations.push_back(rec);
  }
  CHECK(hausdorff_series(t) == std::vector<double>{0.9, 0.4, 0.2});
}

TEST_CASE("runs are deterministic") {
  const auto a = run(config("example1-q3", 1.5, 0.05));
  const auto b = run(config("example1-q3", 1.5, 0.05));
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (size_t k = 0; k < a.iterations.size(); ++k) {
    CHECK(a.iterations[k].farthest_vertex == b.iterations[k].farthest_vertex);
    CHECK(a.iterations[k].cut_normal == b.iterations[k].cut_normal);
    CHECK(a.iterations[k].residual_norm == b.iterations[k].residual_norm);
  }
}
