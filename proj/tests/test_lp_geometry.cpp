#include <doctest.h>

#include <cmath>
#include <random>

#include "lpoa/lp_checks.hpp"
#include "lpoa/lp_geometry.hpp"

using namespace lpoa;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Plain power sum, kept separate from the scaled implementation.
double naive_norm(const Vector& z, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += std::pow(std::fabs(z[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

TEST_CASE("norm exponent derived quantities") {
  const NormExponent a(3.0);
  CHECK(a.p_star() == doctest::Approx(1.5));
  CHECK(a.s_p() == 2.0);
  CHECK(a.r_p() == 3.0);
  const NormExponent b(1.5);
  CHECK(b.p_star() == doctest::Approx(3.0));
  CHECK(b.s_p() == 1.5);
  CHECK(b.r_p() == 2.0);
  CHECK(NormExponent(4.0).dual().p() == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(NormExponent{1.0}, InvalidInput);
  CHECK_THROWS_AS(NormExponent{0.5}, InvalidInput);
  CHECK_THROWS_AS(NormExponent{INFINITY}, InvalidInput);
  CHECK_THROWS_AS(NormExponent{NAN}, InvalidInput);
}

TEST_CASE("lp norm values") {
  CHECK(lp_norm(vec({3, 4}), NormExponent(2)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(lp_norm(vec({1, 1, 1}), NormExponent(3)) == doctest::Approx(std::cbrt(3.0)).epsilon(1e-15));
  CHECK(lp_norm(vec({1, -2, 2}), NormExponent(4)) ==
        doctest::Approx(std::pow(33.0, 0.25)).epsilon(1e-15));
  CHECK(lp_norm(Vector::Zero(3), NormExponent(2)) == 0.0);
  // Scaling keeps huge and tiny entries finite.
  CHECK(lp_norm(vec({1e200, 1e200}), NormExponent(2)) ==
        doctest::Approx(std::sqrt(2.0) * 1e200).epsilon(1e-14));
  CHECK(lp_norm(vec({1e-200, 0}), NormExponent(8)) == doctest::Approx(1e-200).epsilon(1e-14));
  CHECK_THROWS_AS(lp_norm(vec({1, NAN}), NormExponent(2)), InvalidInput);
  CHECK_THROWS_AS(lp_norm(vec({INFINITY, 0}), NormExponent(2)), InvalidInput);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (double p : {1.25, 1.5, 2.0, 3.0, 8.0}) {
    for (int t = 0; t < 50; ++t) {
      Vector z(4);
      for (int i = 0; i < 4; ++i) z[i] = g(rng);
      CHECK(lp_norm(z, NormExponent(p)) == doctest::Approx(naive_norm(z, p)).epsilon(1e-13));
    }
  }
}

TEST_CASE("lp gradient values") {
  const Vector g2 = lp_gradient(vec({1, 1}), NormExponent(2));
  CHECK(g2[0] == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(g2[1] == doctest::Approx(1 / std::sqrt(2.0)));
  for (double p : {1.25, 2.0, 5.0}) {
    const Vector g = lp_gradient(vec({0, 0.3}), NormExponent(p));
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(1.0));
  }
  const Vector g3 = lp_gradient(vec({1, 2}), NormExponent(3));
  const double scale = std::pow(9.0, 2.0 / 3.0);
  CHECK(g3[0] == doctest::Approx(1.0 / scale).epsilon(1e-14));
  CHECK(g3[1] == doctest::Approx(4.0 / scale).epsilon(1e-14));
  CHECK(lp_norm(g3, NormExponent(1.5)) == doctest::Approx(1.0).epsilon(1e-14));
  // Signs follow the argument.
  const Vector gs = lp_gradient(vec({-1, 2}), NormExponent(3));
  CHECK(gs[0] < 0.0);
  CHECK(gs[1] > 0.0);

  CHECK_THROWS_AS(lp_gradient(Vector::Zero(2), NormExponent(2)), GradientUndefined);
  CHECK_THROWS_AS(lp_gradient(vec({1e-15, 0}), NormExponent(2)), GradientUndefined);
}

TEST_CASE("constants against closed forms and random search") {
  CHECK(norm_equivalence_constant(NormExponent(1.5), 3) == 1.0);
  CHECK(norm_equivalence_constant(NormExponent(2.0), 5) == 1.0);
  CHECK(norm_equivalence_constant(NormExponent(4.0), 3) == doctest::Approx(std::pow(3.0, 0.25)));
  CHECK(dual_ball_min_euclidean(NormExponent(2.0), 7) == 1.0);
  CHECK(dual_ball_min_euclidean(NormExponent(4.0), 3) == doctest::Approx(std::pow(3.0, -0.25)));
  CHECK(dual_ball_min_euclidean(NormExponent(1.25), 2) == 1.0);

  const auto m2 = moduli_constants(NormExponent(2.0));
  CHECK(m2.S_p == doctest::Approx(0.5));
  CHECK(m2.K_p == doctest::Approx(1.0 / 8.0));
  const auto m15 = moduli_constants(NormExponent(1.5));
  CHECK(m15.S_p == doctest::Approx(2.0 / 3.0));
  CHECK(m15.K_p == doctest::Approx(1.0 / 16.0));
  const auto m4 = moduli_constants(NormExponent(4.0));
  CHECK(m4.S_p == doctest::Approx(1.5));
  CHECK(m4.K_p == doctest::Approx(1.0 / 64.0));

  // Independent oracle: sup ||x||_2 / ||x||_p over random directions, and
  // the minimum Euclidean length on the dual unit sphere.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (double p : {1.25, 1.5, 2.0, 3.0, 4.0, 8.0}) {
    for (int q : {2, 3}) {
      const NormExponent ne(p);
      double ratio = 0.0, dual_min = INFINITY;
      for (int t = 0; t < 20000; ++t) {
        Vector x(q);
        for (int i = 0; i < q; ++i) x[i] = g(rng);
        ratio = std::max(ratio, x.norm() / naive_norm(x, p));
        dual_min = std::min(dual_min, x.norm() / naive_norm(x, ne.p_star()));
      }
      // Extremes sit at coordinate and diagonal directions.
      const Vector ones = Vector::Ones(q), e0 = Vector::Unit(q, 0);
      for (const Vector& x : {ones, e0}) {
        ratio = std::max(ratio, x.norm() / naive_norm(x, p));
        dual_min = std::min(dual_min, x.norm() / naive_norm(x, ne.p_star()));
      }
      const auto lc = make_lemma_constants(ne, q, 0.1);
      CHECK(lc.N2p == doctest::Approx(ratio).epsilon(1e-9));
      CHECK(lc.c_pq == doctest::Approx(dual_min).epsilon(1e-9));
      CHECK(lc.C_pq == doctest::Approx(ratio * ratio / 2.0));
      CHECK(lc.C3 == doctest::Approx(std::sqrt(2.0) / ratio));
      CHECK(lc.C2 == doctest::Approx(std::sqrt(2.0) * dual_min / ratio));
    }
  }
  CHECK_THROWS_AS(make_lemma_constants(NormExponent(2.0), 1, 0.1), InvalidInput);
  CHECK_THROWS_AS(make_lemma_constants(NormExponent(2.0), 2, 0.0), InvalidInput);
}

TEST_CASE("sampled geometry properties hold") {
  const auto checks = geometry_self_test({1.25, 1.5, 2.0, 3.0, 4.0, 8.0}, {2, 3, 4}, 500, 42);
  CHECK(checks.size() == 6 * 3 * 8);
  for (const auto& c : checks) {
    INFO(c.name << " p=" << c.p << " q=" << c.q << " worst=" << c.worst_margin);
    CHECK(c.violations == 0);
    CHECK(c.samples > 0);
  }
}

TEST_CASE("gradient is the dual-norm-one maximizer of <w, z>") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (double p : {1.25, 2.0, 3.0, 8.0}) {
    const NormExponent ne(p);
    for (int t = 0; t < 200; ++t) {
      Vector z(3);
      for (int i = 0; i < 3; ++i) z[i] = g(rng);
      const Vector w = lp_gradient(z, ne);
      CHECK(lp_norm(w, ne.dual()) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(w.dot(z) == doctest::Approx(lp_norm(z, ne)).epsilon(1e-12));
      // Hoelder: any other dual-unit vector does no better.
      Vector u(3);
      for (int i = 0; i < 3; ++i) u[i] = g(rng);
      u /= lp_norm(u, ne.dual());
      CHECK(u.dot(z) <= lp_norm(z, ne) + 1e-12);
    }
  }
}
