#include "lpoa/lp_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace lpoa {
namespace {

Vector gaussian(std::mt19937_64& rng, int q) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(q);
  for (int i = 0; i < q; ++i) v[i] = nd(rng);
  return v;
}

Vector unit_lp(std::mt19937_64& rng, int q, const NormExponent& ne) {
  for (;;) {
    Vector g = gaussian(rng, q);
    const double n = lp_norm(g, ne);
    if (n > 1e-6) return g / n;
  }
}

PropertyCheck start(const char* name, const NormExponent& ne, int q, int samples) {
  PropertyCheck c;
  c.name = name;
  c.p = ne.p();
  c.q = q;
  c.samples = samples;
  c.worst_margin = std::numeric_limits<double>::infinity();
  return c;
}

// margin = rhs - lhs of an inequality lhs <= rhs; tol is the allowed deficit.
void record(PropertyCheck& c, double margin, double tol) {
  c.worst_margin = std::min(c.worst_margin, margin);
  if (margin < -tol) ++c.violations;
}

}  // namespace

PropertyCheck check_dual_gradient_identity(const NormExponent& ne, int q, int samples,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto c = start("dual_gradient_identity", ne, q, samples);
  const NormExponent dual = ne.dual();
  std::uniform_real_distribution<double> scale(-6.0, 6.0);
  for (int s = 0; s < samples; ++s) {
    Vector z = gaussian(rng, q) * std::pow(10.0, scale(rng));
    const double n = lp_norm(lp_gradient(z, ne), dual);
    record(c, -std::fabs(n - 1.0), 1e-9);
  }
  return c;
}

PropertyCheck check_gradient_finite_differences(const NormExponent& ne, int q, int samples,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto c = start("gradient_finite_differences", ne, q, samples);
  for (int s = 0; s < samples; ++s) {
    Vector z(q);
    for (int i = 0; i < q; ++i) {
      do {
        z[i] = u(rng);
      } while (std::fabs(z[i]) <= 0.01);
    }
    const Vector g = lp_gradient(z, ne);
    for (int i = 0; i < q; ++i) {
      const double h = 1e-6 * std::max(1.0, std::fabs(z[i]));
      Vector zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const double fd = (lp_norm(zp, ne) - lp_norm(zm, ne)) / (2.0 * h);
      record(c, -std::fabs(fd - g[i]) / std::max(1.0, std::fabs(g[i])), 1e-6);
    }
  }
  return c;
}

PropertyCheck check_norm_equivalence(const NormExponent& ne, int q, int samples,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto c = start("norm_equivalence", ne, q, samples);
  const double n2p = norm_equivalence_constant(ne, q);
  for (int s = 0; s < samples; ++s) {
    const Vector x = gaussian(rng, q);
    record(c, n2p * lp_norm(x, ne) - x.norm(), 1e-12);
  }
  return c;
}

PropertyCheck check_smoothness_modulus(const NormExponent& ne, int q, int samples,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tau_d(1e-3, 1.0);
  auto c = start("smoothness_modulus", ne, q, samples);
  const auto mc = moduli_constants(ne);
  for (int s = 0; s < samples; ++s) {
    const Vector x = unit_lp(rng, q, ne);
    const Vector y = unit_lp(rng, q, ne);
    const double tau = tau_d(rng);
    const double lhs = 0.5 * (lp_norm(x + tau * y, ne) + lp_norm(x - tau * y, ne)) - 1.0;
    record(c, mc.S_p * std::pow(tau, ne.s_p()) - lhs, 1e-12);
  }
  return c;
}

PropertyCheck check_convexity_modulus(const NormExponent& ne, int q, int samples,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto c = start("convexity_modulus", ne, q, samples);
  const auto mc = moduli_constants(ne);
  for (int s = 0; s < samples; ++s) {
    const Vector x = unit_lp(rng, q, ne);
    const Vector y = unit_lp(rng, q, ne);
    const double eps = lp_norm(x - y, ne);
    const double lhs = 1.0 - lp_norm(0.5 * (x + y), ne);
    record(c, lhs - mc.K_p * std::pow(eps, ne.r_p()), 1e-12);
  }
  return c;
}

PropertyCheck check_hanner(const NormExponent& ne, int q, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto c = start("hanner", ne, q, samples);
  const double p = ne.p();
  for (int s = 0; s < samples; ++s) {
    const Vector x = gaussian(rng, q);
    const Vector y = gaussian(rng, q);
    const double nx = lp_norm(x, ne), ny = lp_norm(y, ne);
    const double lhs = std::pow(lp_norm(x + y, ne), p) + std::pow(lp_norm(x - y, ne), p);
    const double rhs = std::pow(nx + ny, p) + std::pow(std::fabs(nx - ny), p);
    const double scale = std::max(1.0, std::fabs(rhs));
    // p >= 2: lhs <= rhs; 1 < p <= 2: lhs >= rhs. Equality at p = 2.
    // x = e_1, y = e_2 at p = 4 gives lhs 4 against rhs 16.
    const double margin = p >= 2.0 ? rhs - lhs : lhs - rhs;
    record(c, margin / scale, 1e-12);
  }
  return c;
}

PropertyCheck check_strict_convexity(const NormExponent& ne, int q, int samples,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto c = start("strict_convexity", ne, q, samples);
  for (int s = 0; s < samples; ++s) {
    Vector x, y;
    do {
      x = unit_lp(rng, q, ne);
      y = unit_lp(rng, q, ne);
    } while (lp_norm(x - y, ne) < 0.05);
    const double mid = lp_norm(0.5 * (x + y), ne);
    c.worst_margin = std::min(c.worst_margin, 1.0 - mid);
    if (!(mid < 1.0)) ++c.violations;
  }
  return c;
}

PropertyCheck check_dual_ball_min(const NormExponent& ne, int q, int samples,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto c = start("dual_ball_min_euclidean", ne, q, samples);
  const NormExponent dual = ne.dual();
  // Ratio ||u||_2 / ||u||_{p*} is scale invariant; its minimum over u != 0
  // equals the minimum of ||w||_2 on the dual unit sphere.
  auto ratio = [&](const Vector& u) { return u.norm() / lp_norm(u, dual); };
  std::vector<std::pair<double, Vector>> starts;
  for (int s = 0; s < samples; ++s) {
    Vector u = gaussian(rng, q);
    starts.emplace_back(ratio(u), u);
  }
  std::sort(starts.begin(), starts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = starts.front().first;
  // Compass search from the best few samples.
  const int polish = std::min<int>(5, static_cast<int>(starts.size()));
  for (int s = 0; s < polish; ++s) {
    Vector u = starts[s].second / starts[s].second.norm();
    double f = ratio(u);
    double step = 0.25;
    while (step > 1e-12) {
      bool improved = false;
      for (int i = 0; i < q && !improved; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vector t = u;
          t[i] += sgn * step;
          if (t.norm() < 1e-9) continue;
          const double ft = ratio(t);
          if (ft < f) {
            u = t / t.norm();
            f = ft;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::min(best, f);
  }
  const double closed = dual_ball_min_euclidean(ne, q);
  c.worst_margin = -std::fabs(best - closed);
  if (std::fabs(best - closed) > 1e-6) c.violations = 1;
  return c;
}

std::vector<PropertyCheck> geometry_self_test(const std::vector<double>& p_values,
                                              const std::vector<int>& q_values, int samples,
                                              std::uint64_t seed) {
  std::vector<PropertyCheck> out;
  std::uint64_t s = seed;
  for (double p : p_values) {
    const NormExponent ne(p);
    for (int q : q_values) {
      out.push_back(check_dual_gradient_identity(ne, q, samples, ++s));
      out.push_back(check_gradient_finite_differences(ne, q, samples, ++s));
      out.push_back(check_norm_equivalence(ne, q, samples, ++s));
      out.push_back(check_smoothness_modulus(ne, q, samples, ++s));
      out.push_back(check_convexity_modulus(ne, q, samples, ++s));
      out.push_back(check_hanner(ne, q, samples, ++s));
      out.push_back(check_strict_convexity(ne, q, samples, ++s));
      out.push_back(check_dual_ball_min(ne, q, samples, ++s));
    }
  }
  return out;
}

}  // namespace lpoa
