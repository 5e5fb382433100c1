#include "lpoa/lp_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace lpoa {

NormExponent::NormExponent(double p) : p_(p) {
  if (!std::isfinite(p) || p <= 1.0) {
    throw InvalidInput("norm exponent must be a finite real > 1, got " + std::to_string(p));
  }
  p_star_ = p / (p - 1.0);
  s_p_ = std::min(p, 2.0);
  r_p_ = std::max(p, 2.0);
}

double abs_pow(double x, double e) {
  if (x == 0.0) return 0.0;
  return std::exp(e * std::log(std::fabs(x)));
}

namespace {

double max_abs_checked(const Vector& z) {
  if (z.size() == 0) throw InvalidInput("lp_norm of an empty vector");
  double m = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) throw InvalidInput("lp_norm: non-finite entry");
    m = std::max(m, std::fabs(z[i]));
  }
  return m;
}

}  // namespace

double lp_norm(const Vector& z, const NormExponent& ne) {
  const double m = max_abs_checked(z);
  if (m == 0.0) return 0.0;
  // Scaling by the largest entry keeps sum |z_i / m|^p in [1, q].
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += abs_pow(z[i] / m, ne.p());
  return m * std::exp(std::log(s) / ne.p());
}

Vector lp_gradient(const Vector& z, const NormExponent& ne) {
  const double nz = lp_norm(z, ne);
  if (nz < kGradientZeroThreshold) {
    throw GradientUndefined("lp_gradient: ||z||_p below threshold, gradient undefined");
  }
  Vector g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double mag = abs_pow(z[i] / nz, ne.p() - 1.0);
    g[i] = z[i] < 0.0 ? -mag : mag;
  }
  return g;
}

double norm_equivalence_constant(const NormExponent& ne, int q) {
  if (ne.p() <= 2.0) return 1.0;
  return std::pow(static_cast<double>(q), 0.5 - 1.0 / ne.p());
}

double dual_ball_min_euclidean(const NormExponent& ne, int q) {
  if (q < 1) throw InvalidInput("dimension must be positive");
  return std::min(1.0, std::pow(static_cast<double>(q), 0.5 - 1.0 / ne.p_star()));
}

ModuliConstants moduli_constants(const NormExponent& ne) {
  const double p = ne.p();
  if (p <= 2.0) return {1.0 / p, (p - 1.0) / 8.0};
  return {(p - 1.0) / 2.0, 1.0 / (p * std::pow(2.0, p))};
}

LemmaConstants make_lemma_constants(const NormExponent& ne, int q, double eta) {
  if (q < 2) throw InvalidInput("lemma constants need q >= 2");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidInput("eta must be positive");
  const double n2p = norm_equivalence_constant(ne, q);
  const double cpq = dual_ball_min_euclidean(ne, q);
  return LemmaConstants{ne,
                        q,
                        n2p,
                        n2p * n2p / 2.0,
                        cpq,
                        std::sqrt(2.0) * cpq / n2p,
                        std::sqrt(2.0) / n2p,
                        eta};
}

}  // namespace lpoa
