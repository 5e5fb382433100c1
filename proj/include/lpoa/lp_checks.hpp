#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpoa/lp_geometry.hpp"

namespace lpoa {

/// Outcome of one sampled geometric property check.
struct PropertyCheck {
  std::string name;
  double p = 0.0;
  int q = 0;
  int samples = 0;
  int violations = 0;
  double worst_margin = 0.0;  // most negative (rhs - lhs) seen; >= -tol on success
};

inline constexpr int kDefaultPropertySamples = 1000;

// Each check draws `samples` random instances from a generator seeded with
// `seed` and compares against the closed-form statement at the given tolerance.
PropertyCheck check_dual_gradient_identity(const NormExponent& ne, int q, int samples,
                                           std::uint64_t seed);
PropertyCheck check_gradient_finite_differences(const NormExponent& ne, int q, int samples,
                                                std::uint64_t seed);
PropertyCheck check_norm_equivalence(const NormExponent& ne, int q, int samples,
                                     std::uint64_t seed);
PropertyCheck check_smoothness_modulus(const NormExponent& ne, int q, int samples,
                                       std::uint64_t seed);
PropertyCheck check_convexity_modulus(const NormExponent& ne, int q, int samples,
                                      std::uint64_t seed);
PropertyCheck check_hanner(const NormExponent& ne, int q, int samples, std::uint64_t seed);
PropertyCheck check_strict_convexity(const NormExponent& ne, int q, int samples,
                                     std::uint64_t seed);
/// Random-search minimum of ||w||_2 over the dual unit sphere compared with
/// dual_ball_min_euclidean (tolerance 1e-6 on the closed form).
PropertyCheck check_dual_ball_min(const NormExponent& ne, int q, int samples,
                                  std::uint64_t seed);

/// All of the above for every (p, q) combination given.
std::vector<PropertyCheck> geometry_self_test(const std::vector<double>& p_values,
                                              const std::vector<int>& q_values, int samples,
                                              std::uint64_t seed);

}  // namespace lpoa
