#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lpoa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Raised by lp_gradient for (numerically) zero arguments. The caller decides
/// what a zero residual means; the norm has no gradient there.
class GradientUndefined : public std::domain_error {
 public:
  explicit GradientUndefined(const std::string& msg) : std::domain_error(msg) {}
};

/// Norm exponent p in (1, inf) together with the quantities derived from it.
class NormExponent {
 public:
  explicit NormExponent(double p);

  double p() const { return p_; }
  /// Conjugate exponent p / (p - 1).
  double p_star() const { return p_star_; }
  /// Power type of the modulus of smoothness, min(p, 2).
  double s_p() const { return s_p_; }
  /// Power type of the modulus of convexity, max(p, 2).
  double r_p() const { return r_p_; }

  NormExponent dual() const { return NormExponent(p_star_); }

 private:
  double p_;
  double p_star_;
  double s_p_;
  double r_p_;
};

/// Constants of the hyperplane-distance and separation bounds for a given
/// (p, q) pair. eta is the deviation parameter alpha = y - eta * w.
struct LemmaConstants {
  NormExponent ne;
  int q;
  double N2p;   // ||x||_2 <= N2p * ||x||_p
  double C_pq;  // N2p^2 / 2
  double c_pq;  // min of ||w||_2 over the dual unit sphere
  double C2;    // sqrt(2) * c_pq / N2p
  double C3;    // sqrt(2) / N2p
  double eta;
};

struct ModuliConstants {
  double S_p;  // rho_p(tau) <= S_p tau^{s(p)}
  double K_p;  // delta_p(eps) >= K_p eps^{r(p)}
};

/// |x|^e with the x == 0 branch returning 0 (e > 0 assumed).
double abs_pow(double x, double e);

double lp_norm(const Vector& z, const NormExponent& ne);

/// Gradient of ||.||_p at z; lies on the unit sphere of the dual norm.
/// Throws GradientUndefined when ||z||_p < kGradientZeroThreshold.
Vector lp_gradient(const Vector& z, const NormExponent& ne);

inline constexpr double kGradientZeroThreshold = 1e-14;

double norm_equivalence_constant(const NormExponent& ne, int q);
double dual_ball_min_euclidean(const NormExponent& ne, int q);
ModuliConstants moduli_constants(const NormExponent& ne);
LemmaConstants make_lemma_constants(const NormExponent& ne, int q, double eta);

}  // namespace lpoa
