#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpoa/driver.hpp"
#include "lpoa/lp_geometry.hpp"

namespace lpoa {

/// Running minimum of the prefix.
std::vector<double> monotone_envelope(const std::vector<double>& series);

struct RateFit {
  double c_hat = 0.0;
  double lambda_hat = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  int k_min = 0;
  int k_max = 0;
  bool reliable = false;
};

/// Least squares of log(series[k]) against log(k) over the window: the first
/// max(3, ceil(0.08 K)) entries are skipped, as are entries <= 2 epsilon
/// (1.2 epsilon if that leaves fewer than five points). c_hat = -slope (q - 1).
RateFit fit_rate(const std::vector<double>& series, int q, double epsilon);

/// Support points y_i, y_j with normals w_i, w_j, deviation vectors
/// alpha = y - eta w and hyperplane distances d_ij = <w_j, y_i - y_j>,
/// d_ji = <w_i, y_j - y_i>. level is the Hausdorff error of the later record.
struct DeviationPair {
  int i = 0;
  int j = 0;
  Vector y_i, y_j, w_i, w_j;
  Vector alpha_i, alpha_j;
  double d_ij = 0.0;
  double d_ji = 0.0;
  double level = 0.0;
};

inline constexpr size_t kMaxPairs = 200000;
inline constexpr double kLemmaTolerance = 1e-6;

/// All unordered pairs i < j of the records (a seeded random subset when
/// there are more than max_pairs).
std::vector<DeviationPair> build_deviation_pairs(const std::vector<SupportRecord>& records,
                                                 double eta, size_t max_pairs = kMaxPairs,
                                                 std::uint64_t seed = kDefaultSeed);

struct LemmaReport {
  std::string name;
  long checked = 0;
  long violations = 0;
  double worst_margin = 0.0;  // smallest (rhs - lhs) over the checked inequalities
  double max_ratio = 0.0;     // largest lhs / rhs where rhs > 0
  bool passed() const { return violations == 0; }
};

enum class Execution { Parallel, Serial };

/// d_ij >= 0 and d_ji >= 0 for every pair.
LemmaReport verify_support_conditions(const std::vector<DeviationPair>& pairs,
                                      Execution ex = Execution::Parallel);

/// d <= C_pq ||alpha_i - alpha_j||_p^2 / eta in both orientations.
LemmaReport verify_hyperplane_lemma(const std::vector<DeviationPair>& pairs,
                                    const LemmaConstants& lc,
                                    Execution ex = Execution::Parallel);

/// Separation of deviation vectors: C_3 sqrt(eta h) when d_ij >= h (with h the
/// pair's level), C_3 sqrt(eta d) for the larger of d_ij, d_ji, and C_2 eta
/// when <w_i, w_j> <= 0.
LemmaReport verify_separation(const std::vector<DeviationPair>& pairs, const LemmaConstants& lc,
                              Execution ex = Execution::Parallel);

/// Same with one fixed level h for every pair.
LemmaReport verify_separation(const std::vector<DeviationPair>& pairs, const LemmaConstants& lc,
                              double h, Execution ex = Execution::Parallel);

/// Size of a greedily built eps_sep-separated subset of the deviation vectors.
int packing_census(const std::vector<SupportRecord>& records, const LemmaConstants& lc,
                   double eps_sep);

struct TraceVerification {
  LemmaReport support;
  LemmaReport hyperplane;
  LemmaReport separation;
  LemmaReport dual_norm;  // | ||w||_{p*} - 1 | <= 1e-6 for every cut normal
  LemmaReport cut_accounting;
  size_t pairs = 0;
  bool passed() const {
    return support.passed() && hyperplane.passed() && separation.passed() && dual_norm.passed() &&
           cut_accounting.passed();
  }
};

/// Distinct cut normals equal initial halfspaces + cuts, and each cut
/// strictly separates the farthest vertex of its iteration.
LemmaReport verify_cut_accounting(const RunTrace& trace);

/// Every check above on one trace.
TraceVerification verify_trace(const RunTrace& trace, double eta = 0.1,
                               Execution ex = Execution::Parallel);

}  // namespace lpoa
