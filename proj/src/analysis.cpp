#include "lpoa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

namespace lpoa {

std::vector<double> monotone_envelope(const std::vector<double>& series) {
  if (series.empty()) throw InvalidInput("monotone_envelope: empty series");
  std::vector<double> out(series.size());
  double m = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < series.size(); ++k) {
    m = std::min(m, series[k]);
    out[k] = m;
  }
  return out;
}

namespace {

RateFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  RateFit f;
  const auto n = static_cast<double>(xs.size());
  f.points_used = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    f.c_hat = f.lambda_hat = f.r_squared = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

}  // namespace

RateFit fit_rate(const std::vector<double>& series, int q, double epsilon) {
  if (q < 2) throw InvalidInput("fit_rate: q must be at least 2");
  if (!(epsilon >= 0.0)) throw InvalidInput("fit_rate: epsilon must be nonnegative");
  const int n = static_cast<int>(series.size());
  const int skip = std::max(3, static_cast<int>(std::ceil(0.08 * n)));

  auto window = [&](double cutoff, std::vector<double>& xs, std::vector<double>& ys,
                    int& k_min, int& k_max) {
    xs.clear();
    ys.clear();
    k_min = k_max = -1;
    for (int k = std::max(skip, 1); k < n; ++k) {
      if (!(series[k] > cutoff)) continue;
      if (k_min < 0) k_min = k;
      k_max = k;
      xs.push_back(std::log(static_cast<double>(k)));
      ys.push_back(std::log(series[k]));
    }
  };
  std::vector<double> xs, ys;
  int k_min = -1, k_max = -1;
  window(2.0 * epsilon, xs, ys, k_min, k_max);
  if (xs.size() < 5) window(1.2 * epsilon, xs, ys, k_min, k_max);

  RateFit f = least_squares(xs, ys);
  f.k_min = k_min;
  f.k_max = k_max;
  f.reliable = f.points_used >= 5;
  if (f.points_used >= 2) {
    f.c_hat = -f.slope * (q - 1);
    f.lambda_hat = std::exp(f.intercept);
  }
  return f;
}

std::vector<DeviationPair> build_deviation_pairs(const std::vector<SupportRecord>& records,
                                                 double eta, size_t max_pairs,
                                                 std::uint64_t seed) {
  if (!(eta > 0.0)) throw InvalidInput("build_deviation_pairs: eta must be positive");
  const size_t n = records.size();
  const size_t total = n < 2 ? 0 : n * (n - 1) / 2;
  std::vector<std::pair<int, int>> index;
  if (total <= max_pairs) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) index.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    std::unordered_set<size_t> seen;
    while (index.size() < max_pairs) {
      size_t i = pick(rng), j = pick(rng);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      if (seen.insert(i * n + j).second) index.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    std::sort(index.begin(), index.end());
  }
  std::vector<DeviationPair> out;
  out.reserve(index.size());
  for (auto [i, j] : index) {
    const auto& a = records[i];
    const auto& b = records[j];
    DeviationPair dp;
    dp.i = i;
    dp.j = j;
    dp.y_i = a.y;
    dp.y_j = b.y;
    dp.w_i = a.w;
    dp.w_j = b.w;
    dp.alpha_i = a.y - eta * a.w;
    dp.alpha_j = b.y - eta * b.w;
    dp.d_ij = b.w.dot(a.y - b.y);
    dp.d_ji = a.w.dot(b.y - a.y);
    dp.level = a.iteration >= b.iteration ? a.level : b.level;
    out.push_back(std::move(dp));
  }
  return out;
}

namespace {

struct Tally {
  long checked = 0;
  long violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  double ratio = 0.0;

  // Records lhs <= rhs.
  void check(double lhs, double rhs) {
    ++checked;
    worst = std::min(worst, rhs - lhs);
    if (lhs > rhs + kLemmaTolerance) ++violations;
    if (rhs > 0.0) ratio = std::max(ratio, lhs / rhs);
  }
};

// Runs per_pair over every pair, combining tallies across threads.
template <class F>
LemmaReport tally_pairs(const char* name, const std::vector<DeviationPair>& pairs, Execution ex,
                        F per_pair) {
  long checked = 0, violations = 0;
  double worst = std::numeric_limits<double>::infinity(), ratio = 0.0;
  const auto n = static_cast<long>(pairs.size());
  if (ex == Execution::Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : checked, violations) \
    reduction(min : worst) reduction(max : ratio)
    for (long k = 0; k < n; ++k) {
      Tally t;
      per_pair(pairs[k], t);
      checked += t.checked;
      violations += t.violations;
      worst = std::min(worst, t.worst);
      ratio = std::max(ratio, t.ratio);
    }
  } else {
    for (long k = 0; k < n; ++k) {
      Tally t;
      per_pair(pairs[k], t);
      checked += t.checked;
      violations += t.violations;
      worst = std::min(worst, t.worst);
      ratio = std::max(ratio, t.ratio);
    }
  }
  LemmaReport r;
  r.name = name;
  r.checked = checked;
  r.violations = violations;
  r.worst_margin = checked > 0 ? worst : 0.0;
  r.max_ratio = ratio;
  return r;
}

}  // namespace

LemmaReport verify_support_conditions(const std::vector<DeviationPair>& pairs, Execution ex) {
  return tally_pairs("support_conditions", pairs, ex, [](const DeviationPair& dp, Tally& t) {
    t.check(-dp.d_ij, 0.0);
    t.check(-dp.d_ji, 0.0);
  });
}

LemmaReport verify_hyperplane_lemma(const std::vector<DeviationPair>& pairs,
                                    const LemmaConstants& lc, Execution ex) {
  return tally_pairs("hyperplane_distance", pairs, ex, [&](const DeviationPair& dp, Tally& t) {
    const double a = lp_norm(dp.alpha_i - dp.alpha_j, lc.ne);
    const double bound = lc.C_pq * a * a / lc.eta;
    t.check(dp.d_ij, bound);
    t.check(dp.d_ji, bound);
  });
}

namespace {

void separation_checks(const DeviationPair& dp, const LemmaConstants& lc, double h, Tally& t) {
  const double a = lp_norm(dp.alpha_i - dp.alpha_j, lc.ne);
  if (h > 0.0 && std::max(dp.d_ij, dp.d_ji) >= h) t.check(lc.C3 * std::sqrt(lc.eta * h), a);
  const double d = std::max(dp.d_ij, dp.d_ji);
  if (d > 0.0) t.check(lc.C3 * std::sqrt(lc.eta * d), a);
  if (dp.w_i.dot(dp.w_j) <= 0.0) t.check(lc.C2 * lc.eta, a);
}

}  // namespace

LemmaReport verify_separation(const std::vector<DeviationPair>& pairs, const LemmaConstants& lc,
                              Execution ex) {
  return tally_pairs("separation", pairs, ex, [&](const DeviationPair& dp, Tally& t) {
    separation_checks(dp, lc, dp.level, t);
  });
}

LemmaReport verify_separation(const std::vector<DeviationPair>& pairs, const LemmaConstants& lc,
                              double h, Execution ex) {
  return tally_pairs("separation", pairs, ex, [&](const DeviationPair& dp, Tally& t) {
    separation_checks(dp, lc, h, t);
  });
}

int packing_census(const std::vector<SupportRecord>& records, const LemmaConstants& lc,
                   double eps_sep) {
  if (!(eps_sep > 0.0)) throw InvalidInput("packing_census: eps_sep must be positive");
  std::vector<Vector> kept;
  for (const auto& r : records) {
    const Vector alpha = r.y - lc.eta * r.w;
    bool separated = true;
    for (const auto& k : kept) {
      if (lp_norm(alpha - k, lc.ne) < eps_sep) {
        separated = false;
        break;
      }
    }
    if (separated) kept.push_back(alpha);
  }
  return static_cast<int>(kept.size());
}

LemmaReport verify_cut_accounting(const RunTrace& trace) {
  LemmaReport r;
  r.name = "cut_accounting";
  r.worst_margin = std::numeric_limits<double>::infinity();
  std::vector<Vector> dirs;
  for (const auto& h : trace.initial_halfspaces) dirs.push_back(h.normal / h.normal.norm());
  for (const auto& it : trace.iterations) {
    if (!it.cut_applied) continue;
    dirs.push_back(-it.cut_normal / it.cut_normal.norm());
    // The cut {<w, y> >= <w, y_support>} must exclude the farthest vertex by
    // a margin proportional to its residual; exactly <w, z> = ||z||_p.
    const double excess = it.cut_normal.dot(it.support_point - it.farthest_vertex);
    ++r.checked;
    const double margin = excess - 0.5 * it.residual_norm;
    r.worst_margin = std::min(r.worst_margin, margin);
    if (!(margin > 0.0)) ++r.violations;
  }
  int distinct = 0;
  for (size_t i = 0; i < dirs.size(); ++i) {
    bool fresh = true;
    for (size_t j = 0; j < i && fresh; ++j) {
      if ((dirs[i] - dirs[j]).lpNorm<Eigen::Infinity>() <= 1e-8) fresh = false;
    }
    distinct += fresh ? 1 : 0;
  }
  ++r.checked;
  const int expected = trace.initial_halfspace_count + trace.cuts_applied();
  if (distinct != expected || static_cast<int>(trace.initial_halfspaces.size()) !=
                                  trace.initial_halfspace_count) {
    ++r.violations;
  }
  if (r.checked == 0) r.worst_margin = 0.0;
  return r;
}

TraceVerification verify_trace(const RunTrace& trace, double eta, Execution ex) {
  const NormExponent ne(trace.config.p);
  const int q = trace.initial_halfspaces.empty()
                    ? 0
                    : static_cast<int>(trace.initial_halfspaces.front().normal.size());
  const LemmaConstants lc = make_lemma_constants(ne, q, eta);
  TraceVerification v;
  const auto records = trace.support_pairs.empty() ? trace.cut_records() : trace.support_pairs;
  const auto pairs = build_deviation_pairs(records, eta, kMaxPairs, trace.config.seed);
  v.pairs = pairs.size();
  v.support = verify_support_conditions(pairs, ex);
  v.hyperplane = verify_hyperplane_lemma(pairs, lc, ex);
  v.separation = verify_separation(pairs, lc, ex);

  v.dual_norm.name = "dual_norm_identity";
  v.dual_norm.worst_margin = std::numeric_limits<double>::infinity();
  const NormExponent dual = ne.dual();
  for (const auto& it : trace.iterations) {
    if (it.cut_normal.size() == 0) continue;
    const double dev = std::fabs(lp_norm(it.cut_normal, dual) - 1.0);
    ++v.dual_norm.checked;
    v.dual_norm.worst_margin = std::min(v.dual_norm.worst_margin, 1e-6 - dev);
    v.dual_norm.max_ratio = std::max(v.dual_norm.max_ratio, dev);
    if (dev > 1e-6) ++v.dual_norm.violations;
  }
  if (v.dual_norm.checked == 0) v.dual_norm.worst_margin = 0.0;
  v.cut_accounting = verify_cut_accounting(trace);
  return v;
}

}  // namespace lpoa
