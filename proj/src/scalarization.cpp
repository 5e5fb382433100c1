#include "lpoa/scalarization.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>

#include "lpoa/barrier.hpp"

namespace lpoa {
namespace {

// Variables u = (x, z). Constraints in order: the constraints of X, the q cone
// rows Gamma_i(x) - v_i - z_i, then the slice w_bar^T (v + z) - gamma.
class DistanceProgram : public BarrierProblem {
 public:
  DistanceProgram(const ProblemInstance& prob, const Vector& v, const NormExponent& ne)
      : prob_(prob), v_(v), ne_(ne), slice_ok_(prob.w_bar.dot(v) <= prob.gamma_slice) {}

  int dim() const override { return prob_.n + prob_.q; }
  int num_constraints() const override {
    return static_cast<int>(prob_.constraints.size()) + prob_.q + 1;
  }

  double objective(const Vector& u, Vector* grad, Matrix* hess) const override {
    const int n = prob_.n, q = prob_.q;
    const Vector z = u.tail(q);
    const double nz = lp_norm(z, ne_);
    if (grad) grad->setZero(n + q);
    if (hess) hess->setZero(n + q, n + q);
    if (nz == 0.0 || (!grad && !hess)) return nz;
    const double p = ne_.p();
    Vector g(q), curv(q);
    for (int i = 0; i < q; ++i) {
      const double r = std::max(std::fabs(z[i]) / nz, 1e-12);
      g[i] = std::copysign(abs_pow(r, p - 1.0), z[i]);
      curv[i] = abs_pow(r, p - 2.0);
    }
    if (grad) grad->tail(q) = g;
    if (hess) {
      hess->bottomRightCorner(q, q) =
          (p - 1.0) / nz * (Matrix(curv.asDiagonal()) - g * g.transpose());
    }
    return nz;
  }

  double constraint(int k, const Vector& u, Vector* grad, Matrix* hess) const override {
    const int n = prob_.n, q = prob_.q;
    const int mx = static_cast<int>(prob_.constraints.size());
    const Vector x = u.head(n);
    if (grad) grad->setZero(n + q);
    if (hess) hess->setZero(n + q, n + q);
    if (k < mx) {
      const auto& c = prob_.constraints[k];
      if (grad) grad->head(n) = c.gradient(x);
      if (hess) hess->topLeftCorner(n, n) = c.hessian(x);
      return c.value(x);
    }
    if (k < mx + q) {
      const int i = k - mx;
      if (grad) {
        grad->head(n) = prob_.gamma_jacobian(x).row(i).transpose();
        (*grad)[n + i] = -1.0;
      }
      if (hess) hess->topLeftCorner(n, n) = prob_.gamma_hessian(i, x);
      return prob_.gamma_eval(x)[i] - v_[i] - u[n + i];
    }
    if (grad) grad->tail(q) = prob_.w_bar;
    return prob_.w_bar.dot(v_ + u.tail(q)) - prob_.gamma_slice;
  }

  // v is dominated by Gamma(x) for the current x and the slice holds: v in A.
  bool early_stop(const Vector& u) const override {
    if (!slice_ok_) return false;
    const Vector g = prob_.gamma_eval(u.head(prob_.n));
    return (g.array() <= v_.array()).all();
  }

 private:
  const ProblemInstance& prob_;
  const Vector& v_;
  NormExponent ne_;
  bool slice_ok_;
};

// For p < 2 the gradient |z_i|^{p-1} magnifies absolute errors in residual
// components that are tiny relative to ||z||. The normal is instead pinned down
// by stationarity of the active constraints at x: w = mu - lambda w_bar with
// J_A^T mu + sum nu_j grad c_j = 0. The remaining freedom is fitted to the
// components of the gradient that are well conditioned. Returns the normal
// scaled to unit dual norm, or nothing when the fit is not determined.
std::optional<Vector> stationary_normal(const ProblemInstance& prob, const Vector& v,
                                        const Vector& x, const Vector& z,
                                        const NormExponent& ne) {
  const int q = prob.q, n = prob.n;
  const Vector y = v + z;
  const Vector gx = prob.gamma_eval(x);
  const Matrix jac = prob.gamma_jacobian(x);
  const double scale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
  const double act = 1e-8 * scale;

  std::vector<int> rows;
  for (int i = 0; i < q; ++i) {
    if (y[i] - gx[i] <= act) rows.push_back(i);
  }
  std::vector<Vector> cols;
  for (int i : rows) cols.push_back(jac.row(i).transpose());
  for (const auto& c : prob.constraints) {
    const Vector g = c.gradient(x);
    if (c.value(x) >= -act * std::max(1.0, g.norm())) cols.push_back(g);
  }
  const bool slice_active = prob.w_bar.dot(y) >= prob.gamma_slice - act;
  if (rows.empty() && !slice_active) return std::nullopt;

  // Null space of the stationarity map (mu_A, nu_B) -> J_A^T mu_A + sum nu_j grad c_j.
  const auto k = static_cast<Eigen::Index>(cols.size());
  Matrix null_basis(k, 0);
  if (k > 0) {
    Matrix s(n, k);
    for (Eigen::Index c = 0; c < k; ++c) s.col(c) = cols[c] / cols[c].norm();
    Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullV);
    const Vector sv = svd.singularValues();
    const double cutoff = 1e-7 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (c >= sv.size() || sv[c] <= cutoff) keep.push_back(c);
    }
    null_basis.resize(k, static_cast<Eigen::Index>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c) {
      Vector col = svd.matrixV().col(keep[c]);
      for (Eigen::Index r = 0; r < k; ++r) col[r] /= cols[r].norm();
      null_basis.col(static_cast<Eigen::Index>(c)) = col;
    }
  }
  // Columns of the design: w as a linear function of the free parameters.
  const Eigen::Index params = null_basis.cols() + (slice_active ? 1 : 0);
  if (params == 0) return std::nullopt;
  Matrix design = Matrix::Zero(q, params);
  for (Eigen::Index c = 0; c < null_basis.cols(); ++c) {
    for (size_t r = 0; r < rows.size(); ++r) design(rows[r], c) = null_basis(static_cast<Eigen::Index>(r), c);
  }
  if (slice_active) design.col(params - 1) = -prob.w_bar;

  const Vector grad = lp_gradient(z, ne);
  const double zmax = z.lpNorm<Eigen::Infinity>();
  std::vector<int> reliable;
  for (int i = 0; i < q; ++i) {
    if (std::fabs(z[i]) >= 1e-3 * zmax) reliable.push_back(i);
  }
  Matrix a(static_cast<Eigen::Index>(reliable.size()), params);
  Vector b(static_cast<Eigen::Index>(reliable.size()));
  for (size_t r = 0; r < reliable.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = design.row(reliable[r]);
    b[static_cast<Eigen::Index>(r)] = grad[reliable[r]];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-9);
  if (qr.rank() < params) return std::nullopt;
  Vector w = design * qr.solve(b);
  const double wn = lp_norm(w, ne.dual());
  if (!(wn > 0.0)) return std::nullopt;
  w /= wn;
  for (int i : reliable) {
    if (std::fabs(w[i] - grad[i]) > 1e-4) return std::nullopt;
  }
  return w;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

Vector project_onto_orthant_slice(const Vector& v, const Vector& lower, const Vector& w_bar,
                                  double gamma, const NormExponent& ne) {
  const auto q = v.size();
  const Vector l = lower - v;
  const double budget = gamma - w_bar.dot(v);
  Vector z = l.cwiseMax(0.0);
  if (w_bar.dot(z) <= budget) return z;
  if (!(w_bar.dot(l) < budget)) {
    throw InvalidInput("project_onto_orthant_slice: slice excludes the orthant");
  }
  // With multiplier lambda and tau = lambda^{1/(p-1)} the minimizer is
  // z_i = max(l_i, -tau c_i), c_i = w_i^{1/(p-1)}: piecewise linear in tau.
  Vector c(q);
  for (Eigen::Index i = 0; i < q; ++i) c[i] = abs_pow(w_bar[i], 1.0 / (ne.p() - 1.0));
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < q; ++i) {
    if (l[i] < 0.0) order.push_back(i);
  }
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return -l[a] / c[a] < -l[b] / c[b]; });
  double fixed = 0.0;  // contribution of coordinates pinned at l_i
  for (Eigen::Index i = 0; i < q; ++i) {
    if (l[i] >= 0.0) fixed += w_bar[i] * l[i];
  }
  double slope = 0.0;  // d h / d tau over the free coordinates
  for (auto i : order) slope += w_bar[i] * c[i];
  double tau = 0.0;
  for (size_t k = 0; k <= order.size(); ++k) {
    // On this segment h(tau) = fixed - tau * slope.
    const double tau_end = k < order.size() ? -l[order[k]] / c[order[k]] : tau;
    if (slope > 0.0) {
      const double t = (fixed - budget) / slope;
      if (k == order.size() || t <= tau_end) {
        tau = std::max(t, 0.0);
        break;
      }
    }
    if (k < order.size()) {
      fixed += w_bar[order[k]] * l[order[k]];
      slope -= w_bar[order[k]] * c[order[k]];
      tau = tau_end;
    }
  }
  for (Eigen::Index i = 0; i < q; ++i) z[i] = std::max(l[i], -tau * c[i]);
  return z;
}

ScalarizationResult solve_subproblem(const ProblemInstance& prob, const Vector& v,
                                     const NormExponent& ne, const SolverTolerances& tol,
                                     const std::optional<Vector>& x_start) {
  const auto start = std::chrono::steady_clock::now();
  if (v.size() != prob.q || !v.allFinite()) {
    throw InvalidInput("solve_subproblem: vertex has wrong size or non-finite entries");
  }
  const int n = prob.n, q = prob.q;
  const Vector x0 = x_start ? *x_start : prob.interior_point;
  if (x0.size() != n || !(prob.constraint_violation(x0) < 0.0)) {
    throw InvalidInput("solve_subproblem: start is not strictly inside X");
  }
  const Vector g0 = prob.gamma_eval(x0);
  const double margin = 0.5 * (prob.gamma_slice - prob.w_bar.dot(g0));
  if (!(margin > 0.0)) {
    throw InfeasibleSlice("solve_subproblem: start violates the slice; A may be empty");
  }
  Vector u0(n + q);
  u0.head(n) = x0;
  u0.tail(q) = g0 - v + Vector::Constant(q, margin);

  DistanceProgram program(prob, v, ne);
  BarrierOptions bopt;
  bopt.gap_tolerance = tol.gap;
  bopt.max_newton = tol.max_newton;
  const BarrierResult br = barrier_minimize(program, u0, bopt);

  ScalarizationResult res;
  res.vertex = v;
  res.x_opt = br.u.head(n);
  res.iterations = br.newton_iterations;
  res.kkt_residual = br.gap;
  res.z_opt = project_onto_orthant_slice(v, prob.gamma_eval(res.x_opt), prob.w_bar,
                                         prob.gamma_slice, ne);
  res.residual_norm = lp_norm(res.z_opt, ne);
  if (res.residual_norm <= tol.zero) {
    res.z_opt = Vector::Zero(q);
    res.residual_norm = 0.0;
  } else {
    if (ne.p() < 2.0) {
      if (auto w = stationary_normal(prob, v, res.x_opt, res.z_opt, ne)) {
        const Vector z = res.residual_norm * lp_gradient(*w, ne.dual());
        const double shift = (z - res.z_opt).lpNorm<Eigen::Infinity>();
        if (shift <= 1e-3 * tol.feasibility * std::max(1.0, res.residual_norm)) res.z_opt = z;
      }
    }
    res.cut_normal = lp_gradient(res.z_opt, ne);
  }
  res.y_support = v + res.z_opt;
  res.wall_ms = elapsed_ms(start);
  if (!br.converged) {
    throw SubproblemFailure("solve_subproblem: Newton budget exhausted with gap " +
                                std::to_string(br.gap),
                            res);
  }
  return res;
}

SubproblemCache::Key SubproblemCache::key_of(const Vector& v) {
  Key k(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) k[i] = std::llround(v[i] * 1e9);
  return k;
}

std::optional<ScalarizationResult> SubproblemCache::find(const Vector& v) const {
  const Key k = key_of(v);
  std::shared_lock lock(mu_);
  const auto it = entries_.find(k);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SubproblemCache::insert(const Vector& v, const ScalarizationResult& r) {
  const Key k = key_of(v);
  std::unique_lock lock(mu_);
  entries_.emplace(k, r);
}

size_t SubproblemCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

namespace {

ScalarizationResult solve_cached(const ProblemInstance& prob, const Vector& v,
                                 const NormExponent& ne, const SolverTolerances& tol,
                                 SubproblemCache& cache) {
  if (auto hit = cache.find(v)) {
    hit->iterations = 0;
    hit->wall_ms = 0.0;
    hit->from_cache = true;
    return *hit;
  }
  auto r = solve_subproblem(prob, v, ne, tol);
  cache.insert(v, r);
  return r;
}

[[noreturn]] void rethrow_with_vertex(std::exception_ptr err, size_t index, const Vector& v) {
  try {
    std::rethrow_exception(err);
  } catch (const std::exception& e) {
    throw BatchSolveError("vertex " + std::to_string(index) + ": " + e.what(), index, v);
  }
}

}  // namespace

std::vector<ScalarizationResult> solve_batch(const ProblemInstance& prob,
                                             const std::vector<Vector>& vertices,
                                             const NormExponent& ne, const SolverTolerances& tol,
                                             SubproblemCache& cache) {
  std::vector<ScalarizationResult> out(vertices.size());
  std::vector<std::exception_ptr> errors(vertices.size());
  const auto count = static_cast<long>(vertices.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = solve_cached(prob, vertices[i], ne, tol, cache);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) rethrow_with_vertex(errors[i], i, vertices[i]);
  }
  return out;
}

std::vector<ScalarizationResult> solve_batch_serial(const ProblemInstance& prob,
                                                    const std::vector<Vector>& vertices,
                                                    const NormExponent& ne,
                                                    const SolverTolerances& tol,
                                                    SubproblemCache& cache) {
  std::vector<ScalarizationResult> out;
  out.reserve(vertices.size());
  for (size_t i = 0; i < vertices.size(); ++i) {
    try {
      out.push_back(solve_cached(prob, vertices[i], ne, tol, cache));
    } catch (...) {
      rethrow_with_vertex(std::current_exception(), i, vertices[i]);
    }
  }
  return out;
}

}  // namespace lpoa
