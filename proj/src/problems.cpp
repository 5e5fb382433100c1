#include "lpoa/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace lpoa {

double ProblemInstance::constraint_violation(const Vector& x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) worst = std::max(worst, c.value(x));
  return worst;
}

namespace {

ConvexConstraint linear_constraint(const Vector& a, double b) {
  const auto n = a.size();
  return {[a, b](const Vector& x) { return a.dot(x) - b; }, [a](const Vector&) { return a; },
          [n](const Vector&) { return Matrix(Matrix::Zero(n, n)); }};
}

// (x - c)^T M (x - c) - 1 <= 0.
ConvexConstraint quadratic_constraint(const Matrix& m, const Vector& c) {
  return {[m, c](const Vector& x) { return (x - c).dot(m * (x - c)) - 1.0; },
          [m, c](const Vector& x) { return Vector(2.0 * m * (x - c)); },
          [m](const Vector&) { return Matrix(2.0 * m); }};
}

void set_identity_objective(ProblemInstance& p) {
  const int q = p.q;
  p.gamma_eval = [](const Vector& x) { return x; };
  p.gamma_jacobian = [q](const Vector&) { return Matrix(Matrix::Identity(q, q)); };
  p.gamma_hessian = [q](int, const Vector&) { return Matrix(Matrix::Zero(q, q)); };
}

// Projection onto {x : A x <= b} by enumerating active sets of size <= n and
// keeping the nearest feasible candidate. Exact for the small polygons used here.
Vector project_polyhedron(const Matrix& a, const Vector& b, const Vector& x) {
  const auto m = static_cast<int>(a.rows());
  const auto n = a.cols();
  auto feasible = [&](const Vector& y) {
    return ((a * y - b).array() <= 1e-12 * std::max(1.0, y.lpNorm<Eigen::Infinity>())).all();
  };
  if (feasible(x)) return x;
  Vector best = x;
  double best_d = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << m); ++mask) {
    std::vector<int> rows;
    for (int j = 0; j < m; ++j) {
      if ((mask >> j) & 1) rows.push_back(j);
    }
    if (static_cast<Eigen::Index>(rows.size()) > n) continue;
    Matrix as(static_cast<Eigen::Index>(rows.size()), n);
    Vector bs(static_cast<Eigen::Index>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      as.row(static_cast<Eigen::Index>(r)) = a.row(rows[r]);
      bs[static_cast<Eigen::Index>(r)] = b[rows[r]];
    }
    const Matrix gram = as * as.transpose();
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) continue;
    const Vector y = x - as.transpose() * lu.solve(as * x - bs);
    const double d = (y - x).squaredNorm();
    if (d < best_d && feasible(y)) {
      best_d = d;
      best = y;
    }
  }
  return best;
}

// Nearest point of the ellipse {(x-c)^T M (x-c) <= 1} with M symmetric
// positive definite. In the eigenframe of M the multiplier t >= 0 solves
// sum_i (a_i u_i / (a_i^2 + t))^2 = 1 with a_i the semi-axes; the left side
// is convex and decreasing, so Newton from t = 0 increases monotonically.
Vector project_ellipse(const Matrix& m, const Vector& c, const Vector& x) {
  const Vector d = x - c;
  if (d.dot(m * d) <= 1.0) return x;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector u = es.eigenvectors().transpose() * d;
  const Vector a2 = es.eigenvalues().cwiseInverse();
  double t = 0.0;
  for (int it = 0; it < 200; ++it) {
    double f = -1.0, df = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double r = a2[i] + t;
      const double s = a2[i] * u[i] * u[i] / (r * r);
      f += s;
      df -= 2.0 * s / r;
    }
    if (df == 0.0) break;
    const double step = f / df;
    t -= step;
    if (std::fabs(step) <= 1e-16 * std::max(1.0, t)) break;
  }
  Vector w(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) w[i] = a2[i] * u[i] / (a2[i] + t);
  return c + es.eigenvectors() * w;
}

// Fills lower offsets, gamma, diameter hint and checks the interior point.
void finish_slice(ProblemInstance& p) {
  const int q = p.q;
  p.w_bar = Vector::Constant(q, 1.0 / q);
  p.lower_offsets = Vector(q);
  std::vector<double> slice_values;
  for (int i = 0; i < q; ++i) {
    const auto ws = weighted_sum(p, Vector::Unit(q, i));
    p.lower_offsets[i] = ws.support_offset;
    slice_values.push_back(p.w_bar.dot(p.gamma_eval(ws.x_star)));
  }
  const auto [lo, hi] = std::minmax_element(slice_values.begin(), slice_values.end());
  p.gamma_slice = *hi + 0.25 * (*hi - *lo);

  const double room = p.gamma_slice - p.w_bar.dot(p.lower_offsets);
  double r = p.lower_offsets.lpNorm<1>();
  for (int i = 0; i < q; ++i) {
    Vector corner = p.lower_offsets;
    corner[i] += room / p.w_bar[i];
    r = std::max(r, corner.lpNorm<1>());
  }
  p.diameter_hint = r;

  if (!(p.constraint_violation(p.interior_point) < 0.0) ||
      !(p.w_bar.dot(p.gamma_eval(p.interior_point)) < p.gamma_slice)) {
    throw InvalidInput("interior point of " + p.key + " is not strictly feasible");
  }
}

const Matrix& ellipse_shape() {
  static const Matrix m = (Matrix(2, 2) << 4.0 / 15.0, 1.0 / 15.0, 1.0 / 15.0, 4.0 / 15.0).finished();
  return m;
}

// Smallest value of (x - c)^T M (x - c) over {x <= y} in the plane: the
// minimizer is c itself, or has one or both coordinates pinned to y.
double ellipse_dominated_min(const Matrix& m, const Vector& c, const Vector& y) {
  auto value = [&](const Vector& x) { return (x - c).dot(m * (x - c)); };
  if ((c.array() <= y.array()).all()) return 0.0;
  double best = value(y);
  for (int fix = 0; fix < 2; ++fix) {
    const int free = 1 - fix;
    Vector x = c;
    x[fix] = y[fix];
    x[free] = c[free] - m(free, fix) / m(free, free) * (y[fix] - c[fix]);
    x[free] = std::min(x[free], y[free]);
    best = std::min(best, value(x));
  }
  return best;
}

}  // namespace

ProblemInstance example1(int q) {
  if (q != 2 && q != 3) throw InvalidInput("example1 needs q in {2, 3}");
  ProblemInstance p;
  p.key = "example1-q" + std::to_string(q);
  p.kind = ProblemKind::Example1;
  p.q = q;
  p.n = q;
  set_identity_objective(p);
  const Vector e = Vector::Ones(q);
  p.constraints.push_back(quadratic_constraint(Matrix::Identity(q, q), e));
  p.feasible_project = [e](const Vector& x) -> Vector {
    const double r = (x - e).norm();
    return r <= 1.0 ? x : Vector(e + (x - e) / r);
  };
  p.weighted_sum_closed_form = [e](const Vector& w) -> std::optional<Vector> {
    return Vector(e - w / w.norm());
  };
  p.interior_point = e - Vector::Constant(q, 0.9 / std::sqrt(static_cast<double>(q)));
  finish_slice(p);
  return p;
}

ProblemInstance rotated_ellipse() {
  ProblemInstance p;
  p.key = "ellipse";
  p.kind = ProblemKind::RotatedEllipse;
  p.q = 2;
  p.n = 2;
  set_identity_objective(p);
  const Matrix m = ellipse_shape();
  const Vector c = Vector::Constant(2, 2.0);
  const Matrix m_inv = m.inverse();
  p.constraints.push_back(quadratic_constraint(m, c));
  p.feasible_project = [m, c](const Vector& x) { return project_ellipse(m, c, x); };
  p.weighted_sum_closed_form = [m_inv, c](const Vector& w) -> std::optional<Vector> {
    return Vector(c - m_inv * w / std::sqrt(w.dot(m_inv * w)));
  };
  // Along the diagonal the boundary sits at distance sqrt(3) from the center.
  p.interior_point = c - 0.9 * std::sqrt(3.0) / std::sqrt(2.0) * Vector::Ones(2);
  finish_slice(p);
  return p;
}

ProblemInstance example2() {
  ProblemInstance p;
  p.key = "example2";
  p.kind = ProblemKind::Example2;
  p.q = 3;
  p.n = 2;
  Matrix anchors(3, 2);
  anchors << 1, 1, 2, 3, 4, 2;
  p.gamma_eval = [anchors](const Vector& x) {
    Vector g(3);
    for (int i = 0; i < 3; ++i) g[i] = (x - anchors.row(i).transpose()).squaredNorm();
    return g;
  };
  p.gamma_jacobian = [anchors](const Vector& x) {
    Matrix j(3, 2);
    for (int i = 0; i < 3; ++i) j.row(i) = 2.0 * (x.transpose() - anchors.row(i));
    return j;
  };
  p.gamma_hessian = [](int, const Vector&) { return Matrix(2.0 * Matrix::Identity(2, 2)); };

  Matrix a(5, 2);
  Vector b(5);
  a << 1, 2, -1, 0, 1, 0, 0, -1, 0, 1;
  b << 10, 0, 10, 0, 4;
  for (int j = 0; j < 5; ++j) p.constraints.push_back(linear_constraint(a.row(j).transpose(), b[j]));
  p.feasible_project = [a, b](const Vector& x) { return project_polyhedron(a, b, x); };
  p.interior_point = anchors.colwise().mean().transpose();
  finish_slice(p);
  return p;
}

const std::vector<std::string>& problem_keys() {
  static const std::vector<std::string> keys = {"example1-q2", "example1-q3", "ellipse",
                                                "example2"};
  return keys;
}

ProblemInstance make_problem(const std::string& key) {
  if (key == "example1-q2") return example1(2);
  if (key == "example1-q3") return example1(3);
  if (key == "ellipse") return rotated_ellipse();
  if (key == "example2") return example2();
  throw UnknownProblem(key);
}

WeightedSumResult weighted_sum(const ProblemInstance& prob, const Vector& omega,
                               const WeightedSumOptions& opt) {
  if (omega.size() != prob.q || !omega.allFinite()) {
    throw InvalidInput("weighted_sum: weight has wrong size or non-finite entries");
  }
  if ((omega.array() < 0.0).any() || omega.isZero(0.0)) {
    throw InvalidInput("weighted_sum: weight must be nonnegative and nonzero");
  }
  WeightedSumResult res;
  if (prob.weighted_sum_closed_form) {
    if (auto x = prob.weighted_sum_closed_form(omega)) {
      res.x_star = *x;
      res.support_offset = omega.dot(prob.gamma_eval(*x));
      return res;
    }
  }
  auto f = [&](const Vector& x) { return omega.dot(prob.gamma_eval(x)); };
  auto grad = [&](const Vector& x) { return Vector(prob.gamma_jacobian(x).transpose() * omega); };

  Vector x = prob.feasible_project(prob.interior_point);
  double fx = f(x);
  double step = 1.0;
  double stationarity = std::numeric_limits<double>::infinity();
  Vector x_prev, g_prev;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Vector g = grad(x);
    stationarity = (x - prob.feasible_project(x - g)).norm();
    if (stationarity <= opt.tolerance) {
      res.x_star = x;
      res.support_offset = fx;
      res.iterations = it;
      return res;
    }
    // Barzilai-Borwein step when curvature is visible, else grow the last step.
    step *= 2.0;
    if (it > 0) {
      const Vector ds = x - x_prev;
      const double curv = ds.dot(g - g_prev);
      if (curv > 1e-300) step = ds.squaredNorm() / curv;
    }
    x_prev = x;
    g_prev = g;
    for (;;) {
      const Vector xn = prob.feasible_project(x - step * g);
      const double fn = f(xn);
      // Slack for rounding in f near the optimum, where the true decrease is tiny.
      const double slack = 1e-14 * std::max(1.0, std::fabs(fx));
      if (fn <= fx + 1e-4 * g.dot(xn - x) + slack || step < 1e-20) {
        x = xn;
        fx = fn;
        break;
      }
      step *= 0.5;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "weighted_sum: projected gradient did not converge, residual %g",
                stationarity);
  throw SolverFailure(buf, stationarity);
}

bool in_upper_slice(const ProblemInstance& prob, const Vector& y, double tol) {
  if (y.size() != prob.q) throw InvalidInput("in_upper_slice: dimension mismatch");
  if (prob.w_bar.dot(y) > prob.gamma_slice + tol) return false;
  switch (prob.kind) {
    case ProblemKind::Example1:
      return (Vector::Ones(prob.q) - y).cwiseMax(0.0).norm() <= 1.0 + tol;
    case ProblemKind::RotatedEllipse:
      return ellipse_dominated_min(ellipse_shape(), Vector::Constant(2, 2.0), y) <= 1.0 + tol;
    case ProblemKind::Example2:
      break;
  }
  throw InvalidInput("in_upper_slice: no membership test for " + prob.key);
}

double oracle_distance(const ProblemInstance& prob, const Vector& v, const NormExponent& ne,
                       int samples) {
  if (!prob.identity_objective()) {
    throw InvalidInput("oracle_distance: no boundary oracle for " + prob.key);
  }
  if (samples < 2) throw InvalidInput("oracle_distance: need at least 2 samples");
  if (in_upper_slice(prob, v, 0.0)) return 0.0;
  const int q = prob.q;
  double best = std::numeric_limits<double>::infinity();

  // A frontier point x contributes the dominating point max(x, v) when that
  // point is inside the slice.
  auto frontier = [&](const Vector& x) {
    const Vector y = x.cwiseMax(v);
    if (prob.w_bar.dot(y) <= prob.gamma_slice) best = std::min(best, lp_norm(y - v, ne));
  };
  const double half_pi = std::numbers::pi / 2.0;
  if (prob.kind == ProblemKind::Example1 && q == 2) {
    for (int i = 0; i < samples; ++i) {
      const double t = half_pi * i / (samples - 1);
      frontier((Vector(2) << 1.0 - std::cos(t), 1.0 - std::sin(t)).finished());
    }
  } else if (prob.kind == ProblemKind::Example1) {
    for (int i = 0; i < samples; ++i) {
      const double phi = half_pi * i / (samples - 1);
      for (int j = 0; j < samples; ++j) {
        const double th = half_pi * j / (samples - 1);
        frontier((Vector(3) << 1.0 - std::sin(phi) * std::cos(th),
                  1.0 - std::sin(phi) * std::sin(th), 1.0 - std::cos(phi))
                     .finished());
      }
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(ellipse_shape());
    const Vector axes = es.eigenvalues().cwiseInverse().cwiseSqrt();
    const Vector c = Vector::Constant(2, 2.0);
    for (int i = 0; i < samples; ++i) {
      const double t = 2.0 * std::numbers::pi * i / samples;
      const Vector local = (Vector(2) << axes[0] * std::cos(t), axes[1] * std::sin(t)).finished();
      frontier(c + es.eigenvectors() * local);
    }
  }

  // Slice face: the simplex {y >= lower_offsets, w_bar^T y = gamma} restricted to A.
  const Vector& l = prob.lower_offsets;
  const double room = prob.gamma_slice - prob.w_bar.dot(l);
  auto face = [&](const Vector& bary) {
    Vector y = l;
    for (int i = 0; i < q; ++i) y[i] += bary[i] * room / prob.w_bar[i];
    if (in_upper_slice(prob, y, 1e-12)) best = std::min(best, lp_norm(y - v, ne));
  };
  if (q == 2) {
    for (int i = 0; i < samples; ++i) {
      const double s = static_cast<double>(i) / (samples - 1);
      face((Vector(2) << s, 1.0 - s).finished());
    }
  } else {
    for (int i = 0; i < samples; ++i) {
      for (int j = 0; i + j < samples; ++j) {
        const double a = static_cast<double>(i) / (samples - 1);
        const double b = static_cast<double>(j) / (samples - 1);
        face((Vector(3) << a, b, std::max(0.0, 1.0 - a - b)).finished());
      }
    }
  }
  return best;
}

}  // namespace lpoa
