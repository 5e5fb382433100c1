#include "lpoa/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lpoa {

bool lex_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

namespace {

double inf_scale(const Vector& y) { return std::max(1.0, y.lpNorm<Eigen::Infinity>()); }

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> unite(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

int normal_rank(const std::vector<Halfspace>& hs, const std::vector<int>& idx, int q) {
  Matrix a(static_cast<Eigen::Index>(idx.size()), q);
  for (size_t r = 0; r < idx.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = hs[idx[r]].normal.transpose() / hs[idx[r]].normal.norm();
  }
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

void validate_input(const std::vector<Halfspace>& hs) {
  if (hs.empty()) throw InvalidInput("polytope needs at least one halfspace");
  const auto q = hs.front().normal.size();
  if (q < 1) throw InvalidInput("halfspace normal must be nonempty");
  for (const auto& h : hs) {
    if (h.normal.size() != q) throw InvalidInput("halfspaces of mixed dimension");
    if (!h.normal.allFinite() || !std::isfinite(h.offset)) {
      throw InvalidInput("non-finite halfspace data");
    }
    if (h.normal.norm() == 0.0) throw InvalidInput("halfspace with zero normal");
  }
}

}  // namespace

double Polytope::activity_tol(int j, const Vector& y) const {
  return tol_.feasibility * halfspaces_[j].normal.norm() * inf_scale(y);
}

Polytope Polytope::box(int q, double half_width, const PolytopeTolerances& tol) {
  Polytope p;
  p.q_ = q;
  p.tol_ = tol;
  for (int i = 0; i < q; ++i) {
    Vector n = Vector::Zero(q);
    n[i] = 1.0;
    p.halfspaces_.push_back({n, half_width});
    p.halfspaces_.push_back({-n, half_width});
  }
  for (int mask = 0; mask < (1 << q); ++mask) {
    Vector v(q);
    std::vector<int> inc;
    for (int i = 0; i < q; ++i) {
      const bool upper = (mask >> i) & 1;
      v[i] = upper ? half_width : -half_width;
      inc.push_back(upper ? 2 * i : 2 * i + 1);
    }
    std::sort(inc.begin(), inc.end());
    p.vertices_.push_back(v);
    p.incidence_.push_back(inc);
  }
  p.sort_lexicographic();
  return p;
}

void Polytope::sort_lexicographic() {
  std::vector<size_t> order(vertices_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return lex_less(vertices_[a], vertices_[b]); });
  std::vector<Vector> v;
  std::vector<std::vector<int>> inc;
  v.reserve(order.size());
  inc.reserve(order.size());
  for (size_t i : order) {
    v.push_back(std::move(vertices_[i]));
    inc.push_back(std::move(incidence_[i]));
  }
  vertices_ = std::move(v);
  incidence_ = std::move(inc);
}

bool Polytope::clip(const Halfspace& h, bool record_null, int* removed, int* created) {
  if (h.normal.size() != q_) throw InvalidInput("cut dimension mismatch");
  if (!h.normal.allFinite() || !std::isfinite(h.offset) || h.normal.norm() == 0.0) {
    throw InvalidInput("invalid cut halfspace");
  }
  const int m = static_cast<int>(halfspaces_.size());
  const size_t nv = vertices_.size();
  const double nn = h.normal.norm();

  // +1 strictly violates h, 0 lies on its boundary, -1 strictly satisfies it.
  std::vector<int> cls(nv);
  std::vector<double> slack(nv);
  bool any_out = false, any_in = false;
  for (size_t i = 0; i < nv; ++i) {
    slack[i] = h.slack(vertices_[i]);
    const double t = tol_.feasibility * nn * inf_scale(vertices_[i]);
    cls[i] = slack[i] > t ? 1 : (slack[i] < -t ? -1 : 0);
    any_out |= cls[i] == 1;
    any_in |= cls[i] == -1;
  }
  if (removed) *removed = 0;
  if (created) *created = 0;

  if (!any_out) {
    if (record_null) {
      halfspaces_.push_back(h);
      for (size_t i = 0; i < nv; ++i) {
        if (cls[i] == 0) incidence_[i].push_back(m);
      }
    }
    return false;
  }
  if (!any_in) {
    throw InfeasiblePolytope("halfspace leaves no interior in the polytope", h.normal);
  }

  halfspaces_.push_back(h);

  std::vector<Vector> fresh;
  std::vector<std::vector<int>> fresh_inc;
  for (size_t u = 0; u < nv; ++u) {
    if (cls[u] != 1) continue;
    for (size_t w = 0; w < nv; ++w) {
      if (cls[w] != -1) continue;
      auto common = intersect(incidence_[u], incidence_[w]);
      if (static_cast<int>(common.size()) < q_ - 1) continue;
      if (normal_rank(halfspaces_, common, q_) != q_ - 1) continue;
      bool adjacent = true;
      for (size_t x = 0; x < nv && adjacent; ++x) {
        if (x == u || x == w) continue;
        if (std::includes(incidence_[x].begin(), incidence_[x].end(), common.begin(),
                          common.end())) {
          adjacent = false;
        }
      }
      if (!adjacent) continue;
      const double t = slack[u] / (slack[u] - slack[w]);
      Vector y = vertices_[u] + t * (vertices_[w] - vertices_[u]);
      common.push_back(m);
      std::sort(common.begin(), common.end());
      fresh.push_back(std::move(y));
      fresh_inc.push_back(std::move(common));
    }
  }

  // Recompute each new vertex from its defining equations; edge interpolation
  // loses precision when an endpoint is far away.
  for (size_t k = 0; k < fresh.size(); ++k) {
    const auto& inc = fresh_inc[k];
    Matrix a(static_cast<Eigen::Index>(inc.size()), q_);
    Vector b(static_cast<Eigen::Index>(inc.size()));
    for (size_t r = 0; r < inc.size(); ++r) {
      const double s = halfspaces_[inc[r]].normal.norm();
      a.row(static_cast<Eigen::Index>(r)) = halfspaces_[inc[r]].normal.transpose() / s;
      b[static_cast<Eigen::Index>(r)] = halfspaces_[inc[r]].offset / s;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() == q_) {
      Vector y = qr.solve(b);
      if ((y - fresh[k]).lpNorm<Eigen::Infinity>() <= 1e-6 * inf_scale(fresh[k])) fresh[k] = y;
    }
    std::vector<int> active;
    for (int j = 0; j <= m; ++j) {
      if (std::fabs(halfspaces_[j].slack(fresh[k])) <= activity_tol(j, fresh[k])) {
        active.push_back(j);
      }
    }
    fresh_inc[k] = unite(fresh_inc[k], active);
  }

  std::vector<Vector> verts;
  std::vector<std::vector<int>> inc;
  int dropped = 0;
  for (size_t i = 0; i < nv; ++i) {
    if (cls[i] == 1) {
      ++dropped;
      continue;
    }
    verts.push_back(vertices_[i]);
    inc.push_back(incidence_[i]);
    if (cls[i] == 0) inc.back().push_back(m);
  }
  int added = 0;
  for (size_t k = 0; k < fresh.size(); ++k) {
    bool merged = false;
    for (size_t j = 0; j < verts.size(); ++j) {
      const double d = (verts[j] - fresh[k]).lpNorm<Eigen::Infinity>();
      if (d <= tol_.merge * inf_scale(fresh[k])) {
        inc[j] = unite(inc[j], fresh_inc[k]);
        merged = true;
        break;
      }
    }
    if (!merged) {
      verts.push_back(fresh[k]);
      inc.push_back(fresh_inc[k]);
      ++added;
    }
  }
  vertices_ = std::move(verts);
  incidence_ = std::move(inc);
  sort_lexicographic();
  if (removed) *removed = dropped;
  if (created) *created = added;
  return true;
}

Polytope Polytope::from_halfspaces(const std::vector<Halfspace>& hs,
                                   const PolytopeTolerances& tol) {
  validate_input(hs);
  const int q = static_cast<int>(hs.front().normal.size());
  double reach = 0.0;
  for (const auto& h : hs) reach = std::max(reach, std::fabs(h.offset) / h.normal.norm());

  Vector direction = Vector::Zero(q);
  double half_width = tol.bounding_box * (1.0 + reach);
  for (int attempt = 0; attempt < 3; ++attempt, half_width *= 1e3) {
    Polytope p = box(q, half_width, tol);
    for (const auto& h : hs) p.clip(h, true, nullptr, nullptr);

    const int nbox = 2 * q;
    int far = -1;
    for (size_t i = 0; i < p.vertices_.size(); ++i) {
      if (!p.incidence_[i].empty() && p.incidence_[i].front() < nbox) {
        if (far < 0 || p.vertices_[i].norm() > p.vertices_[far].norm()) far = static_cast<int>(i);
      }
    }
    if (far < 0) {
      Polytope out;
      out.q_ = q;
      out.tol_ = tol;
      out.halfspaces_ = hs;
      out.vertices_ = std::move(p.vertices_);
      for (auto& inc : p.incidence_) {
        for (int& j : inc) j -= nbox;
        out.incidence_.push_back(std::move(inc));
      }
      return out;
    }
    Vector c = Vector::Zero(q);
    for (const auto& v : p.vertices_) c += v;
    c /= static_cast<double>(p.vertices_.size());
    direction = (p.vertices_[far] - c).normalized();
    bool recession = true;
    for (const auto& h : hs) {
      if (h.normal.dot(direction) > 1e-6 * h.normal.norm()) recession = false;
    }
    if (recession) break;
  }
  throw UnboundedPolytope("halfspace intersection is unbounded", direction);
}

CutResult Polytope::cut(const Halfspace& h) const {
  Polytope next = *this;
  int removed = 0, created = 0;
  const bool effective = next.clip(h, false, &removed, &created);
  if (!effective) return CutResult{*this, true, 0, 0};
  return CutResult{std::move(next), false, removed, created};
}

bool Polytope::contains(const Vector& y, double rel_tol) const {
  for (const auto& h : halfspaces_) {
    if (h.slack(y) > rel_tol * h.normal.norm() * inf_scale(y)) return false;
  }
  return true;
}

std::vector<std::string> Polytope::validate() const {
  std::vector<std::string> issues;
  for (size_t i = 0; i < vertices_.size(); ++i) {
    const Vector& v = vertices_[i];
    int active = 0;
    for (size_t j = 0; j < halfspaces_.size(); ++j) {
      const double s = halfspaces_[j].slack(v);
      const double t = activity_tol(static_cast<int>(j), v);
      if (s > t) {
        issues.push_back("vertex " + std::to_string(i) + " violates halfspace " +
                         std::to_string(j));
      }
      if (std::fabs(s) <= t) ++active;
    }
    if (active < q_) {
      issues.push_back("vertex " + std::to_string(i) + " active on fewer than q halfspaces");
    }
    for (int j : incidence_[i]) {
      if (std::fabs(halfspaces_[j].slack(v)) > 10.0 * activity_tol(j, v)) {
        issues.push_back("vertex " + std::to_string(i) + " incidence lists inactive halfspace");
      }
    }
    if (i > 0 && lex_less(v, vertices_[i - 1])) issues.push_back("vertices not sorted");
    for (size_t k = 0; k < i; ++k) {
      if ((vertices_[k] - v).lpNorm<Eigen::Infinity>() < tol_.merge) {
        issues.push_back("duplicate vertices " + std::to_string(k) + ", " + std::to_string(i));
      }
    }
  }
  return issues;
}

double Polytope::volume() const {
  if (vertices_.empty()) return 0.0;
  Vector c = Vector::Zero(q_);
  for (const auto& v : vertices_) c += v;
  c /= static_cast<double>(vertices_.size());

  auto ordered_area = [](std::vector<Eigen::Vector2d> pts) {
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    for (const auto& p : pts) m += p;
    m /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
      return std::atan2(a.y() - m.y(), a.x() - m.x()) < std::atan2(b.y() - m.y(), b.x() - m.x());
    });
    double area = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
      const auto& a = pts[i];
      const auto& b = pts[(i + 1) % pts.size()];
      area += a.x() * b.y() - a.y() * b.x();
    }
    return 0.5 * std::fabs(area);
  };

  if (q_ == 2) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& v : vertices_) pts.emplace_back(v[0], v[1]);
    return pts.size() < 3 ? 0.0 : ordered_area(pts);
  }
  if (q_ == 3) {
    double vol = 0.0;
    for (size_t j = 0; j < halfspaces_.size(); ++j) {
      std::vector<Eigen::Vector3d> face;
      for (size_t i = 0; i < vertices_.size(); ++i) {
        if (std::binary_search(incidence_[i].begin(), incidence_[i].end(), static_cast<int>(j))) {
          face.emplace_back(vertices_[i][0], vertices_[i][1], vertices_[i][2]);
        }
      }
      if (face.size() < 3) continue;
      const Eigen::Vector3d n = Eigen::Vector3d(halfspaces_[j].normal[0], halfspaces_[j].normal[1],
                                                halfspaces_[j].normal[2]);
      const double nn = n.norm();
      Eigen::Vector3d e1 = n.unitOrthogonal();
      Eigen::Vector3d e2 = (n / nn).cross(e1);
      std::vector<Eigen::Vector2d> pts;
      for (const auto& f : face) pts.emplace_back(f.dot(e1), f.dot(e2));
      const double dist = (halfspaces_[j].offset - n.dot(Eigen::Vector3d(c[0], c[1], c[2]))) / nn;
      vol += ordered_area(pts) * dist / 3.0;
    }
    return vol;
  }
  throw InvalidInput("volume is implemented for q = 2 and q = 3 only");
}

}  // namespace lpoa
