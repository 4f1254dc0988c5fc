#include "infoshare/polytope.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "infoshare/errors.hpp"
#include "infoshare/geometry2d.hpp"
#include "infoshare/linalg.hpp"
#include "infoshare/simplex.hpp"

namespace infoshare {

namespace {

constexpr int kMaxHullFirms = 16;
constexpr int kMaxClipFirms = 5;
constexpr double kDedupTol = 1e-9;

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

int affine_dimension(const std::vector<std::vector<double>>& pts) {
  if (pts.size() <= 1) return 0;
  DenseRows<double> diffs;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    std::vector<double> d(pts[k].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = pts[k][i] - pts[0][i];
    diffs.push_back(std::move(d));
  }
  return row_reduce_rank(diffs, 1e-9);
}

// Calls f on every k-subset of {0..n-1} (as sorted index vector).
template <class F>
void for_each_subset(int n, int k, F&& f) {
  if (k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

void push_unique_constraint(std::vector<LinearConstraint>& out, LinearConstraint c) {
  double norm = 0.0;
  for (double v : c.normal) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : c.normal) v /= norm;
  c.offset /= norm;
  for (const auto& e : out) {
    if (linf(e.normal, c.normal) <= 1e-9 && std::abs(e.offset - c.offset) <= 1e-9) return;
  }
  out.push_back(std::move(c));
}

// Facets of a full-dimensional polytope in R^n by testing every n-subset of vertices.
std::vector<LinearConstraint> brute_force_facets(const std::vector<std::vector<double>>& verts,
                                                 int n) {
  std::vector<LinearConstraint> facets;
  const int m = static_cast<int>(verts.size());
  for_each_subset(m, n, [&](const std::vector<int>& idx) {
    Eigen::MatrixXd d(n - 1, n);
    const auto& v0 = verts[static_cast<std::size_t>(idx[0])];
    for (int r = 1; r < n; ++r) {
      const auto& vr = verts[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
      for (int c = 0; c < n; ++c) d(r - 1, c) = vr[static_cast<std::size_t>(c)] - v0[static_cast<std::size_t>(c)];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
    lu.setThreshold(1e-10);
    if (lu.rank() != n - 1) return;
    Eigen::VectorXd normal = lu.kernel().col(0);
    normal.normalize();
    double offset = 0.0;
    for (int c = 0; c < n; ++c) offset += normal(c) * v0[static_cast<std::size_t>(c)];
    bool all_le = true, all_ge = true;
    for (const auto& v : verts) {
      double s = -offset;
      for (int c = 0; c < n; ++c) s += normal(c) * v[static_cast<std::size_t>(c)];
      if (s > 1e-9) all_le = false;
      if (s < -1e-9) all_ge = false;
    }
    if (!all_le && !all_ge) return;
    LinearConstraint f{std::vector<double>(normal.data(), normal.data() + n), offset};
    if (!all_le) {
      for (double& x : f.normal) x = -x;
      f.offset = -f.offset;
    }
    push_unique_constraint(facets, std::move(f));
  });
  return facets;
}

// Vertices of {x : a_k . x <= b_k} by solving every n-subset of tight constraints.
std::vector<std::vector<double>> enumerate_vertices(const std::vector<LinearConstraint>& cons,
                                                    int n) {
  std::vector<std::vector<double>> verts;
  for_each_subset(static_cast<int>(cons.size()), n, [&](const std::vector<int>& idx) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) {
      const auto& c = cons[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
      for (int j = 0; j < n; ++j) a(r, j) = c.normal[static_cast<std::size_t>(j)];
      b(r) = c.offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-10);
    if (lu.rank() != n) return;
    Eigen::VectorXd x = lu.solve(b);
    std::vector<double> p(x.data(), x.data() + n);
    for (const auto& c : cons) {
      double s = -c.offset;
      for (int j = 0; j < n; ++j) s += c.normal[static_cast<std::size_t>(j)] * p[static_cast<std::size_t>(j)];
      if (s > 1e-9) return;
    }
    for (double& v : p) {
      if (std::abs(v) < 1e-13) v = 0.0;
    }
    if (std::none_of(verts.begin(), verts.end(),
                     [&](const std::vector<double>& q) { return linf(p, q) <= kDedupTol; })) {
      verts.push_back(std::move(p));
    }
  });
  return verts;
}

std::vector<LinearConstraint> orthant_constraints(int n) {
  std::vector<LinearConstraint> cons;
  for (int i = 0; i < n; ++i) {
    LinearConstraint c{std::vector<double>(static_cast<std::size_t>(n), 0.0), 0.0};
    c.normal[static_cast<std::size_t>(i)] = -1.0;
    cons.push_back(std::move(c));
  }
  return cons;
}

void attach_profiles(PayoffPolytope& poly, const std::vector<ActionProfile>& profiles,
                     const std::vector<std::vector<double>>& payoffs) {
  poly.vertex_profiles.assign(poly.vertices.size(), {});
  for (std::size_t v = 0; v < poly.vertices.size(); ++v) {
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      if (linf(poly.vertices[v], payoffs[k]) <= kDedupTol) poly.vertex_profiles[v].push_back(profiles[k]);
    }
  }
}

PayoffPolytope two_firm_hull(const std::vector<ActionProfile>& profiles,
                             const std::vector<std::vector<double>>& payoffs, bool clip_to_ir) {
  std::vector<geo::Point2> pts;
  for (const auto& u : payoffs) pts.push_back({u[0], u[1]});
  auto hull = geo::convex_hull(pts, kDedupTol);
  if (clip_to_ir && hull.size() >= 3) {
    hull = geo::clip(hull, {-1.0, 0.0, 0.0});
    hull = geo::clip(hull, {0.0, -1.0, 0.0});
  } else if (clip_to_ir) {
    // Degenerate hull: keep only the points in the orthant.
    std::erase_if(hull, [](const geo::Point2& p) { return p.x < -kDedupTol || p.y < -kDedupTol; });
  }

  PayoffPolytope poly;
  poly.n = 2;
  poly.is_clipped_to_ir = clip_to_ir;
  for (const auto& p : hull) {
    poly.vertices.push_back({std::abs(p.x) < 1e-13 ? 0.0 : p.x, std::abs(p.y) < 1e-13 ? 0.0 : p.y});
  }
  attach_profiles(poly, profiles, payoffs);
  poly.affine_dimension = affine_dimension(poly.vertices);
  if (hull.size() >= 3) {
    std::vector<LinearConstraint> ineq;
    for (const auto& h : geo::edge_halfplanes(hull)) ineq.push_back({{h.a, h.b}, h.c});
    poly.inequalities = std::move(ineq);
  }
  return poly;
}

}  // namespace

bool is_extreme_point(const std::vector<double>& point,
                      const std::vector<std::vector<double>>& others, double tol) {
  std::vector<const std::vector<double>*> cands;
  for (const auto& o : others) {
    if (linf(o, point) > tol) cands.push_back(&o);
  }
  if (cands.empty()) return true;
  const std::size_t n = point.size();
  LinearProgram<double> lp(cands.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k) row[k] = (*cands[k])[i];
    lp.add_row(std::move(row), RowSense::Equal, point[i]);
  }
  lp.add_row(std::vector<double>(cands.size(), 1.0), RowSense::Equal, 1.0);
  return solve_lp(lp).status == LpStatus::Infeasible;
}

PayoffPolytope feasible_hull(const GameSpec& spec, bool clip_to_ir) {
  validate(spec);
  const int n = spec.n_firms;
  if (n > kMaxHullFirms) {
    throw CapacityError("feasible_hull enumerates 2^N profiles; N must be <= 16");
  }
  if (clip_to_ir && n > kMaxClipFirms) {
    throw CapacityError("IR-clipped hull vertex enumeration supports N <= 5");
  }

  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<ActionProfile> profiles;
  std::vector<std::vector<double>> payoffs;
  profiles.reserve(count);
  payoffs.reserve(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    profiles.push_back(ActionProfile::from_index(idx, n));
    payoffs.push_back(profile_payoff(spec, profiles.back()));
  }

  if (n == 2) return two_firm_hull(profiles, payoffs, clip_to_ir);

  // Symmetric firms: whether a profile's payoff is extreme depends only on
  // the number of disclosers x, so test one representative per class.
  PayoffPolytope poly;
  poly.n = n;
  for (int x = 0; x <= n; ++x) {
    const std::uint64_t rep_idx = (std::uint64_t{1} << x) - 1;  // first x firms disclose
    const auto& rep = payoffs[rep_idx];
    std::vector<std::vector<double>> others;
    others.reserve(count - 1);
    for (std::uint64_t k = 0; k < count; ++k) {
      if (k != rep_idx) others.push_back(payoffs[k]);
    }
    if (!is_extreme_point(rep, others)) continue;
    for (std::uint64_t k = 0; k < count; ++k) {
      if (profiles[k].disclosers() != x) continue;
      if (std::none_of(poly.vertices.begin(), poly.vertices.end(),
                       [&](const std::vector<double>& v) { return linf(v, payoffs[k]) <= kDedupTol; })) {
        poly.vertices.push_back(payoffs[k]);
      }
    }
  }
  poly.affine_dimension = affine_dimension(poly.vertices);

  if (n <= kMaxClipFirms && poly.full_dimensional()) {
    poly.inequalities = brute_force_facets(poly.vertices, n);
  }

  if (clip_to_ir) {
    if (!poly.inequalities) {
      throw CapacityError("IR clipping requires a full-dimensional feasible hull");
    }
    auto cons = *poly.inequalities;
    for (auto& c : orthant_constraints(n)) cons.push_back(std::move(c));
    poly.vertices = enumerate_vertices(cons, n);
    std::sort(poly.vertices.begin(), poly.vertices.end());
    poly.inequalities = std::move(cons);
    poly.is_clipped_to_ir = true;
    poly.affine_dimension = affine_dimension(poly.vertices);
  }
  attach_profiles(poly, profiles, payoffs);
  return poly;
}

double PayoffPolytope::distance_linf(const std::vector<double>& point) const {
  if (point.size() != static_cast<std::size_t>(n)) throw DomainError("point has wrong dimension");
  if (vertices.empty()) return std::numeric_limits<double>::infinity();
  // min t  s.t.  |sum_k mu_k v_k - p|_inf <= t,  sum mu = 1,  mu >= 0
  const std::size_t m = vertices.size();
  LinearProgram<double> lp(m + 1);
  lp.objective[m] = -1.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    std::vector<double> up(m + 1), lo(m + 1);
    for (std::size_t k = 0; k < m; ++k) {
      up[k] = vertices[k][i];
      lo[k] = -vertices[k][i];
    }
    up[m] = -1.0;
    lo[m] = -1.0;
    lp.add_row(std::move(up), RowSense::LessEqual, point[i]);
    lp.add_row(std::move(lo), RowSense::LessEqual, -point[i]);
  }
  std::vector<double> sum(m + 1, 1.0);
  sum[m] = 0.0;
  lp.add_row(std::move(sum), RowSense::Equal, 1.0);
  const auto res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) throw std::runtime_error("distance LP failed");
  return std::max(0.0, -res.objective);
}

bool PayoffPolytope::contains(const std::vector<double>& point, double tol) const {
  if (point.size() != static_cast<std::size_t>(n)) throw DomainError("point has wrong dimension");
  if (inequalities) {
    for (const auto& c : *inequalities) {
      double s = -c.offset, norm = 0.0;
      for (std::size_t i = 0; i < point.size(); ++i) {
        s += c.normal[i] * point[i];
        norm += c.normal[i] * c.normal[i];
      }
      if (s / std::sqrt(norm) > tol) return false;
    }
    return true;
  }
  return distance_linf(point) <= tol;
}

double max_step_inside(const PayoffPolytope& poly, const std::vector<double>& from,
                       const std::vector<double>& dir, double t_max) {
  if (poly.inequalities) {
    double t = t_max;
    for (const auto& c : *poly.inequalities) {
      double slack = c.offset, rate = 0.0;
      for (std::size_t i = 0; i < from.size(); ++i) {
        slack -= c.normal[i] * from[i];
        rate += c.normal[i] * dir[i];
      }
      if (rate > 0.0) t = std::min(t, slack / rate);
    }
    return std::max(0.0, t);
  }
  auto at = [&](double t) {
    std::vector<double> p(from);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += t * dir[i];
    return p;
  };
  if (!poly.contains(from)) return 0.0;
  if (poly.contains(at(t_max))) return t_max;
  double lo = 0.0, hi = t_max;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (poly.contains(at(mid)) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace infoshare
