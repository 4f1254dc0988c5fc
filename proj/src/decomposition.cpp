#include "infoshare/decomposition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "infoshare/errors.hpp"
#include "infoshare/geometry2d.hpp"
#include "infoshare/monitoring.hpp"
#include "infoshare/parallel.hpp"
#include "infoshare/rng.hpp"
#include "infoshare/simplex.hpp"

namespace infoshare {

namespace {

constexpr double kSolveTolerance = 1e-9;

std::vector<ActionProfile> lexicographic_profiles(int n) {
  std::vector<ActionProfile> out;
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) out.push_back(ActionProfile::from_index(idx, n));
  std::sort(out.begin(), out.end());
  return out;
}

// Data shared by both solver modes.
struct Problem {
  int n = 0;
  std::size_t signals = 0;
  std::vector<double> u;                  // u(r)
  std::vector<double> p;                  // P(b | r)
  std::vector<std::vector<double>> p_dev;  // P(b | r with firm i flipped)
  std::vector<double> gain;                // u_i(deviation) - u_i(r)

  std::size_t var(int firm, std::size_t b) const { return b * static_cast<std::size_t>(n) + static_cast<std::size_t>(firm); }
  std::size_t num_vars() const { return signals * static_cast<std::size_t>(n); }
};

Problem make_problem(const GameSpec& spec, const ActionProfile& r) {
  Problem pr;
  pr.n = spec.n_firms;
  pr.u = profile_payoff(spec, r);
  pr.p = public_signal_probs(spec, r);
  pr.signals = pr.p.size();
  for (int i = 0; i < pr.n; ++i) {
    const ActionProfile dev = r.flipped(i);
    pr.p_dev.push_back(public_signal_probs(spec, dev));
    pr.gain.push_back(profile_payoff(spec, dev)[static_cast<std::size_t>(i)] - pr.u[static_cast<std::size_t>(i)]);
  }
  return pr;
}

std::size_t largest_component(const Direction& lambda) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < lambda.unit().size(); ++i) {
    if (std::abs(lambda[i]) > std::abs(lambda[best])) best = i;
  }
  return best;
}

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;
  double rhs = 0.0;
};

// gamma_bar(b*) parallel to lambda: lambda_{i0} g_i - lambda_i g_{i0} = 0 for i != i0.
std::vector<Row> gauge_rows(const Problem& pr, const Direction& lambda, std::size_t pin) {
  std::vector<Row> rows;
  const std::size_t i0 = largest_component(lambda);
  for (int i = 0; i < pr.n; ++i) {
    if (static_cast<std::size_t>(i) == i0) continue;
    rows.push_back({{{pr.var(i, pin), lambda[i0]}, {pr.var(static_cast<int>(i0), pin), -lambda[static_cast<std::size_t>(i)]}}, 0.0});
  }
  return rows;
}

double expectation(const Problem& pr, const std::vector<double>& probs, const std::vector<double>& x, int firm) {
  double e = 0.0;
  for (std::size_t b = 0; b < pr.signals; ++b) e += probs[b] * x[pr.var(firm, b)];
  return e;
}

ContinuationMap build_map(const Problem& pr, const ActionProfile& r, const Direction& lambda,
                          const std::vector<double>& x) {
  ContinuationMap m;
  m.action = r;
  m.direction = lambda;
  m.gamma_bar.assign(pr.signals, std::vector<double>(static_cast<std::size_t>(pr.n)));
  double worst_orth = 0.0;
  for (std::size_t b = 0; b < pr.signals; ++b) {
    double dot = 0.0;
    for (int i = 0; i < pr.n; ++i) {
      m.gamma_bar[b][static_cast<std::size_t>(i)] = x[pr.var(i, b)];
      dot += lambda[static_cast<std::size_t>(i)] * x[pr.var(i, b)];
    }
    worst_orth = std::max(worst_orth, std::abs(dot));
  }
  m.orthogonal = worst_orth <= kSolveTolerance;
  for (int i = 0; i < pr.n; ++i) {
    const double e = expectation(pr, pr.p, x, i);
    m.value.push_back(pr.u[static_cast<std::size_t>(i)] + e);
    const double slack = e - expectation(pr, pr.p_dev[static_cast<std::size_t>(i)], x, i) - pr.gain[static_cast<std::size_t>(i)];
    m.binding.push_back(std::abs(slack) <= kSolveTolerance);
  }
  m.k_star = lambda.dot(m.value);
  m.k_star_raw = m.k_star * lambda.scale();
  return m;
}

std::string firm_label(int i) { return "firm " + std::to_string(i + 1); }

EnforceabilityResult solve_orthogonal(const Problem& pr, const ActionProfile& r, const Direction& lambda,
                                      const EnforceabilityOptions& opt, std::size_t pin) {
  std::vector<double> shift(static_cast<std::size_t>(pr.n), 0.0);
  if (opt.target) {
    for (int i = 0; i < pr.n; ++i) shift[static_cast<std::size_t>(i)] = (*opt.target)[static_cast<std::size_t>(i)] - pr.u[static_cast<std::size_t>(i)];
  }
  std::vector<bool> bind(static_cast<std::size_t>(pr.n));
  for (int i = 0; i < pr.n; ++i) bind[static_cast<std::size_t>(i)] = opt.bind_incentives || pr.gain[static_cast<std::size_t>(i)] > 0.0;

  EnforceabilityResult res;
  bool use_pin = opt.pin;
  for (int round = 0; round <= pr.n + 1; ++round) {
    std::vector<Row> rows;
    for (std::size_t b = 0; b < pr.signals; ++b) {
      Row row;
      for (int i = 0; i < pr.n; ++i) row.terms.push_back({pr.var(i, b), lambda[static_cast<std::size_t>(i)]});
      rows.push_back(std::move(row));
    }
    for (int i = 0; i < pr.n; ++i) {
      Row e;
      for (std::size_t b = 0; b < pr.signals; ++b) e.terms.push_back({pr.var(i, b), pr.p[b]});
      e.rhs = shift[static_cast<std::size_t>(i)];
      rows.push_back(std::move(e));
      if (!bind[static_cast<std::size_t>(i)]) continue;
      // u_i(r) + E[g_i | r] = u_i(r') + E[g_i | r']
      Row ic;
      for (std::size_t b = 0; b < pr.signals; ++b) ic.terms.push_back({pr.var(i, b), pr.p_dev[static_cast<std::size_t>(i)][b]});
      ic.rhs = shift[static_cast<std::size_t>(i)] - pr.gain[static_cast<std::size_t>(i)];
      rows.push_back(std::move(ic));
    }
    if (use_pin) {
      for (auto& g : gauge_rows(pr, lambda, pin)) rows.push_back(std::move(g));
    }

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(pr.num_vars()));
    Eigen::VectorXd c(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (const auto& [j, v] : rows[k].terms) a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) += v;
      c(static_cast<Eigen::Index>(k)) = rows[k].rhs;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    const Eigen::VectorXd sol = cod.solve(c);
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    res.residual = (a * sol - c).cwiseAbs().maxCoeff() / scale;
    if (!(res.residual <= kSolveTolerance)) {
      if (use_pin) {
        use_pin = false;  // the gauge is only a tie-breaker; drop it before giving up
        continue;
      }
      res.enforceable = false;
      res.infeasible_constraints.push_back("lambda . gamma_bar(b) = 0 for every signal b");
      for (int i = 0; i < pr.n; ++i) {
        if (bind[static_cast<std::size_t>(i)]) res.infeasible_constraints.push_back("binding incentive constraint of " + firm_label(i));
      }
      return res;
    }

    const std::vector<double> x(sol.data(), sol.data() + sol.size());
    bool rebuilt = false;
    for (int i = 0; i < pr.n; ++i) {
      if (bind[static_cast<std::size_t>(i)]) continue;
      const double slack = expectation(pr, pr.p, x, i) - expectation(pr, pr.p_dev[static_cast<std::size_t>(i)], x, i) - pr.gain[static_cast<std::size_t>(i)];
      if (slack < -kSolveTolerance) {
        bind[static_cast<std::size_t>(i)] = true;
        rebuilt = true;
      }
    }
    if (rebuilt) continue;
    res.enforceable = true;
    res.map = build_map(pr, r, lambda, x);
    return res;
  }
  throw std::logic_error("orthogonal enforceability solve did not settle");
}

EnforceabilityResult solve_general(const Problem& pr, const ActionProfile& r, const Direction& lambda,
                                   const EnforceabilityOptions& opt, std::size_t pin) {
  LinearProgram<double> lp(pr.num_vars(), /*all_free=*/true);
  for (int i = 0; i < pr.n; ++i) {
    for (std::size_t b = 0; b < pr.signals; ++b) lp.objective[pr.var(i, b)] = lambda[static_cast<std::size_t>(i)] * pr.p[b];
  }
  auto dense = [&](const Row& row) {
    std::vector<double> coeffs(pr.num_vars(), 0.0);
    for (const auto& [j, v] : row.terms) coeffs[j] += v;
    return coeffs;
  };
  for (std::size_t b = 0; b < pr.signals; ++b) {
    Row row;
    for (int i = 0; i < pr.n; ++i) row.terms.push_back({pr.var(i, b), lambda[static_cast<std::size_t>(i)]});
    lp.add_row(dense(row), RowSense::LessEqual, 0.0);
  }
  for (int i = 0; i < pr.n; ++i) {
    Row ic;
    for (std::size_t b = 0; b < pr.signals; ++b) {
      ic.terms.push_back({pr.var(i, b), pr.p[b] - pr.p_dev[static_cast<std::size_t>(i)][b]});
    }
    lp.add_row(dense(ic), opt.bind_incentives ? RowSense::Equal : RowSense::GreaterEqual, pr.gain[static_cast<std::size_t>(i)]);
  }
  if (opt.target) {
    for (int i = 0; i < pr.n; ++i) {
      Row e;
      for (std::size_t b = 0; b < pr.signals; ++b) e.terms.push_back({pr.var(i, b), pr.p[b]});
      lp.add_row(dense(e), RowSense::Equal, (*opt.target)[static_cast<std::size_t>(i)] - pr.u[static_cast<std::size_t>(i)]);
    }
  }
  if (opt.pin) {
    for (const auto& g : gauge_rows(pr, lambda, pin)) lp.add_row(dense(g), RowSense::Equal, 0.0);
  }

  const auto sol = solve_lp(lp);
  EnforceabilityResult res;
  if (sol.status == LpStatus::Unbounded) {
    throw std::logic_error("enforceability LP unbounded although lambda . gamma_bar <= 0 caps it");
  }
  if (sol.status == LpStatus::Infeasible) {
    res.infeasible_constraints.push_back("lambda . gamma_bar(b) <= 0 for every signal b");
    for (int i = 0; i < pr.n; ++i) {
      if (opt.bind_incentives || pr.gain[static_cast<std::size_t>(i)] > 0.0) {
        res.infeasible_constraints.push_back("incentive constraint of " + firm_label(i));
      }
    }
    if (opt.target) res.infeasible_constraints.push_back("promise-keeping E[gamma_bar | r] = v - u(r)");
    return res;
  }
  res.enforceable = true;
  res.map = build_map(pr, r, lambda, sol.x);
  return res;
}

}  // namespace

Direction::Direction(std::vector<double> lambda) {
  double norm = 0.0;
  for (double v : lambda) {
    if (!std::isfinite(v)) throw DomainError("direction components must be finite");
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (lambda.empty() || !(norm > 0.0)) throw DomainError("direction must be nonzero");
  for (double& v : lambda) v /= norm;
  unit_ = std::move(lambda);
  scale_ = norm;
}

double Direction::dot(const std::vector<double>& v) const {
  if (v.size() != unit_.size()) throw DomainError("direction and vector differ in dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += unit_[i] * v[i];
  return s;
}

Kappa kappa(double alpha, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5 && alpha > 0.5 && alpha < 1.0)) {
    throw DomainError("kappa needs 0 < epsilon < 1/2 < alpha < 1");
  }
  return {(1.0 - epsilon) / epsilon - (1.0 - alpha) / alpha};
}

std::vector<double> public_signal_probs(const GameSpec& spec, const ActionProfile& r) {
  if (r.size() != spec.n_firms) throw DomainError("profile length differs from n_firms");
  return public_signal_factors(spec.monitor_accuracy(), r).materialize().probs;
}

std::vector<std::vector<double>> table2_gamma(double alpha, double epsilon, double L, const Direction& lambda) {
  if (lambda.size() != 2) throw DomainError("the closed form is stated for two firms");
  if (lambda[0] == 0.0 || lambda[1] == 0.0) {
    throw DomainError(
        "the closed form divides by both lambda components; use the general solver "
        "(solve_enforceability / k_star) for directions with a zero component");
  }
  if (!(L > 0.0)) throw DomainError("L must be positive");
  const double scale = L / (epsilon * alpha * kappa(alpha, epsilon).value);
  const double odds = (1.0 - epsilon) / epsilon;
  const double r21 = lambda[1] / lambda[0];
  const double r12 = lambda[0] / lambda[1];
  // Signal index b1 + 2 b2.
  std::vector<std::vector<double>> g(4, std::vector<double>(2, 0.0));
  g[0] = {scale * odds * (r21 - 1.0), scale * odds * (r12 - 1.0)};  // (0,0)
  g[1] = {scale, -r12 * scale};                                       // (1,0)
  g[2] = {-r21 * scale, scale};                                       // (0,1)
  g[3] = {0.0, 0.0};                                                  // (1,1)
  return g;
}

ContinuationMap table2_closed_form(const GameSpec& spec, const Direction& lambda) {
  validate(spec);
  if (spec.n_firms != 2) throw DomainError("the closed form is stated for two firms");
  const Accuracy acc = spec.monitor_accuracy();
  ContinuationMap m;
  m.action = ActionProfile::all(2, true);
  m.direction = lambda;
  m.gamma_bar = table2_gamma(acc.alpha, acc.epsilon, spec.loss, lambda);
  m.value = profile_payoff(spec, m.action);
  m.k_star = lambda.dot(m.value);
  m.k_star_raw = m.k_star * lambda.scale();
  m.binding = {true, true};
  m.orthogonal = true;
  return m;
}

EnforceabilityResult solve_enforceability(const GameSpec& spec, const ActionProfile& r,
                                          const Direction& lambda, bool orthogonal,
                                          const EnforceabilityOptions& options) {
  validate(spec);
  if (r.size() != spec.n_firms) throw DomainError("profile length differs from n_firms");
  if (lambda.size() != spec.n_firms) throw DomainError("direction dimension differs from n_firms");
  if (spec.n_firms > kMaxKStarFirms) throw CapacityError("enforceability solver supports N <= 8");
  if (options.target && options.target->size() != static_cast<std::size_t>(spec.n_firms)) {
    throw DomainError("target payoff has wrong dimension");
  }
  const Problem pr = make_problem(spec, r);
  const std::size_t pin = options.pin_signal.value_or(pr.signals - 1);
  if (pin >= pr.signals) throw DomainError("pin signal index out of range");
  return orthogonal ? solve_orthogonal(pr, r, lambda, options, pin) : solve_general(pr, r, lambda, options, pin);
}

KStarResult k_star(const GameSpec& spec, const Direction& lambda) {
  validate(spec);
  if (spec.n_firms > kMaxKStarFirms) throw CapacityError("k_star enumerates 2^N profiles; N must be <= 8");
  KStarResult best;
  bool found = false;
  for (const auto& r : lexicographic_profiles(spec.n_firms)) {
    const auto res = solve_enforceability(spec, r, lambda, false);
    if (!res.enforceable) continue;
    if (!found || res.map.k_star > best.k + 1e-12) {
      best.k = res.map.k_star;
      best.best_action = r;
      best.map = res.map;
      found = true;
    }
  }
  if (!found) throw std::logic_error("no enforceable profile; the static equilibrium always is");
  best.k_raw = best.k * lambda.scale();
  return best;
}

PayoffSetApprox ppe_payoff_set(const GameSpec& spec, int n_directions) {
  validate(spec);
  if (n_directions < 8) throw DomainError("ppe_payoff_set needs at least 8 directions");
  const int n = spec.n_firms;
  if (n > kMaxKStarFirms) throw CapacityError("ppe_payoff_set supports N <= 8");

  std::vector<Direction> dirs;
  if (n == 2) {
    for (int k = 0; k < n_directions; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n_directions;
      dirs.emplace_back(std::vector<double>{std::cos(th), std::sin(th)});
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (double s : {1.0, -1.0}) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(i)] = s;
        dirs.emplace_back(std::move(e));
      }
    }
    PhiloxStream rng({0x5eedULL, 0, 0, StreamPurpose::Strategy});
    while (static_cast<int>(dirs.size()) < n_directions) {
      std::vector<double> g(static_cast<std::size_t>(n));
      for (auto& c : g) {
        const double u1 = 1.0 - rng.uniform01();
        const double u2 = rng.uniform01();
        c = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      }
      dirs.emplace_back(std::move(g));
    }
  }

  std::vector<KStarResult> ks(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t k) { ks[k] = k_star(spec, dirs[k]); });

  PayoffSetApprox out;
  for (std::size_t k = 0; k < dirs.size(); ++k) out.halfspaces.push_back({dirs[k], ks[k].k, ks[k].best_action});

  if (n == 2) {
    double big = 1.0;
    for (std::uint64_t idx = 0; idx < 4; ++idx) {
      for (double v : profile_payoff(spec, ActionProfile::from_index(idx, 2))) big = std::max(big, std::abs(v));
    }
    big *= 10.0;
    std::vector<geo::Point2> poly{{-big, -big}, {big, -big}, {big, big}, {-big, big}};
    for (const auto& h : out.halfspaces) poly = geo::clip(poly, {h.lambda[0], h.lambda[1], h.k});
    for (const auto& p : poly) out.polygon_vertices.push_back({p.x, p.y});
    out.area = poly.size() >= 3 ? geo::area(poly) : 0.0;
    out.empty_interior = !(out.area > 1e-12);
  }
  return out;
}

DecompositionCheck verify_decomposition(const GameSpec& spec, const std::vector<double>& v,
                                        const ActionProfile& r, const ContinuationMap& map, double delta) {
  validate(spec);
  const int n = spec.n_firms;
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (v.size() != static_cast<std::size_t>(n)) throw DomainError("payoff vector has wrong dimension");
  const auto p = public_signal_probs(spec, r);
  if (map.gamma_bar.size() != p.size()) throw DomainError("continuation map has wrong signal count");

  DecompositionCheck out;
  const double w = (1.0 - delta) / delta;
  for (const auto& g : map.gamma_bar) {
    std::vector<double> c(v);
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] += w * g[static_cast<std::size_t>(i)];
    out.continuations.push_back(std::move(c));
  }
  auto expected = [&](const std::vector<double>& probs, int i) {
    double e = 0.0;
    for (std::size_t b = 0; b < probs.size(); ++b) e += probs[b] * out.continuations[b][static_cast<std::size_t>(i)];
    return e;
  };
  const auto u = profile_payoff(spec, r);
  out.holds = true;
  for (int i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double on_path = (1.0 - delta) * u[ii] + delta * expected(p, i);
    out.equality_residual.push_back(v[ii] - on_path);
    const ActionProfile dev = r.flipped(i);
    const double off_path = (1.0 - delta) * profile_payoff(spec, dev)[ii] + delta * expected(public_signal_probs(spec, dev), i);
    out.incentive_slack.push_back(on_path - off_path);
    if (std::abs(out.equality_residual.back()) > kSolveTolerance || out.incentive_slack.back() < -kSolveTolerance) {
      out.holds = false;
    }
  }
  return out;
}

}  // namespace infoshare
