// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "infoshare/cli.hpp"
#include "infoshare/conditions.hpp"
#include "infoshare/decomposition.hpp"
#include "infoshare/engine.hpp"
#include "infoshare/errors.hpp"
#include "infoshare/monitoring.hpp"
#include "infoshare/polytope.hpp"
#include "infoshare/rng.hpp"

using namespace infoshare;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail += "; over time budget";
  }
  failures += o.pass ? 0 : 1;
  std::printf("%s [%d] %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<double> kAlphas{0.6, 0.7, 0.8, 0.9, 0.95};
const std::vector<double> kEpsilons{0.05, 0.1, 0.2, 0.3, 0.4};
const std::vector<double> kLosses{0.5, 1.0, 2.0};

std::vector<std::vector<double>> nonzero_directions() {
  std::vector<std::vector<double>> out;
  for (int k = 0; k < 8; ++k) {
    const double t = std::numbers::pi / 8 + k * std::numbers::pi / 4;
    out.push_back({std::cos(t), std::sin(t)});
  }
  return out;
}

// Closed form written out entry by entry; rows indexed b1 + 2 b2.
std::vector<std::vector<double>> table2_oracle(double a, double e, double L, double l1, double l2) {
  const double kap = (1 - e) / e - (1 - a) / a;
  const double s = L / (e * a * kap);
  const double odds = (1 - e) / e;
  return {{s * odds * (l2 / l1 - 1), s * odds * (l1 / l2 - 1)}, {s, -(l1 / l2) * s}, {-(l2 / l1) * s, s}, {0, 0}};
}

GameSpec two_firm(double a, double e, double L, double delta = 0.9) { return linear_game(2, 3.0, L, a, e, delta); }

// Independent point-to-convex-polygon distance (CCW vertices).
double dist_to_polygon(double x, double y, const std::vector<std::vector<double>>& poly) {
  bool inside = true;
  double best = 1e300;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const auto& p = poly[k];
    const auto& q = poly[(k + 1) % poly.size()];
    const double ex = q[0] - p[0], ey = q[1] - p[1];
    if (ex * (y - p[1]) - ey * (x - p[0]) < 0) inside = false;
    const double len2 = ex * ex + ey * ey;
    const double t = len2 > 0 ? std::clamp(((x - p[0]) * ex + (y - p[1]) * ey) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::hypot(x - p[0] - t * ex, y - p[1] - t * ey));
  }
  return inside ? 0.0 : best;
}

Outcome criterion1() {
  double worst = 0.0;
  int points = 0;
  for (double a : kAlphas) {
    for (double e : kEpsilons) {
      for (double L : kLosses) {
        const auto g = two_firm(a, e, L);
        const ActionProfile r({1, 1});
        for (const auto& lam : nonzero_directions()) {
          EnforceabilityOptions opt;
          opt.target = profile_payoff(g, r);
          opt.bind_incentives = true;
          const auto res = solve_enforceability(g, r, Direction(lam), false, opt);
          if (!res.enforceable) return {false, "general solver found no solution"};
          const auto oracle = table2_oracle(a, e, L, lam[0], lam[1]);
          for (std::size_t b = 0; b < 4; ++b) {
            for (std::size_t i = 0; i < 2; ++i) worst = std::max(worst, std::abs(res.map.gamma_bar[b][i] - oracle[b][i]));
          }
          ++points;
        }
      }
    }
  }
  return {worst <= 1e-9, std::to_string(points) + " grid points, max |general - closed form| = " + fmt("%.3g", worst)};
}

Outcome criterion2() {
  double worst = 0.0;
  for (double a : kAlphas) {
    for (double e : kEpsilons) {
      const double kap = (1 - e) / e - (1 - a) / a;
      for (double L : kLosses) {
        const auto g = two_firm(a, e, L);
        for (const auto& lam : nonzero_directions()) {
          EnforceabilityOptions opt;
          opt.target = profile_payoff(g, ActionProfile({1, 1}));
          opt.bind_incentives = true;
          const auto gb = solve_enforceability(g, ActionProfile({1, 1}), Direction(lam), false, opt).map.gamma_bar;
          const double r1 = e * gb[0][0] + (1 - e) * gb[2][0] + L / (a * kap) * (1 - e) / e;
          const double r2 = e * gb[1][0] + (1 - e) * gb[3][0] - L / (a * kap);
          const double r3 = -gb[2][0] + gb[1][0] - L / (e * a * kap) * (lam[1] / lam[0] + 1);
          worst = std::max({worst, std::abs(r1), std::abs(r2), std::abs(r3)});
        }
      }
    }
  }
  const double spot = table2_closed_form(two_firm(0.9, 0.1, 1.0), Direction({1, 1})).gamma_bar[1][0];
  const bool ok = worst <= 1e-9 && std::abs(spot - 1.25) <= 1e-12;
  return {ok, "max reduced-equation residual " + fmt("%.3g", worst) + ", gamma_bar_1(1,0) = " + fmt("%.15g", spot)};
}

Outcome criterion3() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ua(0.55, 0.99), ue(0.01, 0.45);
  std::vector<std::pair<double, double>> acc;
  while (acc.size() < 10) {
    const double a = ua(rng), e = ue(rng);
    if (a - e >= 0.05) acc.emplace_back(a, e);
  }
  int ifr_checks = 0, pfr_checks = 0;
  for (int n = 2; n <= 8; ++n) {
    for (const auto& [a, e] : acc) {
      for (int i = 0; i < n; ++i) {
        ++ifr_checks;
        if (!individual_full_rank(Accuracy{a, e}, i, ActionProfile::all(n, false)).holds) {
          return {false, "individual full rank failed at N=" + std::to_string(n)};
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      const auto deg = individual_full_rank(Accuracy{0.7, 0.7}, i, ActionProfile::all(n, false));
      if (deg.holds || deg.find("rank").value() != 1) return {false, "alpha = epsilon did not lose rank"};
    }
  }
  for (int n = 2; n <= 6; ++n) {
    std::vector<std::pair<double, double>> grid{{0.9, 0.1}};
    grid.insert(grid.end(), acc.begin(), acc.begin() + 3);
    for (const auto& [a, e] : grid) {
      const auto s = linear_game(n, 1.0, 1.0, a, e);
      for (const auto& r : extreme_profiles(s)) {
        for (int i = 0; i < n; ++i) {
          for (int j = i + 1; j < n; ++j) {
            ++pfr_checks;
            const auto rep = pairwise_full_rank(s, i, j, r);
            if (rep.find("rank").value() != 3) {
              return {false, "pairwise rank " + std::to_string(static_cast<int>(rep.find("rank").value())) + " at N=" +
                                 std::to_string(n) + " " + r.to_string()};
            }
          }
        }
      }
    }
  }
  return {true, std::to_string(ifr_checks) + " individual checks (rank 2), alpha=epsilon gives rank 1, " +
                    std::to_string(pfr_checks) + " pairwise checks at extreme profiles all rank 3"};
}

Outcome criterion4() {
  const double G = 3.0, L = 1.0;
  const auto g = two_firm(0.9, 0.1, L);
  double worst = 0.0;
  for (int k = 0; k < 360; ++k) {
    const double t = k * (std::numbers::pi / 2) / 359;
    const double l1 = std::cos(t), l2 = std::sin(t);
    double formula;
    if (l2 >= G / L * l1) {
      formula = G * l2 - L * l1;
    } else if (l1 >= G / L * l2) {
      formula = G * l1 - L * l2;
    } else {
      formula = (G - L) * (l1 + l2);
    }
    worst = std::max(worst, std::abs(k_star(g, Direction({l1, l2})).k - formula));
  }
  const double neg1 = k_star(g, Direction({-1, 0})).k;
  const double neg2 = k_star(g, Direction({0, -1})).k;
  const bool ok = worst <= 1e-9 && std::abs(neg1) <= 1e-9 && std::abs(neg2) <= 1e-9;
  return {ok, "max |k* - piecewise| = " + fmt("%.3g", worst) + " over 360 directions; k*(-e1) = " + fmt("%.3g", neg1) +
                  ", k*(-e2) = " + fmt("%.3g", neg2)};
}

Outcome criterion5() {
  const auto g = two_firm(0.9, 0.1, 1.0);
  const auto approx = ppe_payoff_set(g, 360);
  const std::vector<std::vector<double>> quad{{0, 0}, {8.0 / 3, 0}, {2, 2}, {0, 8.0 / 3}};
  double h = 0.0;
  for (const auto& v : approx.polygon_vertices) h = std::max(h, dist_to_polygon(v[0], v[1], quad));
  for (const auto& v : quad) h = std::max(h, dist_to_polygon(v[0], v[1], approx.polygon_vertices));
  // Containment in the clipped hull, written out by hand: x, y >= 0, 3x + y <= 8, x + 3y <= 8.
  double outside = 0.0;
  std::vector<double> worst_vertex{0, 0};
  for (const auto& v : approx.polygon_vertices) {
    const double viol = std::max({-v[0], -v[1], (3 * v[0] + v[1] - 8) / std::sqrt(10.0), (v[0] + 3 * v[1] - 8) / std::sqrt(10.0)});
    if (viol > outside) {
      outside = viol;
      worst_vertex = v;
    }
  }
  const bool ok = h <= 0.02 && outside <= 1e-6;
  std::ostringstream os;
  os << "Hausdorff " << fmt("%.4g", h) << " (limit 0.02); largest distance outside the clipped hull "
     << fmt("%.4g", outside) << " at (" << fmt("%.4f", worst_vertex[0]) << ", " << fmt("%.4f", worst_vertex[1])
     << "), limit 1e-6";
  return {ok, os.str()};
}

Outcome criterion6() {
  int checks = 0;
  for (int n : {3, 4}) {
    const auto s = linear_game(n, 1.0, 1.0, 0.9, 0.1);
    for (int j = 0; j < n; ++j) {
      ++checks;
      if (!check_c1(s, j).holds) return {false, "C1 failed at N=" + std::to_string(n)};
    }
    for (const auto& r : extreme_profiles(s)) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          checks += 2;
          if (!check_c2(s, i, j, r).holds || !check_c3(s, i, j, r).holds) {
            return {false, "C2/C3 failed at N=" + std::to_string(n) + " " + r.to_string()};
          }
        }
      }
    }
  }
  const auto two = two_firm(0.9, 0.1, 1.0);
  int inapplicable = 0;
  try {
    check_c2(two, 0, 1, ActionProfile({1, 1}));
  } catch (const ConditionInapplicable&) {
    ++inapplicable;
  }
  try {
    check_c3(two, 0, 1, ActionProfile({1, 1}));
  } catch (const ConditionInapplicable&) {
    ++inapplicable;
  }
  return {inapplicable == 2, std::to_string(checks) + " checks hold for N in {3,4}; N=2 C2/C3 inapplicable: " +
                                 std::to_string(inapplicable) + "/2"};
}

Outcome criterion7() {
  const auto patient = two_firm(0.9, 0.1, 1.0, 0.99);
  const Direction lam({1, 1});
  std::ostringstream os;
  bool ok = true;

  // Acceptance run with the hull check on.
  MonteCarloOptions mco;
  mco.record_halts = true;
  const auto mc = monte_carlo(patient, promise_automaton(patient, {2, 2}, lam), 10000, 2000, 1, MonitoringMode::Public, mco);
  const int completed = 10000 - mc.halted;
  if (completed == 0) {
    ok = false;
    os << "delta=0.99: all 10000 replicas halted (v0=(2,2) is a vertex of the clipped hull, so every nonzero "
          "orthogonal update leaves it); no Monte Carlo mean";
  } else {
    const double dev = std::max(std::abs(mc.mean[0] - 2) / 2, std::abs(mc.mean[1] - 2) / 2);
    ok = ok && mc.halted == 0 && dev <= 0.02 && mc.max_identity_residual <= 1e-9;
    os << "delta=0.99: " << completed << " replicas completed, " << mc.halted << " halted, mean (" << fmt("%.5f", mc.mean[0])
       << ", " << fmt("%.5f", mc.mean[1]) << "), identity residual " << fmt("%.3g", mc.max_identity_residual);
  }

  // Recursion identity on a single full-length run (hull check off so it runs to T).
  PromiseOptions free_run;
  free_run.enforce_hull = false;
  const auto tr = run_episode(patient, promise_automaton(patient, {2, 2}, lam, free_run), 2000, derive_seed(1, 0));
  double identity = 0.0, scale = 1.0;
  for (const auto& p : tr.periods) {
    identity = std::max(identity, p.identity_residual.value_or(1.0));
    for (double v : *p.promise) scale = std::max(scale, std::abs(v));
  }
  ok = ok && identity <= 1e-9 * scale;
  os << "; identity residual over 2000 periods " << fmt("%.3g", identity) << " (|v| up to " << fmt("%.3g", scale) << ")";

  // delta = 0.5 must halt.
  const auto impatient = two_firm(0.9, 0.1, 1.0, 0.5);
  try {
    run_episode(impatient, promise_automaton(impatient, {2, 2}, lam), 2000, 1);
    ok = false;
    os << "; delta=0.5 did not halt";
  } catch (const DiscountTooSmall& e) {
    os << "; delta=0.5 halts in period " << e.period() << " (suggested delta " << fmt("%.4g", e.suggested_discount())
       << ")";
  }
  return {ok, os.str()};
}

Outcome criterion8() {
  double norm_err = 0.0;
  for (int n = 2; n <= 10; ++n) {
    const auto s = linear_game(n, 1.0, 1.0, 0.85, 0.12);
    for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
      norm_err = std::max(norm_err, std::abs(public_signal_distribution(s, ActionProfile::from_index(idx, n)).total() - 1.0));
    }
  }
  const auto g = two_firm(0.9, 0.1, 1.0);
  const int draws = 100000;
  double worst_sigma = 0.0;
  for (const auto& bits : std::vector<std::vector<std::uint8_t>>{{1, 1}, {0, 1}, {0, 0}}) {
    const ActionProfile r(bits);
    // Oracle: product of the per-firm kernels written out by hand.
    std::vector<double> exact(4);
    for (std::uint64_t b = 0; b < 4; ++b) {
      exact[b] = 1.0;
      for (int j = 0; j < 2; ++j) {
        const double p0 = bits[static_cast<std::size_t>(j)] ? 0.1 : 0.9;
        exact[b] *= ((b >> j) & 1U) ? 1 - p0 : p0;
      }
    }
    std::vector<int> counts(4, 0);
    PhiloxStream rng({1, 0, kMonitorStream, StreamPurpose::Signal});
    for (int k = 0; k < draws; ++k) ++counts[sample_public_signal(g.monitor_accuracy(), r, rng).index()];
    for (std::size_t b = 0; b < 4; ++b) {
      const double sd = std::sqrt(draws * exact[b] * (1 - exact[b]));
      worst_sigma = std::max(worst_sigma, std::abs(counts[b] - draws * exact[b]) / sd);
    }
  }
  const bool ok = norm_err <= 1e-12 && worst_sigma <= 3.0;
  return {ok, "largest deviation " + fmt("%.3g", worst_sigma) + " sigma over 3 profiles x 4 signals; max |sum - 1| = " +
                  fmt("%.3g", norm_err)};
}

Outcome criterion9() {
  std::ostringstream out, err;
  const char* spec_path = "acceptance_sweep_spec.json";
  {
    std::FILE* f = std::fopen(spec_path, "w");
    std::fputs(R"({"n_firms": 2, "gain": {"kind": "linear", "G": 3}, "L": 1, "alpha": 0.9, "epsilon": 0.1, "delta": 0.9})", f);
    std::fclose(f);
  }
  const int code = run_cli({"infoshare", "--spec", spec_path, "sweep", "--alpha-min", "0.55", "--alpha-max", "0.95",
                            "--alpha-steps", "10", "--epsilon-min", "0.05", "--epsilon-max", "0.45", "--epsilon-steps",
                            "10", "--L", "1"},
                           out, err);
  std::remove(spec_path);
  if (code != 0) return {false, "sweep exited with " + std::to_string(code) + ": " + err.str()};
  std::istringstream is(out.str());
  std::string line;
  std::getline(is, line);
  std::vector<std::vector<double>> rows;  // alpha, epsilon, value
  while (std::getline(is, line)) {
    std::vector<double> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(std::stod(cell));
    rows.push_back(f);
  }
  if (rows.size() != 100) return {false, "expected 100 rows, got " + std::to_string(rows.size())};
  auto value = [&](double a, double e) {
    for (const auto& r : rows) {
      if (std::abs(r[0] - a) < 1e-12 && std::abs(r[1] - e) < 1e-12) return r[2];
    }
    return std::nan("");
  };
  std::vector<double> as, es;
  for (const auto& r : rows) {
    if (std::find(as.begin(), as.end(), r[0]) == as.end()) as.push_back(r[0]);
    if (std::find(es.begin(), es.end(), r[1]) == es.end()) es.push_back(r[1]);
  }
  std::sort(as.begin(), as.end());
  std::sort(es.begin(), es.end());
  int comparisons = 0;
  for (double e : es) {
    for (std::size_t k = 1; k < as.size(); ++k, ++comparisons) {
      if (!(value(as[k], e) < value(as[k - 1], e))) return {false, "not decreasing in alpha"};
    }
  }
  for (double a : as) {
    for (std::size_t k = 1; k < es.size(); ++k, ++comparisons) {
      if (!(value(a, es[k]) > value(a, es[k - 1]))) return {false, "not increasing in epsilon"};
    }
  }
  const double spot = (1.0) / (0.1 * 0.9 * ((1 - 0.1) / 0.1 - (1 - 0.9) / 0.9));
  return {true, std::to_string(comparisons) + " strict monotonicity comparisons on a 10x10 grid (closed form at (0.9, 0.1): " +
                    fmt("%.6g", spot) + ")"};
}

}  // namespace

int main() {
  run(1, "closed-form reproduction by the general solver", 5.0, criterion1);
  run(2, "reduced-equation residuals and gamma_bar_1(1,0) spot value", 0.0, criterion2);
  run(3, "individual and pairwise rank claims", 10.0, criterion3);
  run(4, "k*(lambda) against the piecewise formula", 0.0, criterion4);
  run(5, "360-direction payoff set geometry", 0.0, criterion5);
  run(6, "conditions C1-C3 for N in {3,4}; N=2 inapplicable", 0.0, criterion6);
  run(7, "promise automaton", 60.0, criterion7);
  run(8, "public signal sampling", 0.0, criterion8);
  run(9, "monotonicity of the sweep", 0.0, criterion9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
