#include "infoshare/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "infoshare/conditions.hpp"
#include "infoshare/decomposition.hpp"
#include "infoshare/engine.hpp"
#include "infoshare/errors.hpp"
#include "infoshare/io.hpp"

namespace infoshare {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError(std::string("bad number '") + item + "' in " + what);
    }
    out.push_back(v);
  }
  return out;
}

ActionProfile parse_profile(const std::string& s, int n) {
  std::vector<std::uint8_t> bits;
  for (double v : parse_list(s, "profile")) {
    if (v != 0.0 && v != 1.0) throw UsageError("profile entries must be 0 or 1");
    bits.push_back(v == 1.0 ? 1 : 0);
  }
  if (static_cast<int>(bits.size()) != n) throw UsageError("profile must have n_firms entries");
  return ActionProfile(bits);
}

Direction parse_direction(const std::string& s, int n) {
  const auto v = parse_list(s, "lambda");
  if (static_cast<int>(v.size()) != n) throw UsageError("lambda must have n_firms entries");
  try {
    return Direction(v);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

struct Globals {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
};

SpecFile require_spec(const Globals& g) {
  if (g.spec_path.empty()) throw UsageError("--spec is required for this command");
  return load_spec(g.spec_path);
}

std::uint64_t resolve_seed(const Globals& g, const SpecFile& sf) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("INFOSHARE_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("INFOSHARE_SEED is not an unsigned integer");
    return v;
  }
  return sf.seed.value_or(1);
}

// Writes the machine-readable payload to --out or to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

int cmd_check(const Globals& g, const std::string& theorem, std::ostream& out, std::ostream& err) {
  const auto sf = require_spec(g);
  const auto& spec = sf.spec;
  const auto a = check_assumptions(spec);
  bool ok = a.a1_holds && a.a2_holds && a.a2prime_holds;
  Sink sink(g.out_path, out);
  auto& os = sink.stream();
  os << "{\n\"assumptions\": " << assumptions_json(a);
  err << "A1 " << (a.a1_holds ? "holds" : "fails") << ", A2 " << (a.a2_holds ? "holds" : "fails") << ", A2' "
      << (a.a2prime_holds ? "holds" : "fails") << '\n';
  auto run = [&](Theorem t, const char* key) {
    const auto rep = theorem_preconditions(spec, t);
    os << ",\n\"" << key << "\": " << report_json(rep);
    err << key << " preconditions " << (rep.holds ? "hold" : "fail");
    for (const auto& note : rep.notes) err << "; " << note;
    if (rep.failures() > 0) err << "; " << rep.failures() << " failing sub-checks";
    err << '\n';
    ok = ok && rep.holds;
  };
  if (theorem == "flm" || theorem == "all") run(Theorem::FLM, "FLM");
  if (theorem == "km" || theorem == "all") run(Theorem::KM, "KM");
  os << "\n}\n";
  return ok ? kExitOk : kExitNegative;
}

int cmd_rank(const Globals& g, const std::string& profile_arg, int firm, const std::string& pair_arg,
             std::ostream& out, std::ostream& err) {
  const auto sf = require_spec(g);
  const auto& spec = sf.spec;
  const int n = spec.n_firms;
  const ActionProfile r = profile_arg.empty() ? ActionProfile::all(n, false) : parse_profile(profile_arg, n);
  std::vector<ConditionReport> reps;
  if (firm > 0) {
    if (firm > n) throw UsageError("--firm out of range");
    reps.push_back(individual_full_rank(spec, firm - 1, r));
  }
  if (!pair_arg.empty()) {
    const auto p = parse_list(pair_arg, "pair");
    if (p.size() != 2 || p[0] < 1 || p[1] < 1 || p[0] > n || p[1] > n || p[0] == p[1]) {
      throw UsageError("--pair needs two different firm numbers in 1..N");
    }
    reps.push_back(pairwise_full_rank(spec, static_cast<int>(p[0]) - 1, static_cast<int>(p[1]) - 1, r));
  }
  if (firm <= 0 && pair_arg.empty()) {
    for (int i = 0; i < n; ++i) reps.push_back(individual_full_rank(spec, i, r));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) reps.push_back(pairwise_full_rank(spec, i, j, r));
    }
  }
  Sink sink(g.out_path, out);
  auto& os = sink.stream();
  os << "[\n";
  bool ok = true;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    os << report_json(reps[k]) << (k + 1 < reps.size() ? ",\n" : "\n");
    err << to_string(reps[k].id) << ' ' << reps[k].context << " rank " << *reps[k].find("rank")
        << (reps[k].holds ? " (full)" : " (deficient)") << '\n';
    ok = ok && reps[k].holds;
  }
  os << "]\n";
  return ok ? kExitOk : kExitNegative;
}

int cmd_decompose(const Globals& g, const std::string& lambda_arg, const std::string& action_arg,
                  const std::string& mode, std::ostream& out, std::ostream& err) {
  const auto sf = require_spec(g);
  const auto& spec = sf.spec;
  const int n = spec.n_firms;
  const Direction lambda = lambda_arg.empty() ? Direction(std::vector<double>(static_cast<std::size_t>(n), 1.0))
                                              : parse_direction(lambda_arg, n);
  const ActionProfile r = action_arg.empty() ? ActionProfile::all(n, true) : parse_profile(action_arg, n);

  ContinuationMap map;
  if (mode == "closed-form") {
    if (n != 2 || r != ActionProfile::all(2, true)) {
      throw UsageError("closed-form mode covers two firms at action (1,1); use --mode general");
    }
    try {
      map = table2_closed_form(spec, lambda);
    } catch (const DomainError& e) {
      throw UsageError(std::string(e.what()) + " (try --mode general)");
    }
  } else {
    const auto res = solve_enforceability(spec, r, lambda, mode == "orthogonal");
    if (!res.enforceable) {
      err << "action " << r.to_string() << " is not enforceable in this direction (" << mode << " mode); "
          << "conflicting constraints:\n";
      for (const auto& c : res.infeasible_constraints) err << "  " << c << '\n';
      return kExitNegative;
    }
    map = res.map;
  }
  Sink sink(g.out_path, out);
  write_continuation_csv(sink.stream(), map);
  err << "k* = " << format_double(map.k_star) << " (unit lambda), " << format_double(map.k_star_raw)
      << " (given lambda); action " << map.action.to_string() << '\n';
  return kExitOk;
}

int cmd_payoffset(const Globals& g, int directions, const std::string& halfspaces_out, std::ostream& out,
                  std::ostream& err) {
  const auto sf = require_spec(g);
  const auto approx = ppe_payoff_set(sf.spec, directions);
  Sink sink(g.out_path, out);
  if (sf.spec.n_firms == 2) {
    write_vertices_csv(sink.stream(), approx.polygon_vertices);
  } else {
    write_halfspaces_csv(sink.stream(), approx.halfspaces);
  }
  if (!halfspaces_out.empty()) {
    std::ofstream hs(halfspaces_out);
    if (!hs) throw UsageError("cannot open '" + halfspaces_out + "'");
    write_halfspaces_csv(hs, approx.halfspaces);
  }
  if (sf.spec.n_firms == 2) {
    err << approx.polygon_vertices.size() << " vertices, area " << format_double(approx.area) << '\n';
    if (approx.empty_interior) {
      err << "the approximated payoff set has empty interior\n";
      return kExitNegative;
    }
  }
  return kExitOk;
}

int cmd_simulate(const Globals& g, const std::string& strategy_arg, int horizon, int replicas,
                 const std::string& mode_arg, const std::string& v0_arg, const std::string& lambda_arg,
                 bool allow_exit, std::ostream& out, std::ostream& err) {
  const auto sf = require_spec(g);
  const auto& spec = sf.spec;
  const int n = spec.n_firms;
  const std::uint64_t seed = resolve_seed(g, sf);
  const MonitoringMode mode = mode_arg == "private" ? MonitoringMode::Private : MonitoringMode::Public;

  StrategyProfile strategies;
  if (strategy_arg == "promise") {
    const auto v0 = v0_arg.empty() ? profile_payoff(spec, ActionProfile::all(n, true)) : parse_list(v0_arg, "v0");
    if (static_cast<int>(v0.size()) != n) throw UsageError("--v0 must have n_firms entries");
    const Direction lambda = lambda_arg.empty() ? Direction(std::vector<double>(static_cast<std::size_t>(n), 1.0))
                                                : parse_direction(lambda_arg, n);
    PromiseOptions opt;
    opt.enforce_hull = !allow_exit;
    try {
      strategies = promise_automaton(spec, v0, lambda, opt);
    } catch (const DomainError& e) {
      err << "cannot build promise automaton: " << e.what() << '\n';
      return kExitNegative;
    }
  } else {
    std::vector<std::string> names;
    std::stringstream ss(strategy_arg);
    std::string item;
    while (std::getline(ss, item, ',')) names.push_back(item);
    if (names.size() == 1) names.assign(static_cast<std::size_t>(n), names.front());
    if (static_cast<int>(names.size()) != n) throw UsageError("give one strategy or one per firm");
    for (const auto& name : names) {
      try {
        strategies.push_back(make_strategy(name));
      } catch (const DomainError&) {
        std::string list;
        for (const auto& s : strategy_names()) list += " " + s;
        throw UsageError("unknown strategy '" + name + "'; available:" + list);
      }
    }
  }

  Sink sink(g.out_path, out);
  auto& os = sink.stream();
  try {
    if (replicas == 1) {
      const auto trace = run_episode(spec, strategies, horizon, seed, mode);
      write_trace_csv(os, trace);
      const auto avg = trace.discounted_average();
      err << "discounted average";
      for (double v : avg) err << ' ' << format_double(v);
      err << "; truncation bias bound " << format_double(trace.truncation_bound()) << '\n';
    } else {
      const auto mc = monte_carlo(spec, strategies, replicas, horizon, seed, mode);
      os << "firm,mean,standard_error\n";
      for (int i = 0; i < n; ++i) {
        os << i + 1 << ',' << format_double(mc.mean[static_cast<std::size_t>(i)]) << ','
           << format_double(mc.standard_error[static_cast<std::size_t>(i)]) << '\n';
      }
      err << replicas << " replicas, truncation bias bound " << format_double(mc.truncation_bound) << '\n';
    }
  } catch (const DiscountTooSmall& e) {
    err << "discount too small: " << e.what() << "; delta >= " << format_double(e.suggested_discount())
        << " would have kept the observed updates inside the hull (diagnostic only)\n";
    return kExitNegative;
  } catch (const ProtocolError& e) {
    err << "protocol error by firm " << e.firm() + 1 << " in period " << e.period() << ": " << e.what() << '\n';
    return kExitNegative;
  }
  return kExitOk;
}

struct SweepArgs {
  double alpha_min = 0.55, alpha_max = 0.95;
  int alpha_steps = 10;
  double eps_min = 0.05, eps_max = 0.45;
  int eps_steps = 10;
  double L = 1.0;
  std::string lambda = "1,1";
};

std::vector<double> grid(double lo, double hi, int steps) {
  if (steps < 1) throw UsageError("grid steps must be at least 1");
  std::vector<double> g;
  for (int k = 0; k < steps; ++k) g.push_back(steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1));
  return g;
}

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const auto alphas = grid(a.alpha_min, a.alpha_max, a.alpha_steps);
  const auto eps = grid(a.eps_min, a.eps_max, a.eps_steps);
  for (double al : alphas) {
    if (!(al > 0.5 && al < 1.0)) throw UsageError("alpha grid must lie inside (1/2, 1)");
  }
  for (double e : eps) {
    if (!(e > 0.0 && e < 0.5)) throw UsageError("epsilon grid must lie inside (0, 1/2)");
  }
  if (!(a.L > 0.0)) throw UsageError("L must be positive");
  const Direction lambda = parse_direction(a.lambda, 2);
  Sink sink(g.out_path, out);
  auto& os = sink.stream();
  os << "alpha,epsilon,\"gamma_bar_1_of_(1,0)\"\n";
  for (double al : alphas) {
    for (double e : eps) {
      os << format_double(al) << ',' << format_double(e) << ',' << format_double(table2_gamma(al, e, a.L, lambda)[1][0])
         << '\n';
    }
  }
  err << alphas.size() * eps.size() << " grid points\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repeated information-sharing games: condition checks, decomposition, simulation"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--spec", g.spec_path, "Game spec file (JSON)");
  auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed (default: $INFOSHARE_SEED, then the spec's seed)");
  app.add_option("--out", g.out_path, "Write the machine-readable output here instead of stdout");

  std::string theorem = "all";
  auto* check = app.add_subcommand("check", "Assumptions and folk-theorem preconditions");
  check->add_option("--theorem", theorem)->check(CLI::IsMember({"flm", "km", "all"}));

  std::string profile, pair;
  int firm = 0;
  auto* rank = app.add_subcommand("rank", "Individual / pairwise full rank of the public monitor");
  rank->add_option("--profile", profile, "Action profile, e.g. 1,1,0 (default: all conceal)");
  rank->add_option("--firm", firm, "Firm for individual full rank (1-based)");
  rank->add_option("--pair", pair, "Firms for pairwise full rank, e.g. 1,3");

  std::string lambda, action, mode = "orthogonal";
  auto* dec = app.add_subcommand("decompose", "Normalized continuation payoffs for one action and direction");
  dec->add_option("--lambda", lambda, "Direction, e.g. 1,2 (default: all ones)");
  dec->add_option("--action", action, "Action profile (default: all disclose)");
  dec->add_option("--mode", mode)->check(CLI::IsMember({"orthogonal", "general", "closed-form"}));

  int directions = 360;
  std::string halfspaces_out;
  auto* pay = app.add_subcommand("payoffset", "Half-space approximation of the limit equilibrium payoff set");
  pay->add_option("--directions", directions)->check(CLI::Range(8, 1000000));
  pay->add_option("--halfspaces-out", halfspaces_out, "Also write the half-space list here");

  std::string strategy = "always_disclose", sim_mode = "public", v0;
  int horizon = 100, replicas = 1;
  bool allow_exit = false;
  auto* sim = app.add_subcommand("simulate", "Simulate repeated play");
  sim->add_option("--strategy", strategy, "Strategy name, or one per firm separated by commas; 'promise' for the automaton");
  sim->add_option("--T", horizon, "Horizon")->check(CLI::Range(1, 100000000));
  sim->add_option("--replicas", replicas)->check(CLI::Range(1, 100000000));
  sim->add_option("--mode", sim_mode)->check(CLI::IsMember({"public", "private"}));
  sim->add_option("--v0", v0, "Initial promise for the automaton");
  sim->add_option("--lambda", lambda, "Direction for the automaton");
  sim->add_flag("--allow-hull-exit", allow_exit, "Let promises leave the feasible hull instead of halting");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "gamma_bar_1(1,0) over an (alpha, epsilon) grid");
  sweep->add_option("--alpha-min", sw.alpha_min);
  sweep->add_option("--alpha-max", sw.alpha_max);
  sweep->add_option("--alpha-steps", sw.alpha_steps);
  sweep->add_option("--epsilon-min", sw.eps_min);
  sweep->add_option("--epsilon-max", sw.eps_max);
  sweep->add_option("--epsilon-steps", sw.eps_steps);
  sweep->add_option("--L", sw.L);
  sweep->add_option("--lambda", sw.lambda);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (check->parsed()) return cmd_check(g, theorem, out, err);
    if (rank->parsed()) return cmd_rank(g, profile, firm, pair, out, err);
    if (dec->parsed()) return cmd_decompose(g, lambda, action, mode, out, err);
    if (pay->parsed()) return cmd_payoffset(g, directions, halfspaces_out, out, err);
    if (sim->parsed()) {
      return cmd_simulate(g, strategy, horizon, replicas, sim_mode, v0, lambda, allow_exit, out, err);
    }
    if (sweep->parsed()) return cmd_sweep(g, sw, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace infoshare
