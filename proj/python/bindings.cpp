#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "infoshare/cli.hpp"
#include "infoshare/conditions.hpp"
#include "infoshare/decomposition.hpp"
#include "infoshare/engine.hpp"
#include "infoshare/errors.hpp"
#include "infoshare/io.hpp"
#include "infoshare/monitoring.hpp"
#include "infoshare/polytope.hpp"
#include "infoshare/rng.hpp"

namespace py = pybind11;
using namespace infoshare;

namespace {

ActionProfile profile_of(const std::vector<int>& bits) {
  std::vector<std::uint8_t> b;
  for (int v : bits) {
    if (v != 0 && v != 1) throw DomainError("profile entries must be 0 or 1");
    b.push_back(static_cast<std::uint8_t>(v));
  }
  return ActionProfile(b);
}

std::vector<int> bits_of(const ActionProfile& r) { return {r.bits().begin(), r.bits().end()}; }

py::dict map_dict(const ContinuationMap& m) {
  py::dict d;
  d["gamma_bar"] = m.gamma_bar;
  d["k_star"] = m.k_star;
  d["k_star_raw"] = m.k_star_raw;
  d["action"] = bits_of(m.action);
  d["value"] = m.value;
  d["binding"] = m.binding;
  d["orthogonal"] = m.orthogonal;
  return d;
}

StrategyProfile strategies_of(const GameSpec& spec, const std::vector<std::string>& names) {
  StrategyProfile s;
  for (const auto& n : names) s.push_back(make_strategy(n));
  if (s.size() == 1) {
    while (static_cast<int>(s.size()) < spec.n_firms) s.push_back(s.front()->clone());
  }
  return s;
}

}  // namespace

PYBIND11_MODULE(_infoshare, m) {
  m.doc() = "Repeated N-firm information-sharing games: conditions, decomposition, simulation";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<ConditionInapplicable>(m, "ConditionInapplicable", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DiscountTooSmall>(m, "DiscountTooSmall", PyExc_RuntimeError);

  py::class_<GameSpec>(m, "GameSpec")
      .def_readonly("n_firms", &GameSpec::n_firms)
      .def_readonly("loss", &GameSpec::loss)
      .def_readonly("alpha", &GameSpec::alpha)
      .def_readonly("epsilon", &GameSpec::epsilon)
      .def_readonly("discount", &GameSpec::discount);

  m.def("linear_game", &linear_game, py::arg("n_firms"), py::arg("G"), py::arg("L"), py::arg("alpha"),
        py::arg("epsilon"), py::arg("discount") = 0.9);
  m.def("concave_game", &concave_game, py::arg("f"), py::arg("G"), py::arg("L"), py::arg("alpha"),
        py::arg("epsilon"), py::arg("discount") = 0.9);
  m.def("parse_spec", [](const std::string& text) { return parse_spec(text).spec; });

  m.def("role_payoff", &role_payoff, py::arg("spec"), py::arg("cooperator"), py::arg("x"));
  m.def("profile_payoff", [](const GameSpec& s, const std::vector<int>& r) { return profile_payoff(s, profile_of(r)); });
  m.def("social_welfare", &social_welfare);
  m.def("check_assumptions", [](const GameSpec& s) {
    const auto a = check_assumptions(s);
    py::dict d;
    d["a1"] = a.a1_holds;
    d["a2"] = a.a2_holds;
    d["a2prime"] = a.a2prime_holds;
    return d;
  });
  m.def("feasible_hull", [](const GameSpec& s, bool clip) { return feasible_hull(s, clip).vertices; },
        py::arg("spec"), py::arg("clip_to_ir") = false);

  m.def("public_signal_distribution",
        [](const GameSpec& s, const std::vector<int>& r) { return public_signal_distribution(s, profile_of(r)).probs; });
  m.def("belief_kernel", py::overload_cast<bool, double, double>(&belief_kernel));

  m.def("individual_full_rank", [](const GameSpec& s, int firm, const std::vector<int>& r) {
    return individual_full_rank(s, firm, profile_of(r)).holds;
  });
  m.def("pairwise_full_rank", [](const GameSpec& s, int i, int j, const std::vector<int>& r) {
    return pairwise_full_rank(s, i, j, profile_of(r)).holds;
  });
  m.def("theorem_preconditions", [](const GameSpec& s, const std::string& theorem) {
    const auto rep = theorem_preconditions(s, theorem == "km" ? Theorem::KM : Theorem::FLM);
    return py::make_tuple(rep.holds, report_json(rep));
  });

  m.def("kappa", [](double a, double e) { return kappa(a, e).value; });
  m.def("table2_closed_form",
        [](const GameSpec& s, const std::vector<double>& lam) { return map_dict(table2_closed_form(s, Direction(lam))); });
  m.def(
      "solve_enforceability",
      [](const GameSpec& s, const std::vector<int>& r, const std::vector<double>& lam, bool orthogonal) -> py::object {
        const auto res = solve_enforceability(s, profile_of(r), Direction(lam), orthogonal);
        if (!res.enforceable) return py::none();
        return map_dict(res.map);
      },
      py::arg("spec"), py::arg("action"), py::arg("lam"), py::arg("orthogonal") = true);
  m.def("k_star", [](const GameSpec& s, const std::vector<double>& lam) {
    const auto k = k_star(s, Direction(lam));
    return py::make_tuple(k.k, k.k_raw, bits_of(k.best_action));
  });
  m.def("ppe_payoff_set", [](const GameSpec& s, int n) { return ppe_payoff_set(s, n).polygon_vertices; },
        py::arg("spec"), py::arg("n_directions") = 360);

  m.def(
      "run_episode",
      [](const GameSpec& s, const std::vector<std::string>& strategies, int T, std::uint64_t seed, bool priv) {
        const auto trace = run_episode(s, strategies_of(s, strategies), T, seed,
                                       priv ? MonitoringMode::Private : MonitoringMode::Public);
        std::ostringstream os;
        write_trace_csv(os, trace);
        return py::make_tuple(trace.discounted_average(), os.str());
      },
      py::arg("spec"), py::arg("strategies"), py::arg("T"), py::arg("seed") = 1, py::arg("private") = false);
  m.def(
      "monte_carlo",
      [](const GameSpec& s, const std::vector<std::string>& strategies, int replicas, int T, std::uint64_t seed) {
        const auto mc = monte_carlo(s, strategies_of(s, strategies), replicas, T, seed);
        return py::make_tuple(mc.mean, mc.standard_error);
      },
      py::arg("spec"), py::arg("strategies"), py::arg("replicas"), py::arg("T"), py::arg("seed") = 1);

  m.def("philox4x32_10", [](std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    return philox4x32_10(ctr, key);
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    std::vector<std::string> full{"infoshare"};
    full.insert(full.end(), args.begin(), args.end());
    const int code = run_cli(full, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
