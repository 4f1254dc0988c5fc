#include "infoshare/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infoshare/errors.hpp"
#include "infoshare/linalg.hpp"
#include "infoshare/polytope.hpp"

namespace infoshare {

namespace {

void check_firm(int firm, int n) {
  if (firm < 0 || firm >= n) throw DomainError("firm index out of range");
}

void check_profile(const ActionProfile& r, int n) {
  if (r.size() != n) throw DomainError("profile length differs from n_firms");
}

std::string context_of(const ActionProfile& r, std::initializer_list<int> firms) {
  std::ostringstream os;
  os << "profile=" << r.to_string() << " firms=";
  bool first = true;
  for (int f : firms) {
    os << (first ? "" : ",") << f + 1;
    first = false;
  }
  return os.str();
}

std::string signal_label(std::uint64_t idx, int n) {
  std::string s = "(";
  for (int j = 0; j < n; ++j) {
    s += ((idx >> j) & 1u) ? '1' : '0';
    if (j + 1 < n) s += ',';
  }
  return s + ")";
}

ConditionReport aggregate(ConditionId id, std::vector<ConditionReport> subs) {
  ConditionReport rep;
  rep.id = id;
  rep.holds = std::all_of(subs.begin(), subs.end(), [](const ConditionReport& s) { return s.holds; });
  rep.sub_reports = std::move(subs);
  return rep;
}

void require_more_than_two(int n, const char* what) {
  if (n <= 2) {
    throw ConditionInapplicable(std::string(what) +
                                " needs more than two players (N > 2): p_-ij is empty for N = 2");
  }
}

}  // namespace

void SignalMatrix::check_stochastic() const {
  for (const auto& row : rows) {
    double s = 0.0;
    for (double v : row) {
      if (v < 0.0) throw DomainError("signal matrix has a negative entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw DomainError("signal matrix row does not sum to 1");
  }
}

const char* to_string(ConditionId id) {
  switch (id) {
    case ConditionId::IFR: return "IFR";
    case ConditionId::PFR: return "PFR";
    case ConditionId::C1: return "C1";
    case ConditionId::C2: return "C2";
    case ConditionId::C3: return "C3";
    case ConditionId::FlmAll: return "FLM-ALL";
    case ConditionId::KmAll: return "KM-ALL";
  }
  return "?";
}

std::optional<double> ConditionReport::find(const std::string& key) const {
  for (const auto& [k, v] : evidence) {
    if (k == key) return v;
  }
  return std::nullopt;
}

int ConditionReport::failures() const {
  int f = 0;
  for (const auto& s : sub_reports) f += (s.holds ? 0 : 1) + s.failures();
  return f;
}

int numeric_rank(const SignalMatrix& m, double tol) {
  if (!(tol > 0.0)) throw DomainError("rank tolerance must be positive");
  return row_reduce_rank(m.rows, tol);
}

SignalMatrix individual_matrix(const Accuracy& monitor, const ActionProfile& profile, int firm) {
  check_firm(firm, profile.size());
  SignalMatrix m;
  const int n = profile.size();
  for (int a = 0; a <= 1; ++a) {
    const auto d = public_signal_factors(monitor, profile.with(firm, a == 1)).materialize();
    m.rows.push_back(d.probs);
    m.row_labels.push_back("r" + std::to_string(firm + 1) + "=" + std::to_string(a));
  }
  for (std::uint64_t b = 0; b < m.rows.front().size(); ++b) m.col_labels.push_back(signal_label(b, n));
  return m;
}

ConditionReport individual_full_rank(const GameSpec& spec, int probe_firm, const ActionProfile& profile) {
  validate(spec);
  check_profile(profile, spec.n_firms);
  return individual_full_rank(spec.monitor_accuracy(), probe_firm, profile);
}

ConditionReport individual_full_rank(const Accuracy& monitor, int probe_firm, const ActionProfile& profile) {
  const SignalMatrix m = individual_matrix(monitor, profile, probe_firm);
  ConditionReport rep;
  rep.id = ConditionId::IFR;
  const int rank = numeric_rank(m);
  rep.holds = rank == 2;
  rep.evidence = {{"rank", rank}, {"required_rank", 2}};
  rep.context = context_of(profile, {probe_firm});
  return rep;
}

ConditionReport pairwise_full_rank(const GameSpec& spec, int firm_i, int firm_j, const ActionProfile& profile) {
  validate(spec);
  check_profile(profile, spec.n_firms);
  return pairwise_full_rank(spec.monitor_accuracy(), firm_i, firm_j, profile);
}

ConditionReport pairwise_full_rank(const Accuracy& monitor, int firm_i, int firm_j,
                                   const ActionProfile& profile) {
  if (firm_i == firm_j) throw DomainError("pairwise full rank needs two different firms");
  SignalMatrix stacked = individual_matrix(monitor, profile, firm_i);
  const SignalMatrix aj = individual_matrix(monitor, profile, firm_j);
  stacked.rows.insert(stacked.rows.end(), aj.rows.begin(), aj.rows.end());
  stacked.row_labels.insert(stacked.row_labels.end(), aj.row_labels.begin(), aj.row_labels.end());

  ConditionReport rep;
  rep.id = ConditionId::PFR;
  const int rank = numeric_rank(stacked);
  rep.holds = rank == 3;
  rep.evidence = {{"rank", rank}, {"required_rank", 3}};
  rep.context = context_of(profile, {firm_i, firm_j});
  // Both blocks contain the row of the prescribed profile itself.
  rep.notes.push_back("rows " + stacked.row_labels[profile.discloses(firm_i) ? 1 : 0] + " and " +
                      stacked.row_labels[2 + (profile.discloses(firm_j) ? 1 : 0)] +
                      " coincide (both are the prescribed profile)");
  return rep;
}

ConditionReport check_c1(const GameSpec& spec, int minmaxed_firm) {
  validate(spec);
  return check_c1(spec, spec.firm_accuracy(), minmaxed_firm);
}

ConditionReport check_c1(const GameSpec& spec, const Accuracy& firms, int minmaxed_firm) {
  const int n = spec.n_firms;
  check_firm(minmaxed_firm, n);
  const MinmaxResult mm = minmax(spec, minmaxed_firm);
  const ActionProfile& r = mm.profile;

  // Mixed deviations need no separate test: the signal law is affine in the
  // deviator's mixing weight, so a gap (or a payoff loss) at the pure endpoint
  // carries over to every strictly mixed deviation.
  std::vector<ConditionReport> subs;
  for (int j = 0; j < n; ++j) {
    if (j == minmaxed_firm) continue;
    const ActionProfile dev = r.flipped(j);
    const auto p = private_factors(firms, r, {j});
    const auto q = private_factors(firms, dev, {j});
    const double sup = sup_norm_difference(p, q);
    const double gap = max_bit_gap(p, q);
    const double gain = profile_payoff(spec, dev)[static_cast<std::size_t>(j)] -
                        profile_payoff(spec, r)[static_cast<std::size_t>(j)];
    ConditionReport s;
    s.id = ConditionId::C1;
    const bool distinguishable = sup > kDistributionTolerance;
    const bool unprofitable = gain <= 0.0;
    s.holds = distinguishable || unprofitable;
    s.evidence = {{"deviator", j + 1}, {"sup_norm", sup}, {"max_bit_gap", gap}, {"deviation_gain", gain}};
    s.notes.push_back(distinguishable ? "clause (i): deviation changes p_-j"
                                      : (unprofitable ? "clause (ii): deviation does not pay"
                                                      : "deviation is undetectable and profitable"));
    s.context = context_of(r, {minmaxed_firm, j});
    subs.push_back(std::move(s));
  }
  auto rep = aggregate(ConditionId::C1, std::move(subs));
  rep.context = context_of(r, {minmaxed_firm});
  return rep;
}

ConditionReport c2_from_distributions(const ProductDistribution& p, const ProductDistribution& q_i,
                                      const ProductDistribution& q_j) {
  ConditionReport rep;
  rep.id = ConditionId::C2;
  const double q_gap = sup_norm_difference(q_i, q_j);
  const bool intersect = q_gap <= kDistributionTolerance;
  const double p_gap = sup_norm_difference(p, q_i);
  rep.holds = !intersect || p_gap > kDistributionTolerance;
  rep.evidence = {{"q_ij_q_ji_sup_norm", q_gap}, {"p_to_common_sup_norm", p_gap}};
  rep.notes.push_back(intersect ? "Q_ij and Q_ji share a point" : "Q_ij and Q_ji are disjoint");
  return rep;
}

ConditionReport c3_from_distributions(const ProductDistribution& p, const ProductDistribution& q_i,
                                      const ProductDistribution& q_j) {
  ConditionReport rep;
  rep.id = ConditionId::C3;
  const double ni = std::sqrt(std::max(0.0, difference_inner_product(q_i, p, q_i, p)));
  const double nj = std::sqrt(std::max(0.0, difference_inner_product(q_j, p, q_j, p)));
  const double dot = difference_inner_product(q_i, p, q_j, p);
  const bool degenerate = ni <= kDistributionTolerance || nj <= kDistributionTolerance;
  const double cosine = degenerate ? 0.0 : dot / (ni * nj);
  // Two segments from p overlap beyond p iff their directions are positively collinear.
  rep.holds = degenerate || cosine <= 1.0 - kDistributionTolerance;
  rep.evidence = {{"norm_i", ni}, {"norm_j", nj}, {"cosine", cosine}};
  if (degenerate) rep.notes.push_back("a deviation leaves p_-ij unchanged; its segment is the point p_-ij");
  return rep;
}

ConditionReport check_c2(const GameSpec& spec, int firm_i, int firm_j, const ActionProfile& profile) {
  validate(spec);
  require_more_than_two(spec.n_firms, "C2");
  check_profile(profile, spec.n_firms);
  const auto p = marginal_factors(spec, profile, {firm_i, firm_j});
  const auto qi = deviation_factors(spec, profile, firm_i, firm_i, firm_j).front();
  const auto qj = deviation_factors(spec, profile, firm_j, firm_i, firm_j).front();
  auto rep = c2_from_distributions(p, qi, qj);
  rep.context = context_of(profile, {firm_i, firm_j});
  return rep;
}

ConditionReport check_c3(const GameSpec& spec, int firm_i, int firm_j, const ActionProfile& profile) {
  validate(spec);
  require_more_than_two(spec.n_firms, "C3");
  check_profile(profile, spec.n_firms);
  const auto p = marginal_factors(spec, profile, {firm_i, firm_j});
  const auto qi = deviation_factors(spec, profile, firm_i, firm_i, firm_j).front();
  const auto qj = deviation_factors(spec, profile, firm_j, firm_i, firm_j).front();
  auto rep = c3_from_distributions(p, qi, qj);
  rep.context = context_of(profile, {firm_i, firm_j});
  return rep;
}

std::vector<ActionProfile> extreme_profiles(const GameSpec& spec) {
  const auto hull = feasible_hull(spec, false);
  std::vector<ActionProfile> out;
  for (const auto& ps : hull.vertex_profiles) out.insert(out.end(), ps.begin(), ps.end());
  std::sort(out.begin(), out.end());
  return out;
}

ConditionReport theorem_preconditions(const GameSpec& spec, Theorem theorem) {
  validate(spec);
  const int n = spec.n_firms;
  const auto hull = feasible_hull(spec, false);
  std::vector<ActionProfile> extremes;
  for (const auto& ps : hull.vertex_profiles) extremes.insert(extremes.end(), ps.begin(), ps.end());
  std::sort(extremes.begin(), extremes.end());

  std::vector<ConditionReport> subs;
  ConditionReport rep;
  bool structural = hull.full_dimensional();
  std::vector<std::pair<std::string, double>> evidence = {
      {"n_firms", n}, {"hull_dimension", hull.affine_dimension}, {"extreme_profiles", static_cast<double>(extremes.size())}};
  std::vector<std::string> notes;
  if (!hull.full_dimensional()) notes.push_back("feasible set has empty interior");

  if (theorem == Theorem::FLM) {
    // Every firm's minmax profile is the all-conceal profile.
    const ActionProfile zero = ActionProfile::all(n, false);
    for (int j = 0; j < n; ++j) subs.push_back(individual_full_rank(spec, j, zero));
    for (const auto& r : extremes) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) subs.push_back(pairwise_full_rank(spec, i, j, r));
      }
    }
    const double inefficiency = cooperator_payoff(spec, n) - minmax(spec, 0).value;
    evidence.emplace_back("cooperation_over_minmax", inefficiency);
    if (!(inefficiency > 0.0)) {
      structural = false;
      notes.push_back("minmax payoff is not inefficient (C(N) <= minmax)");
    }
    rep = aggregate(ConditionId::FlmAll, std::move(subs));
  } else {
    const Accuracy acc = spec.firm_accuracy();
    const bool full_support = acc.epsilon > 0.0 && acc.alpha < 1.0;
    evidence.emplace_back("full_support", full_support ? 1.0 : 0.0);
    if (!full_support) {
      structural = false;
      notes.push_back("private signals lack full support");
    }
    if (n <= 2) {
      structural = false;
      notes.push_back("requires more than two players (N > 2)");
    }
    for (int i = 0; i < n; ++i) subs.push_back(check_c1(spec, i));
    if (n > 2) {
      for (const auto& r : extremes) {
        for (int i = 0; i < n; ++i) {
          for (int j = i + 1; j < n; ++j) {
            subs.push_back(check_c2(spec, i, j, r));
            subs.push_back(check_c3(spec, i, j, r));
          }
        }
      }
    }
    rep = aggregate(ConditionId::KmAll, std::move(subs));
  }
  rep.holds = rep.holds && structural;
  rep.evidence = std::move(evidence);
  rep.notes = std::move(notes);
  rep.context = theorem == Theorem::FLM ? "theorem=FLM" : "theorem=KM";
  return rep;
}

}  // namespace infoshare
