#pragma once

// Informativeness preconditions of the two folk theorems: individual and
// pairwise full rank under public monitoring, and (C1)-(C3) under private
// monitoring with communication.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infoshare/game.hpp"
#include "infoshare/monitoring.hpp"

namespace infoshare {

/// Rows: actions of the probed firm(s); columns: signal outcomes.
struct SignalMatrix {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  /// Throws DomainError unless rows are nonnegative and sum to 1 within 1e-12.
  void check_stochastic() const;
};

enum class ConditionId { IFR, PFR, C1, C2, C3, FlmAll, KmAll };
const char* to_string(ConditionId id);

enum class Theorem { FLM, KM };

struct ConditionReport {
  ConditionId id = ConditionId::IFR;
  bool holds = false;
  std::vector<std::pair<std::string, double>> evidence;
  std::vector<std::string> notes;
  /// Profile and firms probed, firms numbered from 1.
  std::string context;
  std::vector<ConditionReport> sub_reports;

  std::optional<double> find(const std::string& key) const;
  /// Number of sub-reports (recursively) that fail.
  int failures() const;
};

inline constexpr double kRankTolerance = 1e-9;
inline constexpr double kDistributionTolerance = 1e-9;

/// Partial-pivoting rank; pivots count iff |pivot| > tol * max|m_ij|.
int numeric_rank(const SignalMatrix& m, double tol = kRankTolerance);

/// A_i over the 2^N public signals: one row per action of `firm`, others fixed at `profile`.
SignalMatrix individual_matrix(const Accuracy& monitor, const ActionProfile& profile, int firm);

ConditionReport individual_full_rank(const GameSpec& spec, int probe_firm, const ActionProfile& profile);
ConditionReport individual_full_rank(const Accuracy& monitor, int probe_firm, const ActionProfile& profile);

ConditionReport pairwise_full_rank(const GameSpec& spec, int firm_i, int firm_j, const ActionProfile& profile);
ConditionReport pairwise_full_rank(const Accuracy& monitor, int firm_i, int firm_j,
                                   const ActionProfile& profile);

/// (C1) at the minmax profile of `minmaxed_firm`. The accuracy overload
/// replaces the firms' monitoring without validation.
ConditionReport check_c1(const GameSpec& spec, int minmaxed_firm);
ConditionReport check_c1(const GameSpec& spec, const Accuracy& firms, int minmaxed_firm);

/// (C2), (C3) for the pair (i, j); ConditionInapplicable when N = 2.
ConditionReport check_c2(const GameSpec& spec, int firm_i, int firm_j, const ActionProfile& profile);
ConditionReport check_c3(const GameSpec& spec, int firm_i, int firm_j, const ActionProfile& profile);

/// Geometric cores of (C2) and (C3) with singleton Q sets {q_i}, {q_j}.
ConditionReport c2_from_distributions(const ProductDistribution& p, const ProductDistribution& q_i,
                                      const ProductDistribution& q_j);
ConditionReport c3_from_distributions(const ProductDistribution& p, const ProductDistribution& q_i,
                                      const ProductDistribution& q_j);

/// Pure profiles whose payoff vector is a vertex of the feasible hull, sorted.
std::vector<ActionProfile> extreme_profiles(const GameSpec& spec);

ConditionReport theorem_preconditions(const GameSpec& spec, Theorem theorem);

}  // namespace infoshare
