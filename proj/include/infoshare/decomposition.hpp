#pragma once

// Half-space decomposition: normalized continuation payoffs gamma_bar(b),
// maximal half-spaces k*(lambda) and the direction-sampled approximation of
// the limit equilibrium payoff set.
//
// All solves use the public monitor. gamma_bar is indexed by public-signal
// index (firm 1 in the least significant bit), then by firm.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infoshare/game.hpp"

namespace infoshare {

/// Nonzero direction lambda, stored as a unit vector; `scale()` keeps the input norm.
class Direction {
 public:
  explicit Direction(std::vector<double> lambda);

  const std::vector<double>& unit() const { return unit_; }
  double operator[](std::size_t i) const { return unit_[i]; }
  int size() const { return static_cast<int>(unit_.size()); }
  double scale() const { return scale_; }
  double dot(const std::vector<double>& v) const;

 private:
  std::vector<double> unit_;
  double scale_ = 1.0;
};

struct Kappa {
  double value = 0.0;
};

/// kappa = (1-eps)/eps - (1-alpha)/alpha; DomainError outside 0 < eps < 1/2 < alpha < 1.
Kappa kappa(double alpha, double epsilon);

struct ContinuationMap {
  ActionProfile action;
  Direction direction{std::vector<double>{1.0}};
  /// gamma_bar[b][i]
  std::vector<std::vector<double>> gamma_bar;
  /// k*(lambda; r) for the unit direction.
  double k_star = 0.0;
  /// k* in the units of the caller's (unnormalized) lambda.
  double k_star_raw = 0.0;
  /// v = u(r) + E[gamma_bar | r], the payoff this map decomposes in the limit.
  std::vector<double> value;
  std::vector<bool> binding;
  bool orthogonal = false;
};

/// Two-firm closed form (action (1,1), pin gamma_bar(1,1) = 0). Needs both
/// lambda components nonzero; otherwise DomainError pointing to the general solver.
std::vector<std::vector<double>> table2_gamma(double alpha, double epsilon, double L, const Direction& lambda);
ContinuationMap table2_closed_form(const GameSpec& spec, const Direction& lambda);

struct EnforceabilityOptions {
  /// Gauge fixing gamma_bar(pin_signal) parallel to lambda (zero when orthogonal).
  /// Defaults to the all-ones signal.
  bool pin = true;
  std::optional<std::uint64_t> pin_signal;
  /// Promised payoff v: imposes E[gamma_bar | r] = v - u(r). Orthogonal mode
  /// defaults to v = u(r).
  std::optional<std::vector<double>> target;
  /// Write every incentive constraint as an equality (general mode).
  bool bind_incentives = false;
};

struct EnforceabilityResult {
  bool enforceable = false;
  ContinuationMap map;  // meaningful only when enforceable
  /// Constraints involved when the system has no solution.
  std::vector<std::string> infeasible_constraints;
  double residual = 0.0;
};

/// Orthogonal mode solves lambda . gamma_bar(b) = 0 with binding incentive
/// constraints (minimum-norm solution); general mode solves the LP
/// max lambda . v  s.t.  lambda . gamma_bar(b) <= 0 and incentive constraints.
EnforceabilityResult solve_enforceability(const GameSpec& spec, const ActionProfile& r,
                                          const Direction& lambda, bool orthogonal,
                                          const EnforceabilityOptions& options = {});

struct KStarResult {
  double k = 0.0;
  double k_raw = 0.0;
  ActionProfile best_action;
  ContinuationMap map;
};

inline constexpr int kMaxKStarFirms = 8;

/// max_r k*(lambda; r) over all pure profiles, ties to the lexicographically smallest profile.
KStarResult k_star(const GameSpec& spec, const Direction& lambda);

struct HalfSpace {
  Direction lambda;
  double k = 0.0;  // {v : lambda . v <= k}
  ActionProfile best_action;
};

struct PayoffSetApprox {
  std::vector<HalfSpace> halfspaces;
  /// N = 2 only: counterclockwise vertices of the intersection.
  std::vector<std::vector<double>> polygon_vertices;
  bool empty_interior = false;
  double area = 0.0;
};

/// Directions 2*pi*k/n for N = 2; for N >= 3 the coordinate directions plus
/// deterministic pseudo-random unit vectors (half-spaces only).
PayoffSetApprox ppe_payoff_set(const GameSpec& spec, int n_directions);

struct DecompositionCheck {
  bool holds = false;
  /// v_i - (1-delta) u_i(r) - delta E[gamma_i | r]
  std::vector<double> equality_residual;
  /// Payoff from r minus payoff from the best deviation, per firm (>= 0 when enforced).
  std::vector<double> incentive_slack;
  /// Actual continuation promises gamma(b) = v + ((1-delta)/delta) gamma_bar(b).
  std::vector<std::vector<double>> continuations;
};

DecompositionCheck verify_decomposition(const GameSpec& spec, const std::vector<double>& v,
                                        const ActionProfile& r, const ContinuationMap& map, double delta);

/// P(b | r) under the public monitor, indexed by signal.
std::vector<double> public_signal_probs(const GameSpec& spec, const ActionProfile& r);

}  // namespace infoshare
