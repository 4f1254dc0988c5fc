#pragma once

// Feasible payoff set F-dagger (convex hull of pure-profile payoffs) and its
// closed individually rational part {v in F-dagger : v_i >= 0}.

#include <optional>
#include <vector>

#include "infoshare/game.hpp"

namespace infoshare {

/// normal . x <= offset
struct LinearConstraint {
  std::vector<double> normal;
  double offset = 0.0;
};

struct PayoffPolytope {
  int n = 0;
  std::vector<std::vector<double>> vertices;
  /// Pure profiles whose payoff equals each vertex; empty for vertices created by clipping.
  std::vector<std::vector<ActionProfile>> vertex_profiles;
  bool is_clipped_to_ir = false;
  /// H-description (may contain redundant rows) when available: always for a
  /// full-dimensional N = 2 polygon, for N <= 5 otherwise.
  std::optional<std::vector<LinearConstraint>> inequalities;
  /// Affine dimension of the vertex set.
  int affine_dimension = 0;

  /// Sup-norm distance from `point` to the polytope (0 inside, up to solver precision).
  double distance_linf(const std::vector<double>& point) const;
  bool contains(const std::vector<double>& point, double tol = 1e-9) const;
  bool full_dimensional() const { return affine_dimension == n; }
};

/// Profiles are enumerated exhaustively, so N <= 16 (CapacityError beyond).
/// Clipping for N >= 3 needs the facet description and is limited to N <= 5.
PayoffPolytope feasible_hull(const GameSpec& spec, bool clip_to_ir);

/// True iff `point` is not a convex combination of `others` (LP feasibility).
bool is_extreme_point(const std::vector<double>& point,
                      const std::vector<std::vector<double>>& others, double tol = 1e-9);

/// Largest t >= 0 with from + t * dir inside the polytope (capped at t_max).
double max_step_inside(const PayoffPolytope& poly, const std::vector<double>& from,
                       const std::vector<double>& dir, double t_max = 1e6);

}  // namespace infoshare
