#pragma once

// Dense two-phase tableau simplex with Bland's rule.
//
// The problems solved here are small (at most a few thousand columns), so a
// dense tableau is adequate. The solver is templated on the scalar: with
// `double` it uses absolute tolerances, with an exact type (e.g. a GMP
// rational) every comparison is exact.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "infoshare/errors.hpp"

namespace infoshare {

enum class RowSense { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

/// maximize c'x subject to rows; each variable is either free or x_j >= 0.
template <class T>
struct LinearProgram {
  struct Row {
    std::vector<T> coeffs;
    RowSense sense = RowSense::LessEqual;
    T rhs{};
  };

  explicit LinearProgram(std::size_t num_vars, bool all_free = false)
      : objective(num_vars, T(0)), free_var(num_vars, all_free) {}

  std::size_t num_vars() const { return objective.size(); }

  void add_row(std::vector<T> coeffs, RowSense sense, T rhs) {
    if (coeffs.size() != num_vars()) throw DomainError("LP row has wrong length");
    rows.push_back({std::move(coeffs), sense, std::move(rhs)});
  }

  std::vector<T> objective;
  std::vector<bool> free_var;
  std::vector<Row> rows;
};

template <class T>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  T objective{};
  std::vector<T> x;
  int iterations = 0;
};

template <class T>
struct SimplexTolerances {
  T pivot;        // smallest entry accepted as a pivot / positive reduced cost
  T feasibility;  // phase-one residual regarded as zero
};

template <class T>
SimplexTolerances<T> default_tolerances() {
  if constexpr (std::is_floating_point_v<T>) {
    return {T(1e-11), T(1e-9)};
  } else {
    return {T(0), T(0)};
  }
}

namespace detail {

template <class T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_(rows * (cols + 1), T(0)), basis_(rows, 0) {}

  T& at(std::size_t r, std::size_t c) { return a_[r * (n_ + 1) + c]; }
  const T& at(std::size_t r, std::size_t c) const { return a_[r * (n_ + 1) + c]; }
  T& rhs(std::size_t r) { return at(r, n_); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const T inv = T(1) / at(pr, pc);
    for (std::size_t c = 0; c <= n_; ++c) at(pr, c) *= inv;
    at(pr, pc) = T(1);
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == pr) continue;
      const T f = at(r, pc);
      if (f == T(0)) continue;
      for (std::size_t c = 0; c <= n_; ++c) {
        if (at(pr, c) != T(0)) at(r, c) -= f * at(pr, c);
      }
      at(r, pc) = T(0);
    }
    basis_[pr] = pc;
  }

 private:
  std::size_t m_, n_;
  std::vector<T> a_;
  std::vector<std::size_t> basis_;
};

// Reduced costs d_j = c_j - c_B' B^-1 a_j for a maximization objective `cost`.
template <class T>
std::vector<T> reduced_costs(Tableau<T>& t, const std::vector<T>& cost) {
  std::vector<T> d(cost);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const T cb = cost[t.basis()[r]];
    if (cb == T(0)) continue;
    for (std::size_t c = 0; c < t.cols(); ++c) d[c] -= cb * t.at(r, c);
  }
  return d;
}

enum class PhaseOutcome { Optimal, Unbounded };

// Bland's rule: lowest-index improving column; ratio ties broken by lowest basic index.
template <class T>
PhaseOutcome run_phase(Tableau<T>& t, const std::vector<T>& cost, const std::vector<bool>& allowed,
                       const SimplexTolerances<T>& tol, int& iterations) {
  const std::size_t limit = 200 * (t.rows() + t.cols()) + 1000;
  std::vector<T> d = reduced_costs(t, cost);
  for (std::size_t it = 0; it < limit; ++it) {
    std::size_t enter = t.cols();
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (allowed[c] && d[c] > tol.pivot) {
        enter = c;
        break;
      }
    }
    if (enter == t.cols()) return PhaseOutcome::Optimal;

    std::size_t leave = t.rows();
    T best_ratio{};
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const T& coef = t.at(r, enter);
      if (!(coef > tol.pivot)) continue;
      const T ratio = t.rhs(r) / coef;
      if (leave == t.rows() || ratio < best_ratio ||
          (ratio == best_ratio && t.basis()[r] < t.basis()[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave == t.rows()) return PhaseOutcome::Unbounded;

    t.pivot(leave, enter);
    ++iterations;
    // Update reduced costs with the pivot row instead of recomputing.
    const T f = d[enter];
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (t.at(leave, c) != T(0)) d[c] -= f * t.at(leave, c);
    }
    d[enter] = T(0);
  }
  throw std::runtime_error("simplex iteration limit exceeded");
}

}  // namespace detail

template <class T>
LpResult<T> solve_lp(const LinearProgram<T>& lp,
                     const SimplexTolerances<T>& tol = default_tolerances<T>()) {
  const std::size_t nv = lp.num_vars();
  const std::size_t m = lp.rows.size();

  // Column layout: structural columns (free variables split into +/-), then
  // one slack/surplus per inequality row, then artificials.
  std::vector<std::size_t> pos_col(nv), neg_col(nv, static_cast<std::size_t>(-1));
  std::size_t ncols = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    pos_col[j] = ncols++;
    if (lp.free_var[j]) neg_col[j] = ncols++;
  }

  std::vector<int> sign(m, 1);
  std::vector<RowSense> sense(m);
  for (std::size_t r = 0; r < m; ++r) {
    sense[r] = lp.rows[r].sense;
    if (lp.rows[r].rhs < T(0)) {
      sign[r] = -1;
      if (sense[r] == RowSense::LessEqual) sense[r] = RowSense::GreaterEqual;
      else if (sense[r] == RowSense::GreaterEqual) sense[r] = RowSense::LessEqual;
    }
  }
  std::vector<std::size_t> slack_col(m, static_cast<std::size_t>(-1));
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] != RowSense::Equal) slack_col[r] = ncols++;
  }
  std::vector<std::size_t> art_col(m, static_cast<std::size_t>(-1));
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] != RowSense::LessEqual) art_col[r] = ncols++;
  }
  const std::size_t first_art = ncols - static_cast<std::size_t>(std::count_if(
                                            art_col.begin(), art_col.end(),
                                            [](std::size_t c) { return c != static_cast<std::size_t>(-1); }));

  detail::Tableau<T> t(m, ncols);
  for (std::size_t r = 0; r < m; ++r) {
    const T s(sign[r]);
    for (std::size_t j = 0; j < nv; ++j) {
      const T v = s * lp.rows[r].coeffs[j];
      if (v == T(0)) continue;
      t.at(r, pos_col[j]) = v;
      if (neg_col[j] != static_cast<std::size_t>(-1)) t.at(r, neg_col[j]) = -v;
    }
    t.rhs(r) = s * lp.rows[r].rhs;
    if (sense[r] == RowSense::LessEqual) {
      t.at(r, slack_col[r]) = T(1);
      t.basis()[r] = slack_col[r];
    } else {
      if (sense[r] == RowSense::GreaterEqual) t.at(r, slack_col[r]) = T(-1);
      t.at(r, art_col[r]) = T(1);
      t.basis()[r] = art_col[r];
    }
  }

  LpResult<T> result;
  std::vector<bool> allowed(ncols, true);

  if (first_art < ncols) {
    std::vector<T> phase1(ncols, T(0));
    for (std::size_t c = first_art; c < ncols; ++c) phase1[c] = T(-1);
    detail::run_phase(t, phase1, allowed, tol, result.iterations);
    T infeas(0);
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] >= first_art) infeas += t.rhs(r);
    }
    T rhs_scale(1);
    for (std::size_t r = 0; r < m; ++r) {
      T v = t.rhs(r) < T(0) ? -t.rhs(r) : t.rhs(r);
      if (v > rhs_scale) rhs_scale = v;
    }
    if (infeas > tol.feasibility * rhs_scale) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < first_art) continue;
      for (std::size_t c = 0; c < first_art; ++c) {
        const T& v = t.at(r, c);
        if (v > tol.pivot || v < -tol.pivot) {
          t.pivot(r, c);
          break;
        }
      }
    }
    for (std::size_t c = first_art; c < ncols; ++c) allowed[c] = false;
  }

  std::vector<T> cost(ncols, T(0));
  for (std::size_t j = 0; j < nv; ++j) {
    cost[pos_col[j]] = lp.objective[j];
    if (neg_col[j] != static_cast<std::size_t>(-1)) cost[neg_col[j]] = -lp.objective[j];
  }
  if (detail::run_phase(t, cost, allowed, tol, result.iterations) ==
      detail::PhaseOutcome::Unbounded) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  std::vector<T> col_value(ncols, T(0));
  for (std::size_t r = 0; r < m; ++r) col_value[t.basis()[r]] = t.rhs(r);
  result.x.assign(nv, T(0));
  for (std::size_t j = 0; j < nv; ++j) {
    result.x[j] = col_value[pos_col[j]];
    if (neg_col[j] != static_cast<std::size_t>(-1)) result.x[j] -= col_value[neg_col[j]];
  }
  result.objective = T(0);
  for (std::size_t j = 0; j < nv; ++j) result.objective += lp.objective[j] * result.x[j];
  result.status = LpStatus::Optimal;
  return result;
}

}  // namespace infoshare
