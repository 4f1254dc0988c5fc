#pragma once

// Repeated-game simulation: strategies, episodes, Monte Carlo replication and
// the promise-keeping automaton built on the half-space decomposition.
//
// Period t (0-based) runs: actions -> signals -> (private mode) messages.
// In private mode the messages are reduced to a public signal by drawing,
// for every suspect, one reporting tester from public randomness.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infoshare/decomposition.hpp"
#include "infoshare/game.hpp"
#include "infoshare/monitoring.hpp"
#include "infoshare/polytope.hpp"

namespace infoshare {

/// Reported beliefs about the other firms in increasing firm order; empty = no report.
using Message = std::vector<std::uint8_t>;

struct PublicHistory {
  /// Monitor signal (public mode) or message-derived signal (private mode), per period.
  std::vector<PublicSignal> signals;
  /// messages[t][i]; empty in public mode.
  std::vector<std::vector<Message>> messages;
  std::size_t length() const { return signals.size(); }
};

struct PrivateHistory {
  std::vector<std::uint8_t> own_actions;
  /// Own belief row per period (private mode only).
  std::vector<std::vector<std::uint8_t>> own_signals;
};

struct StrategyContext {
  const GameSpec* spec = nullptr;
  int firm = 0;
  int period = 0;
  MonitoringMode mode = MonitoringMode::Public;
};

struct PromiseState {
  std::vector<double> v;
  ActionProfile action;
  ContinuationMap map;
  /// max_i |v_i - (1-delta) u_i(r) - delta E[gamma_i(b) | r]|
  double identity_residual = 0.0;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  /// 1 = disclose, 0 = conceal; any other value is a protocol violation.
  virtual int next_action(const StrategyContext& ctx, const PublicHistory& pub, const PrivateHistory& priv) = 0;
  /// Private mode only. Default: report the latest own belief row verbatim.
  virtual Message next_message(const StrategyContext& ctx, const PrivateHistory& priv, const PublicHistory& pub);
  virtual std::unique_ptr<Strategy> clone() const = 0;
  /// Public strategies ignore the private history when choosing actions.
  virtual bool is_public() const { return true; }
  virtual std::string name() const = 0;
  /// Promise state for the period just chosen, if the strategy keeps one.
  virtual std::optional<PromiseState> promise() const { return std::nullopt; }
};

using StrategyPtr = std::unique_ptr<Strategy>;
using StrategyProfile = std::vector<StrategyPtr>;

StrategyProfile clone_profile(const StrategyProfile& s);

StrategyPtr always_disclose();
StrategyPtr always_conceal();
inline constexpr int kNeverTrigger = std::numeric_limits<int>::max();
/// Discloses until k cumulative zero bits have appeared in the public signals, then conceals forever.
StrategyPtr signal_trigger(int k);
/// Messages are the latest own belief row; actions come from `actions` (default: always disclose).
StrategyPtr truthful_report_strategy(StrategyPtr actions = nullptr);

/// Names accepted by make_strategy: always_disclose, always_conceal, signal_trigger:<k>, truthful.
std::vector<std::string> strategy_names();
StrategyPtr make_strategy(const std::string& name);

struct PromiseOptions {
  /// Halt with DiscountTooSmall when a promise leaves the clipped feasible hull.
  bool enforce_hull = true;
  double hull_tolerance = 1e-9;
};

/// One copy per firm; all copies evolve identically from the public history.
/// Throws DomainError when v0 is outside the clipped feasible hull or the
/// spec fails the public-monitoring preconditions.
StrategyProfile promise_automaton(const GameSpec& spec, const std::vector<double>& v0, const Direction& lambda,
                                  const PromiseOptions& options = {});

struct PeriodRecord {
  ActionProfile actions;
  /// Monitor signal (public) or message-derived signal (private).
  PublicSignal signal;
  std::optional<PrivateSignalMatrix> beliefs;
  std::vector<Message> messages;
  std::vector<double> payoffs;
  std::optional<std::vector<double>> promise;
  std::optional<double> identity_residual;
};

struct EpisodeTrace {
  int n_firms = 0;
  double discount = 0.0;
  MonitoringMode mode = MonitoringMode::Public;
  std::uint64_t seed = 0;
  std::vector<PeriodRecord> periods;

  /// (1-delta) sum_t delta^t u_i(t) over the recorded periods.
  std::vector<double> discounted_average() const;
  /// delta^T max|u|: bound on the omitted tail of the discounted average.
  double truncation_bound() const;
};

EpisodeTrace run_episode(const GameSpec& spec, const StrategyProfile& strategies, int horizon,
                         std::uint64_t seed, MonitoringMode mode = MonitoringMode::Public);

struct MonteCarloOptions {
  /// When false, a DiscountTooSmall in any replica propagates.
  bool record_halts = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct MonteCarloResult {
  std::vector<double> mean;
  std::vector<double> standard_error;
  std::vector<std::uint64_t> replica_seeds;
  /// Per-replica discounted averages (completed replicas only), in replica order.
  std::vector<std::vector<double>> replica_values;
  int halted = 0;
  double max_identity_residual = 0.0;
  double truncation_bound = 0.0;
};

MonteCarloResult monte_carlo(const GameSpec& spec, const StrategyProfile& strategies, int replicas, int horizon,
                             std::uint64_t base_seed, MonitoringMode mode = MonitoringMode::Public,
                             const MonteCarloOptions& options = {});

/// Ex-ante stage payoffs of every profile, indexed by profile index.
std::vector<std::vector<double>> payoff_table(const GameSpec& spec);

}  // namespace infoshare
