#include "infoshare/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "infoshare/conditions.hpp"
#include "infoshare/errors.hpp"
#include "infoshare/parallel.hpp"
#include "infoshare/rng.hpp"

namespace infoshare {

namespace {

class AlwaysDisclose final : public Strategy {
 public:
  int next_action(const StrategyContext&, const PublicHistory&, const PrivateHistory&) override { return 1; }
  StrategyPtr clone() const override { return std::make_unique<AlwaysDisclose>(*this); }
  std::string name() const override { return "always_disclose"; }
};

class AlwaysConceal final : public Strategy {
 public:
  int next_action(const StrategyContext&, const PublicHistory&, const PrivateHistory&) override { return 0; }
  StrategyPtr clone() const override { return std::make_unique<AlwaysConceal>(*this); }
  std::string name() const override { return "always_conceal"; }
};

class SignalTrigger final : public Strategy {
 public:
  explicit SignalTrigger(int k) : k_(k) {}
  int next_action(const StrategyContext&, const PublicHistory& pub, const PrivateHistory&) override {
    if (k_ == kNeverTrigger) return 1;
    // Only the periods added since the last call need counting.
    for (; seen_ < pub.signals.size(); ++seen_) {
      for (auto bit : pub.signals[seen_].bits) zeros_ += bit == 0 ? 1 : 0;
    }
    return zeros_ >= static_cast<long long>(k_) ? 0 : 1;
  }
  StrategyPtr clone() const override { return std::make_unique<SignalTrigger>(k_); }
  std::string name() const override {
    return k_ == kNeverTrigger ? "signal_trigger:inf" : "signal_trigger:" + std::to_string(k_);
  }

 private:
  int k_;
  std::size_t seen_ = 0;
  long long zeros_ = 0;
};

class TruthfulReporter final : public Strategy {
 public:
  explicit TruthfulReporter(StrategyPtr actions) : actions_(std::move(actions)) {}
  int next_action(const StrategyContext& ctx, const PublicHistory& pub, const PrivateHistory& priv) override {
    return actions_->next_action(ctx, pub, priv);
  }
  Message next_message(const StrategyContext&, const PrivateHistory& priv, const PublicHistory&) override {
    if (priv.own_signals.empty()) return {};
    return priv.own_signals.back();
  }
  StrategyPtr clone() const override { return std::make_unique<TruthfulReporter>(actions_->clone()); }
  bool is_public() const override { return actions_->is_public(); }
  std::string name() const override { return "truthful(" + actions_->name() + ")"; }

 private:
  StrategyPtr actions_;
};

// Immutable data shared by every copy of a promise automaton.
struct PromiseConfig {
  GameSpec spec;
  Direction lambda{std::vector<double>{1.0}};
  PromiseOptions options;
  PayoffPolytope hull;
  struct Candidate {
    ActionProfile action;
    std::vector<double> u;
    double lambda_u = 0.0;
    std::vector<double> probs;
    std::vector<std::vector<double>> gamma0;  // orthogonal map decomposing u itself
  };
  std::vector<Candidate> candidates;  // by lambda . u descending, then lexicographic
};

class PromiseAutomaton final : public Strategy {
 public:
  PromiseAutomaton(std::shared_ptr<const PromiseConfig> cfg, std::vector<double> v0)
      : cfg_(std::move(cfg)), v_(std::move(v0)) {}

  int next_action(const StrategyContext& ctx, const PublicHistory& pub, const PrivateHistory&) override {
    const double delta = cfg_->spec.discount;
    const double w = (1.0 - delta) / delta;
    for (; processed_ < pub.signals.size(); ++processed_) {
      const auto& gbar = state_->map.gamma_bar[pub.signals[processed_].index()];
      std::vector<double> next(v_);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += w * gbar[i];
      if (cfg_->options.enforce_hull) {
        min_step_ = std::min(min_step_, max_step_inside(cfg_->hull, v_, gbar));
        if (!cfg_->hull.contains(next, cfg_->options.hull_tolerance)) {
          throw DiscountTooSmall("promised continuation left the clipped feasible hull in period " +
                                     std::to_string(processed_),
                                 static_cast<int>(processed_), 1.0 / (1.0 + min_step_));
        }
      }
      v_ = std::move(next);
    }
    if (!state_ || chosen_for_ != ctx.period) {
      choose();
      chosen_for_ = ctx.period;
    }
    return state_->action.discloses(ctx.firm) ? 1 : 0;
  }

  StrategyPtr clone() const override { return std::make_unique<PromiseAutomaton>(*this); }
  std::string name() const override { return "promise"; }
  std::optional<PromiseState> promise() const override { return state_; }

 private:
  void choose() {
    const double lv = cfg_->lambda.dot(v_);
    const PromiseConfig::Candidate* pick = nullptr;
    for (const auto& c : cfg_->candidates) {
      if (c.lambda_u >= lv - 1e-12) {
        pick = &c;
        break;
      }
    }
    if (!pick) {
      if (cfg_->options.enforce_hull) {
        throw DomainError("no orthogonally enforceable profile supports the promise in this direction");
      }
      pick = &cfg_->candidates.front();
    }
    const double delta = cfg_->spec.discount;
    const double w = (1.0 - delta) / delta;
    PromiseState st;
    st.v = v_;
    st.action = pick->action;
    st.map.action = pick->action;
    st.map.direction = cfg_->lambda;
    st.map.value = v_;
    st.map.k_star = cfg_->lambda.dot(pick->u);
    st.map.k_star_raw = st.map.k_star * cfg_->lambda.scale();
    st.map.orthogonal = true;
    // Shifting the orthogonal map by v - u(r) keeps every incentive constraint
    // and moves E[gamma_bar | r] from 0 to v - u(r).
    st.map.gamma_bar = pick->gamma0;
    for (auto& g : st.map.gamma_bar) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += v_[i] - pick->u[i];
    }
    for (std::size_t i = 0; i < v_.size(); ++i) {
      double cont = 0.0;
      for (std::size_t b = 0; b < pick->probs.size(); ++b) cont += pick->probs[b] * (v_[i] + w * st.map.gamma_bar[b][i]);
      st.identity_residual = std::max(st.identity_residual, std::abs(v_[i] - (1.0 - delta) * pick->u[i] - delta * cont));
    }
    state_ = std::move(st);
  }

  std::shared_ptr<const PromiseConfig> cfg_;
  std::vector<double> v_;
  std::optional<PromiseState> state_;
  std::size_t processed_ = 0;
  int chosen_for_ = -1;
  double min_step_ = std::numeric_limits<double>::infinity();
};

void check_strategies(const GameSpec& spec, const StrategyProfile& s) {
  if (static_cast<int>(s.size()) != spec.n_firms) throw DomainError("need exactly one strategy per firm");
  for (const auto& p : s) {
    if (!p) throw DomainError("null strategy");
  }
}

PublicSignal reduce_messages(const std::vector<Message>& msgs, int n, std::uint64_t seed, std::uint32_t period) {
  PublicSignal s;
  for (int j = 0; j < n; ++j) {
    std::vector<int> testers;
    for (int k = 0; k < n; ++k) {
      if (k != j && !msgs[static_cast<std::size_t>(k)].empty()) testers.push_back(k);
    }
    if (testers.empty()) {
      s.bits.push_back(1);  // nobody reported: no evidence against j
      continue;
    }
    PhiloxStream rng({seed, period, static_cast<std::uint32_t>(j), StreamPurpose::Tester});
    const int k = testers[rng.below(testers.size())];
    s.bits.push_back(msgs[static_cast<std::size_t>(k)][static_cast<std::size_t>(j < k ? j : j - 1)]);
  }
  return s;
}

}  // namespace

Message Strategy::next_message(const StrategyContext&, const PrivateHistory& priv, const PublicHistory&) {
  if (priv.own_signals.empty()) return {};
  return priv.own_signals.back();
}

StrategyProfile clone_profile(const StrategyProfile& s) {
  StrategyProfile out;
  for (const auto& p : s) out.push_back(p ? p->clone() : nullptr);
  return out;
}

StrategyPtr always_disclose() { return std::make_unique<AlwaysDisclose>(); }
StrategyPtr always_conceal() { return std::make_unique<AlwaysConceal>(); }

StrategyPtr signal_trigger(int k) {
  if (k < 1) throw DomainError("signal_trigger needs k >= 1");
  return std::make_unique<SignalTrigger>(k);
}

StrategyPtr truthful_report_strategy(StrategyPtr actions) {
  return std::make_unique<TruthfulReporter>(actions ? std::move(actions) : always_disclose());
}

std::vector<std::string> strategy_names() {
  return {"always_disclose", "always_conceal", "signal_trigger:<k|inf>", "truthful", "promise"};
}

StrategyPtr make_strategy(const std::string& name) {
  if (name == "always_disclose") return always_disclose();
  if (name == "always_conceal") return always_conceal();
  if (name == "truthful") return truthful_report_strategy();
  const std::string prefix = "signal_trigger:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string arg = name.substr(prefix.size());
    if (arg == "inf") return signal_trigger(kNeverTrigger);
    int k = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec == std::errc() && ptr == arg.data() + arg.size() && k >= 1) return signal_trigger(k);
  }
  throw DomainError("unknown strategy '" + name + "'");
}

StrategyProfile promise_automaton(const GameSpec& spec, const std::vector<double>& v0, const Direction& lambda,
                                  const PromiseOptions& options) {
  validate(spec);
  const int n = spec.n_firms;
  if (lambda.size() != n || v0.size() != static_cast<std::size_t>(n)) {
    throw DomainError("promise and direction must have n_firms components");
  }
  auto cfg = std::make_shared<PromiseConfig>();
  cfg->spec = spec;
  cfg->lambda = lambda;
  cfg->options = options;
  cfg->hull = feasible_hull(spec, true);
  if (!cfg->hull.contains(v0, options.hull_tolerance)) {
    throw DomainError("initial promise lies outside the clipped feasible hull");
  }
  if (!theorem_preconditions(spec, Theorem::FLM).holds) {
    throw DomainError("spec fails the public-monitoring folk-theorem preconditions");
  }
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
    const auto r = ActionProfile::from_index(idx, n);
    const auto res = solve_enforceability(spec, r, lambda, true);
    if (!res.enforceable) continue;
    PromiseConfig::Candidate c;
    c.action = r;
    c.u = profile_payoff(spec, r);
    c.lambda_u = lambda.dot(c.u);
    c.probs = public_signal_probs(spec, r);
    c.gamma0 = res.map.gamma_bar;
    cfg->candidates.push_back(std::move(c));
  }
  std::sort(cfg->candidates.begin(), cfg->candidates.end(), [](const auto& a, const auto& b) {
    if (a.lambda_u != b.lambda_u) return a.lambda_u > b.lambda_u;
    return a.action < b.action;
  });
  const double lv = lambda.dot(v0);
  if (cfg->candidates.empty() || cfg->candidates.front().lambda_u < lv - 1e-12) {
    throw DomainError("no orthogonally enforceable profile supports v0 in this direction");
  }
  std::shared_ptr<const PromiseConfig> shared = cfg;
  StrategyProfile out;
  for (int i = 0; i < n; ++i) out.push_back(std::make_unique<PromiseAutomaton>(shared, v0));
  return out;
}

std::vector<double> EpisodeTrace::discounted_average() const {
  std::vector<double> avg(static_cast<std::size_t>(n_firms), 0.0);
  double weight = 1.0 - discount;
  for (const auto& p : periods) {
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += weight * p.payoffs[i];
    weight *= discount;
  }
  return avg;
}

double EpisodeTrace::truncation_bound() const {
  double umax = 0.0;
  for (const auto& p : periods) {
    for (double u : p.payoffs) umax = std::max(umax, std::abs(u));
  }
  return std::pow(discount, static_cast<double>(periods.size())) * umax;
}

std::vector<std::vector<double>> payoff_table(const GameSpec& spec) {
  if (spec.n_firms > 16) throw CapacityError("payoff table enumerates 2^N profiles; N must be <= 16");
  std::vector<std::vector<double>> t;
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << spec.n_firms); ++idx) {
    t.push_back(profile_payoff(spec, ActionProfile::from_index(idx, spec.n_firms)));
  }
  return t;
}

EpisodeTrace run_episode(const GameSpec& spec, const StrategyProfile& strategies, int horizon,
                         std::uint64_t seed, MonitoringMode mode) {
  validate(spec);
  check_strategies(spec, strategies);
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  const int n = spec.n_firms;
  StrategyProfile players = clone_profile(strategies);

  EpisodeTrace trace;
  trace.n_firms = n;
  trace.discount = spec.discount;
  trace.mode = mode;
  trace.seed = seed;
  trace.periods.reserve(static_cast<std::size_t>(horizon));

  PublicHistory pub;
  std::vector<PrivateHistory> priv(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));

  for (int t = 0; t < horizon; ++t) {
    const auto period = static_cast<std::uint32_t>(t);
    for (int i = 0; i < n; ++i) {
      const StrategyContext ctx{&spec, i, t, mode};
      const int a = players[static_cast<std::size_t>(i)]->next_action(ctx, pub, priv[static_cast<std::size_t>(i)]);
      if (a != 0 && a != 1) throw ProtocolError("action must be 0 or 1", i, t);
      bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(a);
    }
    PeriodRecord rec;
    rec.actions = ActionProfile(bits);
    rec.payoffs = profile_payoff(spec, rec.actions);
    if (auto st = players.front()->promise()) {
      rec.promise = st->v;
      rec.identity_residual = st->identity_residual;
    }
    for (int i = 0; i < n; ++i) priv[static_cast<std::size_t>(i)].own_actions.push_back(bits[static_cast<std::size_t>(i)]);

    if (mode == MonitoringMode::Public) {
      PhiloxStream rng({seed, period, kMonitorStream, StreamPurpose::Signal});
      rec.signal = sample_public_signal(spec.monitor_accuracy(), rec.actions, rng);
    } else {
      PrivateSignalMatrix m = sample_private_signals(spec.firm_accuracy(), rec.actions, seed, period);
      for (int i = 0; i < n; ++i) priv[static_cast<std::size_t>(i)].own_signals.push_back(m.row(i));
      for (int i = 0; i < n; ++i) {
        const StrategyContext ctx{&spec, i, t, mode};
        Message msg = players[static_cast<std::size_t>(i)]->next_message(ctx, priv[static_cast<std::size_t>(i)], pub);
        const bool valid = msg.empty() || (msg.size() == static_cast<std::size_t>(n - 1) &&
                                           std::all_of(msg.begin(), msg.end(), [](std::uint8_t b) { return b <= 1; }));
        if (!valid) throw ProtocolError("message must be empty or N-1 binary beliefs", i, t);
        rec.messages.push_back(std::move(msg));
      }
      rec.signal = reduce_messages(rec.messages, n, seed, period);
      rec.beliefs = std::move(m);
      pub.messages.push_back(rec.messages);
    }
    pub.signals.push_back(rec.signal);
    trace.periods.push_back(std::move(rec));
  }
  return trace;
}

MonteCarloResult monte_carlo(const GameSpec& spec, const StrategyProfile& strategies, int replicas, int horizon,
                             std::uint64_t base_seed, MonitoringMode mode, const MonteCarloOptions& options) {
  validate(spec);
  check_strategies(spec, strategies);
  if (replicas < 1) throw DomainError("replicas must be at least 1");
  const auto count = static_cast<std::size_t>(replicas);

  struct Slot {
    std::optional<std::vector<double>> value;
    double residual = 0.0;
    double bound = 0.0;
  };
  std::vector<Slot> slots(count);
  MonteCarloResult out;
  for (std::size_t r = 0; r < count; ++r) out.replica_seeds.push_back(derive_seed(base_seed, r));

  parallel_for(
      count,
      [&](std::size_t r) {
        try {
          const auto trace = run_episode(spec, strategies, horizon, out.replica_seeds[r], mode);
          slots[r].value = trace.discounted_average();
          slots[r].bound = trace.truncation_bound();
          for (const auto& p : trace.periods) slots[r].residual = std::max(slots[r].residual, p.identity_residual.value_or(0.0));
        } catch (const DiscountTooSmall&) {
          if (!options.record_halts) throw;
        }
      },
      options.threads);

  const auto n = static_cast<std::size_t>(spec.n_firms);
  out.mean.assign(n, 0.0);
  out.standard_error.assign(n, 0.0);
  for (const auto& s : slots) {
    if (!s.value) {
      ++out.halted;
      continue;
    }
    out.replica_values.push_back(*s.value);
    out.max_identity_residual = std::max(out.max_identity_residual, s.residual);
    out.truncation_bound = std::max(out.truncation_bound, s.bound);
  }
  const double k = static_cast<double>(out.replica_values.size());
  if (k == 0) return out;
  for (const auto& v : out.replica_values) {
    for (std::size_t i = 0; i < n; ++i) out.mean[i] += v[i];
  }
  for (auto& m : out.mean) m /= k;
  if (k > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      double ss = 0.0;
      for (const auto& v : out.replica_values) ss += (v[i] - out.mean[i]) * (v[i] - out.mean[i]);
      out.standard_error[i] = std::sqrt(ss / (k - 1.0) / k);
    }
  }
  return out;
}

}  // namespace infoshare
