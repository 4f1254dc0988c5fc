#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "infoshare/decomposition.hpp"
#include "infoshare/engine.hpp"
#include "infoshare/errors.hpp"

using namespace infoshare;
using testing::P;

namespace {

StrategyProfile uniform_profile(int n, const std::string& name) {
  StrategyProfile s;
  for (int i = 0; i < n; ++i) s.push_back(make_strategy(name));
  return s;
}

class Erratic final : public Strategy {
 public:
  explicit Erratic(int action) : action_(action) {}
  int next_action(const StrategyContext&, const PublicHistory&, const PrivateHistory&) override { return action_; }
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<Erratic>(*this); }
  std::string name() const override { return "erratic"; }

 private:
  int action_;
};

class BadMessenger final : public Strategy {
 public:
  int next_action(const StrategyContext&, const PublicHistory&, const PrivateHistory&) override { return 1; }
  Message next_message(const StrategyContext&, const PrivateHistory&, const PublicHistory&) override { return {1}; }
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<BadMessenger>(*this); }
  std::string name() const override { return "bad_messenger"; }
};

}  // namespace

TEST_CASE("constant strategies produce constant payoffs") {
  const auto s = linear_game(3, 1.0, 1.0, 0.9, 0.1, 0.9);
  const auto tr = run_episode(s, uniform_profile(3, "always_disclose"), 3, 1);
  REQUIRE(tr.periods.size() == 3);
  for (const auto& p : tr.periods) CHECK(p.payoffs == std::vector<double>(3, cooperator_payoff(s, 3)));

  const auto zero = run_episode(s, uniform_profile(3, "always_conceal"), 50, 1);
  for (double v : zero.discounted_average()) CHECK(v == 0.0);

  StrategyProfile mixed;
  mixed.push_back(always_conceal());
  mixed.push_back(always_disclose());
  mixed.push_back(always_disclose());
  const auto m = run_episode(s, mixed, 5, 2);
  for (const auto& p : m.periods) {
    CHECK(p.payoffs[0] == deviator_payoff(s, 2));
    CHECK(p.payoffs[1] == cooperator_payoff(s, 2));
  }
}

TEST_CASE("replay determinism and discounted recomputation") {
  const auto g = testing::example_two_firm(0.9, 0.1, 0.95);
  for (auto mode : {MonitoringMode::Public, MonitoringMode::Private}) {
    StrategyProfile s;
    s.push_back(signal_trigger(3));
    s.push_back(truthful_report_strategy(signal_trigger(5)));
    const auto a = run_episode(g, s, 200, 42, mode);
    const auto b = run_episode(g, s, 200, 42, mode);
    REQUIRE(a.periods.size() == b.periods.size());
    for (std::size_t t = 0; t < a.periods.size(); ++t) {
      CHECK(a.periods[t].actions == b.periods[t].actions);
      CHECK(a.periods[t].signal == b.periods[t].signal);
      CHECK(a.periods[t].messages == b.periods[t].messages);
    }
    const auto c = run_episode(g, s, 200, 43, mode);
    bool differs = false;
    for (std::size_t t = 0; t < a.periods.size(); ++t) differs = differs || !(a.periods[t].signal == c.periods[t].signal);
    CHECK(differs);

    std::vector<double> manual(2, 0.0);
    double w = 1.0;
    for (const auto& p : a.periods) {
      for (std::size_t i = 0; i < 2; ++i) manual[i] += (1 - g.discount) * w * p.payoffs[i];
      w *= g.discount;
    }
    const auto avg = a.discounted_average();
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(avg[i] - manual[i]) <= 1e-12);
    CHECK(a.truncation_bound() == doctest::Approx(std::pow(0.95, 200) * 3.0));
  }
}

TEST_CASE("signal trigger strategies") {
  const auto g = testing::example_two_firm(0.9, 0.1, 0.9);
  const auto never = run_episode(g, uniform_profile(2, "signal_trigger:inf"), 300, 5);
  const auto always = run_episode(g, uniform_profile(2, "always_disclose"), 300, 5);
  for (std::size_t t = 0; t < 300; ++t) CHECK(never.periods[t].actions == always.periods[t].actions);

  // False alarms eventually trigger punishment even under full cooperation.
  const auto tr = run_episode(g, uniform_profile(2, "signal_trigger:1"), 500, 5);
  CHECK(tr.periods.back().actions == P({0, 0}));
  CHECK_THROWS_AS(make_strategy("signal_trigger:-1"), DomainError);
  CHECK_THROWS_AS(make_strategy("nonsense"), DomainError);
  CHECK(strategy_names().size() >= 4);
}

TEST_CASE("public strategies ignore private histories") {
  const auto g = linear_game(3, 1.0, 1.0, 0.8, 0.2, 0.95);
  std::mt19937_64 rng(71);
  std::vector<StrategyPtr> publics;
  publics.push_back(always_disclose());
  publics.push_back(always_conceal());
  publics.push_back(signal_trigger(2));
  publics.push_back(signal_trigger(7));
  const auto auto_profile = promise_automaton(linear_game(2, 3, 1, 0.9, 0.1, 0.99), {1.0, 1.0}, Direction({1, 1}));
  for (int fuzz = 0; fuzz < 200; ++fuzz) {
    PublicHistory pub;
    const int len = static_cast<int>(rng() % 12);
    for (int t = 0; t < len; ++t) pub.signals.push_back(PublicSignal::from_index(rng() % 8, 3));
    PrivateHistory a, b;
    for (int t = 0; t < len; ++t) {
      a.own_actions.push_back(rng() & 1);
      b.own_actions.push_back(rng() & 1);
      a.own_signals.push_back({static_cast<std::uint8_t>(rng() & 1), static_cast<std::uint8_t>(rng() & 1)});
      b.own_signals.push_back({static_cast<std::uint8_t>(rng() & 1), static_cast<std::uint8_t>(rng() & 1)});
    }
    const StrategyContext ctx{&g, static_cast<int>(rng() % 3), len, MonitoringMode::Private};
    for (const auto& s : publics) {
      REQUIRE(s->is_public());
      CHECK(s->clone()->next_action(ctx, pub, a) == s->clone()->next_action(ctx, pub, b));
    }
  }
  CHECK(auto_profile.front()->is_public());
}

TEST_CASE("truthful messages") {
  auto s = truthful_report_strategy();
  const auto g = testing::example_two_firm();
  const StrategyContext ctx{&g, 0, 0, MonitoringMode::Private};
  PrivateHistory priv;
  CHECK(s->next_message(ctx, priv, {}).empty());
  priv.own_signals.push_back({1});
  priv.own_signals.push_back({0});
  CHECK(s->next_message(ctx, priv, {}) == Message{0});

  // With every firm truthful, the published messages are the belief matrices.
  const auto s3 = linear_game(3, 1.0, 1.0, 0.9, 0.1, 0.9);
  const auto tr = run_episode(s3, uniform_profile(3, "truthful"), 50, 8, MonitoringMode::Private);
  for (const auto& p : tr.periods) {
    REQUIRE(p.beliefs.has_value());
    for (int i = 0; i < 3; ++i) CHECK(p.messages[static_cast<std::size_t>(i)] == p.beliefs->row(i));
  }
}

TEST_CASE("message-derived bits follow the monitoring kernel") {
  const double eps = 0.15;
  const auto s = linear_game(3, 1.0, 1.0, 0.8, eps, 0.9);
  const int T = 10000;
  const auto tr = run_episode(s, uniform_profile(3, "truthful"), T, 2024, MonitoringMode::Private);
  double chi2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    int zeros = 0;
    for (const auto& p : tr.periods) zeros += p.signal.bits[static_cast<std::size_t>(j)] == 0;
    const double mean = T * eps, sd = std::sqrt(T * eps * (1 - eps));
    CHECK(std::abs(zeros - mean) <= 3 * sd);
    chi2 += (zeros - mean) * (zeros - mean) / mean + (zeros - mean) * (zeros - mean) / (T - mean);
  }
  // Three independent 1-dof statistics: mean 3, sd sqrt(6).
  CHECK(chi2 <= 3 + 3 * std::sqrt(6.0));

  // The same holds for a concealing suspect (kernel alpha).
  StrategyProfile mix;
  mix.push_back(truthful_report_strategy(always_conceal()));
  mix.push_back(truthful_report_strategy());
  mix.push_back(truthful_report_strategy());
  const auto tc = run_episode(s, mix, T, 7, MonitoringMode::Private);
  int zeros = 0;
  for (const auto& p : tc.periods) zeros += p.signal.bits[0] == 0;
  CHECK(std::abs(zeros - T * 0.8) <= 3 * std::sqrt(T * 0.8 * 0.2));
}

TEST_CASE("public signal frequencies over an episode") {
  const auto g = testing::example_two_firm(0.9, 0.1, 0.9);
  const int T = 10000;
  const auto tr = run_episode(g, uniform_profile(2, "always_disclose"), T, 99);
  const std::vector<double> p{0.01, 0.09, 0.09, 0.81};
  std::vector<int> counts(4, 0);
  for (const auto& rec : tr.periods) ++counts[rec.signal.index()];
  for (std::size_t b = 0; b < 4; ++b) CHECK(std::abs(counts[b] - T * p[b]) <= 3 * std::sqrt(T * p[b] * (1 - p[b])));
}

TEST_CASE("protocol violations") {
  const auto g = testing::example_two_firm();
  StrategyProfile s;
  s.push_back(std::make_unique<Erratic>(2));
  s.push_back(always_disclose());
  CHECK_THROWS_AS(run_episode(g, s, 3, 1), ProtocolError);
  try {
    run_episode(g, s, 3, 1);
  } catch (const ProtocolError& e) {
    CHECK(e.firm() == 0);
    CHECK(e.period() == 0);
  }
  StrategyProfile t;
  t.push_back(std::make_unique<BadMessenger>());
  t.push_back(always_disclose());
  t.push_back(always_disclose());
  CHECK_THROWS_AS(run_episode(linear_game(3, 1, 1, 0.9, 0.1), t, 3, 1, MonitoringMode::Private), ProtocolError);
  StrategyProfile short_profile;
  short_profile.push_back(always_disclose());
  CHECK_THROWS_AS(run_episode(g, short_profile, 3, 1), DomainError);
}

TEST_CASE("Monte Carlo") {
  const auto g = testing::example_two_firm(0.9, 0.1, 0.9);
  const auto strategies = uniform_profile(2, "signal_trigger:2");
  const auto one = monte_carlo(g, strategies, 1, 100, 5);
  const auto direct = run_episode(g, strategies, 100, derive_seed(5, 0));
  CHECK(one.mean == direct.discounted_average());

  const auto zero = monte_carlo(g, uniform_profile(2, "always_conceal"), 50, 20, 3);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(zero.mean[i] == 0.0);
    CHECK(zero.standard_error[i] == 0.0);
  }

  MonteCarloOptions serial;
  serial.threads = 1;
  const auto a = monte_carlo(g, strategies, 64, 100, 11, MonitoringMode::Public, serial);
  const auto b = monte_carlo(g, strategies, 64, 100, 11);
  CHECK(a.mean == b.mean);
  CHECK(a.replica_values == b.replica_values);
}

TEST_CASE("promise automaton") {
  const auto g = linear_game(2, 3.0, 1.0, 0.9, 0.1, 0.99);
  SUBCASE("the recursion identity holds every period") {
    // Off u(r) the promise drifts away from u(r) by (1-delta)/delta per period, so let it leave the hull.
    PromiseOptions free_run;
    free_run.enforce_hull = false;
    const auto s = promise_automaton(g, {1.0, 1.2}, Direction({1, 1}), free_run);
    const auto tr = run_episode(g, s, 300, 4);
    for (const auto& p : tr.periods) {
      REQUIRE(p.identity_residual.has_value());
      CHECK(*p.identity_residual <= 1e-9);
      REQUIRE(p.promise.has_value());
    }
  }
  SUBCASE("an interior promise below u(r) eventually leaves the hull") {
    const auto s = promise_automaton(g, {1.0, 1.2}, Direction({1, 1}));
    CHECK_THROWS_AS(run_episode(g, s, 2000, 4), DiscountTooSmall);
  }
  SUBCASE("impatient players leave the hull") {
    const auto s = promise_automaton(linear_game(2, 3.0, 1.0, 0.9, 0.1, 0.5), {2.0, 2.0}, Direction({1, 1}));
    CHECK_THROWS_AS(run_episode(linear_game(2, 3.0, 1.0, 0.9, 0.1, 0.5), s, 2000, 1), DiscountTooSmall);
    try {
      run_episode(linear_game(2, 3.0, 1.0, 0.9, 0.1, 0.5), s, 2000, 1);
    } catch (const DiscountTooSmall& e) {
      CHECK(e.suggested_discount() > 0.5);
      CHECK(e.suggested_discount() <= 1.0);
    }
  }
  SUBCASE("promises outside the hull are rejected") {
    CHECK_THROWS_AS(promise_automaton(g, {3.0, 3.0}, Direction({1, 1})), DomainError);
    CHECK_THROWS_AS(promise_automaton(g, {-0.5, 1.0}, Direction({1, 1})), DomainError);
  }
}

TEST_CASE("payoff table") {
  const auto t = payoff_table(testing::example_two_firm());
  REQUIRE(t.size() == 4);
  CHECK(t[1] == std::vector<double>{-1.0, 3.0});
  CHECK(t[3] == std::vector<double>{2.0, 2.0});
}
