#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "infoshare/errors.hpp"
#include "infoshare/monitoring.hpp"

using namespace infoshare;
using testing::P;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Marginal of bit k (P(bit = 0)) computed by summing the explicit table.
double bit_zero_marginal(const SignalDistribution& d, int k) {
  double p = 0.0;
  for (std::size_t x = 0; x < d.probs.size(); ++x) {
    if (((x >> k) & 1U) == 0) p += d.probs[x];
  }
  return p;
}

}  // namespace

TEST_CASE("belief kernel") {
  CHECK(belief_kernel(true, 0.9, 0.1) == 0.1);
  CHECK(belief_kernel(false, 0.9, 0.1) == 0.9);
  CHECK(belief_kernel(true, 1.0, 0.0) == 0.0);
  CHECK(boundary_accuracy({1.0, 0.0}));
  CHECK_FALSE(boundary_accuracy({0.9, 0.1}));
  CHECK_THROWS_AS(belief_kernel(true, 0.4, 0.1), DomainError);
  CHECK_THROWS_AS(belief_kernel(true, 0.9, 0.5), DomainError);
  CHECK_THROWS_AS(linear_game(2, 3, 1, 1.0, 0.0), DomainError);
}

TEST_CASE("public signal distribution for two firms") {
  const auto g = testing::example_two_firm();
  const auto d11 = public_signal_distribution(g, P({1, 1}));
  const std::vector<double> e11{0.01, 0.09, 0.09, 0.81};
  const auto d01 = public_signal_distribution(g, P({0, 1}));
  const std::vector<double> e01{0.09, 0.01, 0.81, 0.09};
  for (std::size_t b = 0; b < 4; ++b) {
    CHECK(d11.probs[b] == doctest::Approx(e11[b]).epsilon(1e-14));
    CHECK(d01.probs[b] == doctest::Approx(e01[b]).epsilon(1e-14));
  }
  CHECK(PublicSignal{{1, 0}}.index() == 1);
  CHECK(PublicSignal{{0, 1}}.index() == 2);
  CHECK(PublicSignal::from_index(5, 3) == PublicSignal{{1, 0, 1}});
}

TEST_CASE("public distributions normalize, have full support and factorize") {
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 8; ++n) {
    const auto [a, e] = testing::random_accuracy(rng);
    const auto s = linear_game(n, 1.0, 1.0, a, e);
    for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
      const auto r = ActionProfile::from_index(idx, n);
      const auto d = public_signal_distribution(s, r);
      CHECK(std::abs(sum(d.probs) - 1.0) <= 1e-12);
      CHECK(d.full_support());
      for (int j = 0; j < n; ++j) {
        CHECK(bit_zero_marginal(d, j) == doctest::Approx(belief_kernel(r.discloses(j), a, e)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("monitor override is used by the public distribution only") {
  auto s = linear_game(2, 3, 1, 0.9, 0.1);
  s.monitor = Accuracy{0.7, 0.2};
  const auto d = public_signal_distribution(s, P({1, 1}));
  CHECK(bit_zero_marginal(d, 0) == doctest::Approx(0.2));
  const auto pj = private_joint_distribution(s, P({1, 1}));
  CHECK(pj.p_zero[0] == doctest::Approx(0.1));
}

TEST_CASE("private joint distribution") {
  const auto s = linear_game(3, 1.0, 1.0, 0.9, 0.1);
  const auto r = P({1, 0, 0});
  const auto f = private_joint_distribution(s, r);
  REQUIRE(f.bits() == 6);
  for (int k = 0; k < f.bits(); ++k) {
    const auto& l = f.labels[static_cast<std::size_t>(k)];
    CHECK(f.p_zero[static_cast<std::size_t>(k)] == belief_kernel(r.discloses(l.observed), 0.9, 0.1));
    if (l.observer == 1 && l.observed == 0) CHECK(f.p_zero[static_cast<std::size_t>(k)] == 0.1);
    if (l.observer == 0 && l.observed == 1) CHECK(f.p_zero[static_cast<std::size_t>(k)] == 0.9);
    if (l.observer == 0 && l.observed == 2) CHECK(f.p_zero[static_cast<std::size_t>(k)] == 0.9);
  }
  for (int n = 2; n <= 4; ++n) {
    const auto sn = linear_game(n, 1.0, 1.0, 0.9, 0.1);
    const auto all = private_joint_distribution(sn, ActionProfile::all(n, true)).materialize();
    CHECK(all.probs.back() == doctest::Approx(std::pow(0.9, n * (n - 1))).epsilon(1e-13));
    CHECK(std::abs(all.total() - 1.0) <= 1e-12);
    CHECK(all.full_support());
    for (int k = 0; k < all.bits(); ++k) {
      const auto& l = all.labels[static_cast<std::size_t>(k)];
      CHECK(l.observer != l.observed);
      CHECK(bit_zero_marginal(all, k) == doctest::Approx(0.1).epsilon(1e-12));
    }
  }
}

TEST_CASE("marginals excluding firms") {
  const auto s = linear_game(3, 1.0, 1.0, 0.9, 0.1);
  const auto m = marginal_excluding(s, P({1, 1, 1}), {2});
  REQUIRE(m.bits() == 4);
  CHECK(std::abs(m.total() - 1.0) <= 1e-12);
  CHECK(m.probs.back() == doctest::Approx(std::pow(0.9, 4)));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(marginal_excluding(s, P({0, 1, 0}), {i}).total() - 1.0) <= 1e-12);

  // Firm 3 observing firm 1: kernel flips from epsilon to alpha.
  const auto p = marginal_factors(s, P({1, 1, 1}), {0, 1});
  const auto q = marginal_factors(s, P({0, 1, 1}), {0, 1});
  CHECK(max_bit_gap(p, q) == doctest::Approx(0.8));
  const auto pd = p.materialize(), qd = q.materialize();
  double tv = 0.0;
  for (std::size_t x = 0; x < pd.probs.size(); ++x) tv += std::abs(pd.probs[x] - qd.probs[x]);
  CHECK(tv / 2 == doctest::Approx(0.8));
  CHECK_THROWS_AS(marginal_factors(s, P({1, 1, 1}), {0, 1, 2}), DomainError);
}

TEST_CASE("deviation sets") {
  const auto s = linear_game(3, 1.0, 1.0, 0.9, 0.1);
  const auto q = deviation_set(s, P({1, 1, 1}), 0, 0, 1);
  REQUIRE(q.size() == 1);
  CHECK(q.front().probs == marginal_excluding(s, P({0, 1, 1}), {0, 1}).probs);
  std::mt19937_64 rng(8);
  for (int n = 3; n <= 5; ++n) {
    const auto [a, e] = testing::random_accuracy(rng);
    const auto sn = linear_game(n, 1.0, 1.0, a, e);
    const auto r = ActionProfile::from_index(rng() % (1ULL << n), n);
    const auto qf = deviation_factors(sn, r, 1, 0, 1);
    CHECK(sup_norm_difference(qf.front(), marginal_factors(sn, r, {0, 1})) > 1e-9);
  }
}

TEST_CASE("factored comparisons agree with explicit enumeration") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + trial % 10;
    ProductDistribution a, b, c, d;
    for (int i = 0; i < k; ++i) {
      for (auto* x : {&a, &b, &c, &d}) x->labels.push_back({0, i + 1});
      const double base = u(rng);
      a.p_zero.push_back(base);
      b.p_zero.push_back(trial % 3 == 0 && i % 2 ? base : u(rng));
      c.p_zero.push_back(u(rng));
      d.p_zero.push_back(i % 3 ? c.p_zero.back() : u(rng));
    }
    const auto A = a.materialize(), B = b.materialize(), C = c.materialize(), D = d.materialize();
    double sup = 0.0, inner = 0.0;
    for (std::size_t x = 0; x < A.probs.size(); ++x) {
      sup = std::max(sup, std::abs(A.probs[x] - B.probs[x]));
      inner += (A.probs[x] - B.probs[x]) * (C.probs[x] - D.probs[x]);
    }
    CHECK(sup_norm_difference(a, b) == doctest::Approx(sup).epsilon(1e-12));
    CHECK(difference_inner_product(a, b, c, d) == doctest::Approx(inner).epsilon(1e-10));
  }
}

TEST_CASE("cross-observation reduction") {
  const auto s3 = linear_game(3, 1.0, 1.0, 0.9, 0.1);
  const auto d = cross_observation_reduction(s3, P({1, 1, 1}), 0, {1});
  CHECK(d.probs.front() == doctest::Approx(0.1));
  const auto s4 = linear_game(4, 1.0, 1.0, 0.9, 0.1);
  for (const auto& ex : std::vector<std::vector<int>>{{}, {0}, {0, 2}, {2, 3}}) {
    CHECK(cross_observation_reduction(s4, P({1, 0, 1, 1}), 1, ex).probs.front() == doctest::Approx(0.9));
  }
  CHECK_THROWS_AS(cross_observation_reduction(s3, P({1, 1, 1}), 0, {1, 2}), DomainError);
  CHECK_THROWS_AS(cross_observation_reduction(s3, P({1, 1, 1}), 0, {0}), DomainError);
}

TEST_CASE("swapping alpha with 1 - alpha and relabelling a concealer's bit leaves the law invariant") {
  // A concealer's bit is 0 w.p. alpha; with alpha' = 1 - alpha and the bit flipped, the law is unchanged.
  const Accuracy acc{0.8, 0.15}, swapped{0.2, 0.15};
  const auto r = P({0, 1, 0});
  const auto d = public_signal_factors(acc, r).materialize();
  const auto e = public_signal_factors(swapped, r).materialize();
  const std::uint64_t conceal_mask = 0b101;
  for (std::uint64_t x = 0; x < d.probs.size(); ++x) CHECK(d.probs[x] == doctest::Approx(e.probs[x ^ conceal_mask]));
}

TEST_CASE("relabelling firms permutes distributions") {
  const Accuracy acc{0.85, 0.2};
  const auto r = P({1, 0, 0, 1});
  const auto rp = P({0, 1, 1, 0});  // swap firms 0 <-> 1 and 2 <-> 3
  const auto d = public_signal_factors(acc, r).materialize();
  const auto e = public_signal_factors(acc, rp).materialize();
  for (std::uint64_t x = 0; x < 16; ++x) {
    const std::uint64_t y = ((x & 1) << 1) | ((x >> 1) & 1) | ((x & 4) << 1) | ((x >> 1) & 4);
    CHECK(d.probs[x] == doctest::Approx(e.probs[y]));
  }
}

TEST_CASE("sampling is deterministic and matches the exact law") {
  const auto g = testing::example_two_firm();
  const auto r = P({1, 1});
  CHECK(std::get<PublicSignal>(sample_signals(g, r, 9, MonitoringMode::Public, 4)) ==
        std::get<PublicSignal>(sample_signals(g, r, 9, MonitoringMode::Public, 4)));
  CHECK(std::get<PrivateSignalMatrix>(sample_signals(g, r, 9, MonitoringMode::Private, 4)) ==
        std::get<PrivateSignalMatrix>(sample_signals(g, r, 9, MonitoringMode::Private, 4)));

  const int draws = 100000;
  int hits = 0;
  PhiloxStream rng({123, 0, kMonitorStream, StreamPurpose::Signal});
  for (int k = 0; k < draws; ++k) hits += sample_public_signal(g.monitor_accuracy(), r, rng).index() == 3;
  const double sigma = std::sqrt(draws * 0.81 * 0.19);
  CHECK(std::abs(hits - 0.81 * draws) <= 3 * sigma);

  // Nearly uninformative monitor: concealer bits are close to fair coins.
  PhiloxStream r2({5, 0, 0, StreamPurpose::Signal});
  int zeros = 0;
  for (int k = 0; k < draws; ++k) zeros += sample_public_signal({0.5 + 1e-9, 0.1}, P({0}), r2).bits[0] == 0;
  CHECK(std::abs(zeros - draws / 2.0) <= 3 * std::sqrt(draws * 0.25));
}

TEST_CASE("private sampling rows come from per-observer streams") {
  const Accuracy acc{0.9, 0.1};
  const auto r = P({1, 0, 1});
  const auto m = sample_private_signals(acc, r, 77, 2);
  CHECK(m.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(m.at(i, i) == 0);
  CHECK(m.row(0).size() == 2);
  const int draws = 20000;
  int zeros_about_1 = 0;
  for (int t = 0; t < draws; ++t) zeros_about_1 += sample_private_signals(acc, r, 77, static_cast<std::uint32_t>(t)).at(0, 1) == 0;
  CHECK(std::abs(zeros_about_1 - 0.9 * draws) <= 3 * std::sqrt(draws * 0.09));
}

TEST_CASE("materialize capacity") {
  ProductDistribution big;
  for (int k = 0; k < 21; ++k) {
    big.labels.push_back({0, k});
    big.p_zero.push_back(0.5);
  }
  CHECK_THROWS_AS(big.materialize(), CapacityError);
}
