#include "infoshare/monitoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infoshare/errors.hpp"

namespace infoshare {

namespace {

constexpr int kMaxMaterializedBits = 20;
constexpr int kMaxEnumeratedBits = 24;

void check_firm(int firm, int n, const char* what) {
  if (firm < 0 || firm >= n) throw DomainError(std::string(what) + " index out of range");
}

void check_same_labels(const ProductDistribution& a, const ProductDistribution& b) {
  if (a.labels != b.labels) throw DomainError("distributions range over different signal spaces");
}

double bit_prob(double p_zero, std::uint64_t x, std::size_t k) {
  return ((x >> k) & 1u) ? 1.0 - p_zero : p_zero;
}

// Probability of outcome x (bit k of x = value of differing bit k) restricted to `bits`.
double partial_prob(const ProductDistribution& d, const std::vector<std::size_t>& bits, std::uint64_t x) {
  double p = 1.0;
  for (std::size_t k = 0; k < bits.size(); ++k) p *= bit_prob(d.p_zero[bits[k]], x, k);
  return p;
}

void check_probabilities(const Accuracy& acc) {
  if (!(acc.alpha >= 0.0 && acc.alpha <= 1.0 && acc.epsilon >= 0.0 && acc.epsilon <= 1.0)) {
    throw DomainError("alpha and epsilon must be probabilities");
  }
}

void check_enumerable(std::size_t bits) {
  if (bits > static_cast<std::size_t>(kMaxEnumeratedBits)) {
    throw CapacityError("too many differing signal bits to enumerate");
  }
}

}  // namespace

std::uint64_t PublicSignal::index() const {
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j]) idx |= std::uint64_t{1} << j;
  }
  return idx;
}

PublicSignal PublicSignal::from_index(std::uint64_t index, int n_firms) {
  if (n_firms < 1 || n_firms > 63 || index >= (std::uint64_t{1} << n_firms)) {
    throw DomainError("signal index out of range");
  }
  PublicSignal s;
  for (int j = 0; j < n_firms; ++j) s.bits.push_back(static_cast<std::uint8_t>((index >> j) & 1u));
  return s;
}

std::uint8_t PrivateSignalMatrix::at(int i, int j) const {
  check_firm(i, n_, "observer");
  check_firm(j, n_, "observed");
  return cells_[static_cast<std::size_t>(i * n_ + j)];
}

void PrivateSignalMatrix::set(int i, int j, bool value) {
  check_firm(i, n_, "observer");
  check_firm(j, n_, "observed");
  if (i == j) throw DomainError("a firm holds no belief about itself");
  cells_[static_cast<std::size_t>(i * n_ + j)] = value ? 1 : 0;
}

std::vector<std::uint8_t> PrivateSignalMatrix::row(int i) const {
  std::vector<std::uint8_t> out;
  for (int j = 0; j < n_; ++j) {
    if (j != i) out.push_back(at(i, j));
  }
  return out;
}

double SignalDistribution::total() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

bool SignalDistribution::full_support() const {
  return std::all_of(probs.begin(), probs.end(), [](double p) { return p > 0.0; });
}

double ProductDistribution::probability(const std::vector<std::uint8_t>& outcome) const {
  if (outcome.size() != p_zero.size()) throw DomainError("outcome has wrong length");
  double p = 1.0;
  for (std::size_t k = 0; k < outcome.size(); ++k) p *= outcome[k] ? 1.0 - p_zero[k] : p_zero[k];
  return p;
}

SignalDistribution ProductDistribution::materialize() const {
  if (bits() > kMaxMaterializedBits) {
    throw CapacityError("signal space too large to materialize (more than 20 bits)");
  }
  SignalDistribution d;
  d.labels = labels;
  const std::uint64_t count = std::uint64_t{1} << bits();
  d.probs.resize(count);
  std::vector<std::size_t> all(p_zero.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::uint64_t x = 0; x < count; ++x) d.probs[x] = partial_prob(*this, all, x);
  return d;
}

double belief_kernel(bool disclosed, double alpha, double epsilon) {
  if (!(std::isfinite(alpha) && std::isfinite(epsilon))) throw DomainError("kernel parameters must be finite");
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw DomainError("epsilon must lie in [0, 1/2)");
  if (!(alpha > 0.5 && alpha <= 1.0)) throw DomainError("alpha must lie in (1/2, 1]");
  return disclosed ? epsilon : alpha;
}

bool boundary_accuracy(const Accuracy& acc) { return acc.epsilon == 0.0 || acc.alpha == 1.0; }

ProductDistribution public_signal_factors(const Accuracy& acc, const ActionProfile& r) {
  check_probabilities(acc);
  ProductDistribution d;
  for (int j = 0; j < r.size(); ++j) {
    d.labels.push_back({kMonitor, j});
    d.p_zero.push_back(r.discloses(j) ? acc.epsilon : acc.alpha);
  }
  return d;
}

ProductDistribution private_factors(const Accuracy& acc, const ActionProfile& r,
                                    const std::vector<int>& excluded) {
  check_probabilities(acc);
  const int n = r.size();
  std::vector<bool> out(static_cast<std::size_t>(n), false);
  for (int k : excluded) {
    check_firm(k, n, "excluded firm");
    if (out[static_cast<std::size_t>(k)]) throw DomainError("excluded firm listed twice");
    out[static_cast<std::size_t>(k)] = true;
  }
  if (static_cast<int>(excluded.size()) >= n) throw DomainError("cannot exclude every firm");
  ProductDistribution d;
  for (int i = 0; i < n; ++i) {
    if (out[static_cast<std::size_t>(i)]) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      d.labels.push_back({i, j});
      d.p_zero.push_back(r.discloses(j) ? acc.epsilon : acc.alpha);
    }
  }
  return d;
}

SignalDistribution public_signal_distribution(const GameSpec& spec, const ActionProfile& r) {
  validate(spec);
  if (r.size() != spec.n_firms) throw DomainError("profile length differs from n_firms");
  return public_signal_factors(spec.monitor_accuracy(), r).materialize();
}

ProductDistribution private_joint_distribution(const GameSpec& spec, const ActionProfile& r) {
  return marginal_factors(spec, r, {});
}

ProductDistribution marginal_factors(const GameSpec& spec, const ActionProfile& r,
                                     const std::vector<int>& excluded) {
  validate(spec);
  if (r.size() != spec.n_firms) throw DomainError("profile length differs from n_firms");
  return private_factors(spec.firm_accuracy(), r, excluded);
}

SignalDistribution marginal_excluding(const GameSpec& spec, const ActionProfile& r,
                                      const std::vector<int>& excluded) {
  return marginal_factors(spec, r, excluded).materialize();
}

std::vector<ProductDistribution> deviation_factors(const GameSpec& spec, const ActionProfile& r,
                                                   int deviator, int firm_i, int firm_j) {
  if (firm_i == firm_j) throw DomainError("pair must consist of two different firms");
  if (deviator != firm_i && deviator != firm_j) throw DomainError("deviator must belong to the pair");
  check_firm(deviator, spec.n_firms, "deviator");
  // Binary actions: the only alternative is the other action.
  return {marginal_factors(spec, r.flipped(deviator), {firm_i, firm_j})};
}

std::vector<SignalDistribution> deviation_set(const GameSpec& spec, const ActionProfile& r,
                                              int deviator, int firm_i, int firm_j) {
  std::vector<SignalDistribution> out;
  for (const auto& f : deviation_factors(spec, r, deviator, firm_i, firm_j)) out.push_back(f.materialize());
  return out;
}

SignalDistribution cross_observation_reduction(const GameSpec& spec, const ActionProfile& r,
                                               int suspect, const std::vector<int>& excluded) {
  validate(spec);
  const int n = spec.n_firms;
  check_firm(suspect, n, "suspect");
  if (r.size() != n) throw DomainError("profile length differs from n_firms");
  if (std::find(excluded.begin(), excluded.end(), suspect) != excluded.end()) {
    throw DomainError("suspect must not be among the excluded testers");
  }
  std::vector<int> testers;
  for (int k = 0; k < n; ++k) {
    if (k != suspect && std::find(excluded.begin(), excluded.end(), k) == excluded.end()) testers.push_back(k);
  }
  if (testers.empty()) throw DomainError("no tester available for the suspect");
  // Uniform mixture over testers; every tester's bit follows the same kernel.
  double p0 = 0.0;
  for (std::size_t t = 0; t < testers.size(); ++t) p0 += belief_kernel(r.discloses(suspect), spec.firm_accuracy());
  p0 /= static_cast<double>(testers.size());
  return {{{kRandomTester, suspect}}, {p0, 1.0 - p0}};
}

double sup_norm_difference(const ProductDistribution& p, const ProductDistribution& q) {
  check_same_labels(p, q);
  std::vector<std::size_t> diff;
  double common = 1.0;
  for (std::size_t k = 0; k < p.p_zero.size(); ++k) {
    if (p.p_zero[k] == q.p_zero[k]) {
      common *= std::max(p.p_zero[k], 1.0 - p.p_zero[k]);
    } else {
      diff.push_back(k);
    }
  }
  if (diff.empty()) return 0.0;
  check_enumerable(diff.size());
  double best = 0.0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << diff.size()); ++x) {
    best = std::max(best, std::abs(partial_prob(p, diff, x) - partial_prob(q, diff, x)));
  }
  return common * best;
}

double difference_inner_product(const ProductDistribution& a, const ProductDistribution& b,
                                const ProductDistribution& c, const ProductDistribution& d) {
  check_same_labels(a, b);
  check_same_labels(a, c);
  check_same_labels(a, d);
  std::vector<std::size_t> diff;
  double common = 1.0;
  for (std::size_t k = 0; k < a.p_zero.size(); ++k) {
    const double v = a.p_zero[k];
    if (b.p_zero[k] == v && c.p_zero[k] == v && d.p_zero[k] == v) {
      common *= v * v + (1.0 - v) * (1.0 - v);
    } else {
      diff.push_back(k);
    }
  }
  // Every factor (A - B) vanishes when the laws agree on all bits.
  if (diff.empty()) return 0.0;
  check_enumerable(diff.size());
  double sum = 0.0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << diff.size()); ++x) {
    sum += (partial_prob(a, diff, x) - partial_prob(b, diff, x)) *
           (partial_prob(c, diff, x) - partial_prob(d, diff, x));
  }
  return common * sum;
}

double max_bit_gap(const ProductDistribution& p, const ProductDistribution& q) {
  check_same_labels(p, q);
  double gap = 0.0;
  for (std::size_t k = 0; k < p.p_zero.size(); ++k) gap = std::max(gap, std::abs(p.p_zero[k] - q.p_zero[k]));
  return gap;
}

PublicSignal sample_public_signal(const Accuracy& acc, const ActionProfile& r, PhiloxStream& rng) {
  PublicSignal s;
  for (int j = 0; j < r.size(); ++j) {
    const bool zero = rng.bernoulli(belief_kernel(r.discloses(j), acc));
    s.bits.push_back(zero ? 0 : 1);
  }
  return s;
}

PrivateSignalMatrix sample_private_signals(const Accuracy& acc, const ActionProfile& r,
                                           std::uint64_t seed, std::uint32_t period) {
  const int n = r.size();
  PrivateSignalMatrix m(n);
  for (int i = 0; i < n; ++i) {
    PhiloxStream rng({seed, period, static_cast<std::uint32_t>(i), StreamPurpose::Signal});
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      m.set(i, j, !rng.bernoulli(belief_kernel(r.discloses(j), acc)));
    }
  }
  return m;
}

SignalDraw sample_signals(const GameSpec& spec, const ActionProfile& r, std::uint64_t seed,
                          MonitoringMode mode, std::uint32_t period) {
  validate(spec);
  if (r.size() != spec.n_firms) throw DomainError("profile length differs from n_firms");
  if (mode == MonitoringMode::Public) {
    PhiloxStream rng({seed, period, kMonitorStream, StreamPurpose::Signal});
    return sample_public_signal(spec.monitor_accuracy(), r, rng);
  }
  return sample_private_signals(spec.firm_accuracy(), r, seed, period);
}

}  // namespace infoshare
