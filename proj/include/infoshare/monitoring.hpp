#pragma once

// Signal distributions of the public monitor and of the firms' private beliefs.
//
// A signal is a vector of belief bits (1 = "believed honest"). Every bit is
// labelled by who observes whom; a K-bit signal is encoded as an integer with
// the first label in the least significant bit. For the public monitor this
// gives index = sum_j b_j 2^(j-1), firm 1 lowest.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "infoshare/game.hpp"
#include "infoshare/rng.hpp"

namespace infoshare {

/// Observer value used for bits produced by the public monitor.
inline constexpr int kMonitor = -1;
/// Observer value for a uniformly drawn tester (cross-observation reduction).
inline constexpr int kRandomTester = -2;
/// Firm slot of the monitor's RNG substream.
inline constexpr std::uint32_t kMonitorStream = 0xFFFFFFFFu;

struct BitLabel {
  int observer = kMonitor;
  int observed = 0;
  friend bool operator==(const BitLabel&, const BitLabel&) = default;
};

struct PublicSignal {
  std::vector<std::uint8_t> bits;

  std::uint64_t index() const;
  static PublicSignal from_index(std::uint64_t index, int n_firms);
  friend bool operator==(const PublicSignal&, const PublicSignal&) = default;
};

/// b(i, j) is firm i's belief about firm j; the diagonal is unused and kept at 0.
class PrivateSignalMatrix {
 public:
  PrivateSignalMatrix() = default;
  explicit PrivateSignalMatrix(int n_firms) : n_(n_firms), cells_(static_cast<std::size_t>(n_firms * n_firms), 0) {}

  int size() const { return n_; }
  std::uint8_t at(int i, int j) const;
  void set(int i, int j, bool value);
  /// Firm i's observations of the other firms, in increasing j.
  std::vector<std::uint8_t> row(int i) const;
  friend bool operator==(const PrivateSignalMatrix&, const PrivateSignalMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Explicit probability vector over 2^K outcomes.
struct SignalDistribution {
  std::vector<BitLabel> labels;
  std::vector<double> probs;

  int bits() const { return static_cast<int>(labels.size()); }
  double total() const;
  bool full_support() const;
};

/// Independent bits with P(bit = 0) given per label.
struct ProductDistribution {
  std::vector<BitLabel> labels;
  std::vector<double> p_zero;

  int bits() const { return static_cast<int>(labels.size()); }
  double probability(const std::vector<std::uint8_t>& outcome) const;
  /// Explicit form; CapacityError above 20 bits.
  SignalDistribution materialize() const;
};

/// P(b = 0 | r): epsilon for a discloser, alpha for a concealer. The closed
/// boundary (epsilon = 0, alpha = 1) is accepted here; analyses that need full
/// support validate the spec strictly.
double belief_kernel(bool disclosed, double alpha, double epsilon);
inline double belief_kernel(bool disclosed, const Accuracy& acc) {
  return belief_kernel(disclosed, acc.alpha, acc.epsilon);
}

/// True when the accuracy sits on the perfect-monitoring boundary.
bool boundary_accuracy(const Accuracy& acc);

// The Accuracy-based factor builders only require alpha, epsilon in [0, 1], so
// tests can probe degenerate monitors (e.g. alpha == epsilon).
ProductDistribution public_signal_factors(const Accuracy& acc, const ActionProfile& r);
ProductDistribution private_factors(const Accuracy& acc, const ActionProfile& r,
                                    const std::vector<int>& excluded);
SignalDistribution public_signal_distribution(const GameSpec& spec, const ActionProfile& r);

/// Factorized joint law of all N(N-1) private beliefs, labels ordered by observer then observed.
ProductDistribution private_joint_distribution(const GameSpec& spec, const ActionProfile& r);

/// Joint beliefs of every firm not in `excluded` (p_{-i} or p_{-ij}), still factorized.
ProductDistribution marginal_factors(const GameSpec& spec, const ActionProfile& r,
                                     const std::vector<int>& excluded);
SignalDistribution marginal_excluding(const GameSpec& spec, const ActionProfile& r,
                                      const std::vector<int>& excluded);

/// Q_ij(r): the marginal p_{-ij} under each alternative action of `deviator`.
std::vector<ProductDistribution> deviation_factors(const GameSpec& spec, const ActionProfile& r,
                                                   int deviator, int firm_i, int firm_j);
std::vector<SignalDistribution> deviation_set(const GameSpec& spec, const ActionProfile& r,
                                              int deviator, int firm_i, int firm_j);

/// Law of one belief bit about `suspect` from a tester drawn uniformly among
/// the firms outside `excluded` (and other than the suspect).
SignalDistribution cross_observation_reduction(const GameSpec& spec, const ActionProfile& r,
                                               int suspect, const std::vector<int>& excluded);

// Comparisons computed on the factorized form. Bits on which the laws agree
// contribute a closed-form factor, so only differing bits are enumerated.

/// max_x |P(x) - Q(x)|; labels must match.
double sup_norm_difference(const ProductDistribution& p, const ProductDistribution& q);
/// sum_x (A(x) - B(x)) (C(x) - D(x)); labels must match.
double difference_inner_product(const ProductDistribution& a, const ProductDistribution& b,
                                const ProductDistribution& c, const ProductDistribution& d);
/// max over bits of |P(bit = 0) - Q(bit = 0)|.
double max_bit_gap(const ProductDistribution& p, const ProductDistribution& q);

enum class MonitoringMode { Public, Private };

using SignalDraw = std::variant<PublicSignal, PrivateSignalMatrix>;

PublicSignal sample_public_signal(const Accuracy& acc, const ActionProfile& r, PhiloxStream& rng);
/// Row i of the matrix is drawn from firm i's own substream of `period`.
PrivateSignalMatrix sample_private_signals(const Accuracy& acc, const ActionProfile& r,
                                           std::uint64_t seed, std::uint32_t period);

/// Deterministic given (seed, period): the monitor uses substream kMonitorStream,
/// private rows use one substream per observing firm.
SignalDraw sample_signals(const GameSpec& spec, const ActionProfile& r, std::uint64_t seed,
                          MonitoringMode mode, std::uint32_t period = 0);

}  // namespace infoshare
