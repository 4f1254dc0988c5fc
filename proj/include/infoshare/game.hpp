#pragma once

// N-person prisoner's dilemma stage game for information sharing.
//
// Firms are indexed 0..N-1 in code; firm 0 corresponds to "firm 1" in
// documents and CSV headers. Action profiles and public signals are encoded
// as integers with firm 0 in the least significant bit.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace infoshare {

/// Gain z*G from z other disclosing firms.
struct LinearGain {
  double G = 0.0;
};

/// Gain f(z)*G with f tabulated on z = 0..N-1 (nondecreasing, concave).
struct ConcaveGain {
  double G = 0.0;
  std::vector<double> f;
};

using GainFamily = std::variant<LinearGain, ConcaveGain>;

/// Accuracy of a binary belief: P(b = 0 | r = 0) = alpha, P(b = 0 | r = 1) = epsilon.
struct Accuracy {
  double alpha = 0.0;
  double epsilon = 0.0;
};

struct GameSpec {
  int n_firms = 2;
  GainFamily gain = LinearGain{};
  double loss = 0.0;  // L
  double alpha = 0.0;
  double epsilon = 0.0;
  double discount = 0.0;  // delta
  /// Public monitor accuracy when it differs from the firms' own monitoring.
  std::optional<Accuracy> monitor;

  Accuracy firm_accuracy() const { return {alpha, epsilon}; }
  Accuracy monitor_accuracy() const { return monitor.value_or(firm_accuracy()); }
};

/// Throws DomainError describing the first violated invariant.
void validate(const GameSpec& spec);

/// Strict accuracy check: 0 < epsilon < 1/2 < alpha < 1.
void validate_accuracy(const Accuracy& acc, const char* what = "accuracy");

/// Convenience constructors for the two gain families; both validate.
GameSpec linear_game(int n_firms, double G, double L, double alpha, double epsilon,
                     double discount = 0.9);
GameSpec concave_game(std::vector<double> f, double G, double L, double alpha, double epsilon,
                      double discount = 0.9);

/// Pure action profile; bit i is firm i's disclosure decision (1 = disclose).
class ActionProfile {
 public:
  ActionProfile() = default;
  explicit ActionProfile(std::vector<std::uint8_t> bits);
  static ActionProfile from_index(std::uint64_t index, int n_firms);
  static ActionProfile all(int n_firms, bool disclose);

  int size() const { return static_cast<int>(bits_.size()); }
  bool discloses(int firm) const { return bits_.at(static_cast<std::size_t>(firm)) != 0; }
  int disclosers() const;
  std::uint64_t index() const;
  ActionProfile with(int firm, bool disclose) const;
  ActionProfile flipped(int firm) const { return with(firm, !discloses(firm)); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  /// "(1,0,1)" with firm 0 first.
  std::string to_string() const;

  friend bool operator==(const ActionProfile&, const ActionProfile&) = default;
  /// Lexicographic over (r_1, ..., r_N).
  friend bool operator<(const ActionProfile& a, const ActionProfile& b) { return a.bits_ < b.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

/// C(x) for cooperators (x >= 1) or D(x) for deviators (x <= N-1), x = total disclosers.
double role_payoff(const GameSpec& spec, bool cooperator, int x);
inline double cooperator_payoff(const GameSpec& spec, int x) { return role_payoff(spec, true, x); }
inline double deviator_payoff(const GameSpec& spec, int x) { return role_payoff(spec, false, x); }

std::vector<double> profile_payoff(const GameSpec& spec, const ActionProfile& r);

/// x*C(x) + (N-x)*D(x).
double social_welfare(const GameSpec& spec, int x);

struct AssumptionReport {
  bool a1_holds = false;
  bool a2_holds = false;
  bool a2prime_holds = false;
  std::optional<int> a1_witness;  // x with D(x-1) <= C(x)
  std::optional<int> a2_witness;  // N
  std::optional<int> a2prime_witness;
};

/// Inequalities count as satisfied only with a margin above 1e-12.
inline constexpr double kAssumptionTolerance = 1e-12;

AssumptionReport check_assumptions(const GameSpec& spec);

struct MinmaxResult {
  ActionProfile profile;
  double value = 0.0;
};

MinmaxResult minmax(const GameSpec& spec, int firm);

}  // namespace infoshare
