#include "infoshare/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infoshare/errors.hpp"

namespace infoshare {

namespace {

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// Gain from z other disclosers.
double gain(const GameSpec& spec, int z) {
  return std::visit(Overloaded{[z](const LinearGain& g) { return z * g.G; },
                               [z](const ConcaveGain& g) {
                                 return g.f.at(static_cast<std::size_t>(z)) * g.G;
                               }},
                    spec.gain);
}

}  // namespace

void validate_accuracy(const Accuracy& acc, const char* what) {
  if (!finite_all({acc.alpha, acc.epsilon})) {
    throw DomainError(std::string(what) + ": alpha and epsilon must be finite");
  }
  if (!(acc.epsilon > 0.0 && acc.epsilon < 0.5)) {
    throw DomainError(std::string(what) + ": epsilon must lie in (0, 1/2)");
  }
  if (!(acc.alpha > 0.5 && acc.alpha < 1.0)) {
    throw DomainError(std::string(what) + ": alpha must lie in (1/2, 1)");
  }
}

void validate(const GameSpec& spec) {
  if (spec.n_firms < 2) throw DomainError("n_firms must be at least 2");
  if (!finite_all({spec.loss, spec.discount})) throw DomainError("L and delta must be finite");
  if (!(spec.loss > 0.0)) throw DomainError("L must be positive");
  if (!(spec.discount > 0.0 && spec.discount < 1.0)) {
    throw DomainError("discount must lie in (0, 1)");
  }
  validate_accuracy(spec.firm_accuracy(), "firm monitoring");
  if (spec.monitor) validate_accuracy(*spec.monitor, "public monitor");

  if (const auto* lin = std::get_if<LinearGain>(&spec.gain)) {
    if (!(std::isfinite(lin->G) && lin->G > 0.0)) throw DomainError("linear gain G must be positive");
    return;
  }
  const auto& cg = std::get<ConcaveGain>(spec.gain);
  if (!(std::isfinite(cg.G) && cg.G > 0.0)) throw DomainError("concave gain G must be positive");
  if (static_cast<int>(cg.f.size()) != spec.n_firms) {
    throw DomainError("concave gain table must have exactly n_firms entries f(0..N-1)");
  }
  if (!std::all_of(cg.f.begin(), cg.f.end(), [](double v) { return std::isfinite(v); })) {
    throw DomainError("concave gain table must be finite");
  }
  if (cg.f.front() < 0.0) throw DomainError("concave gain requires f(0) >= 0");
  for (std::size_t z = 1; z < cg.f.size(); ++z) {
    if (cg.f[z] < cg.f[z - 1]) {
      throw DomainError("concave gain table must be nondecreasing (violated at z=" +
                        std::to_string(z) + ")");
    }
    if (z + 1 < cg.f.size() && cg.f[z + 1] - cg.f[z] > cg.f[z] - cg.f[z - 1] + 1e-12) {
      throw DomainError("concave gain table must be concave (violated at z=" + std::to_string(z) +
                        ")");
    }
  }
}

GameSpec linear_game(int n_firms, double G, double L, double alpha, double epsilon,
                     double discount) {
  GameSpec s;
  s.n_firms = n_firms;
  s.gain = LinearGain{G};
  s.loss = L;
  s.alpha = alpha;
  s.epsilon = epsilon;
  s.discount = discount;
  validate(s);
  return s;
}

GameSpec concave_game(std::vector<double> f, double G, double L, double alpha, double epsilon,
                      double discount) {
  GameSpec s;
  s.n_firms = static_cast<int>(f.size());
  s.gain = ConcaveGain{G, std::move(f)};
  s.loss = L;
  s.alpha = alpha;
  s.epsilon = epsilon;
  s.discount = discount;
  validate(s);
  return s;
}

// ---------------------------------------------------------------------------

ActionProfile::ActionProfile(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw DomainError("action profile entries must be 0 or 1");
  }
}

ActionProfile ActionProfile::from_index(std::uint64_t index, int n_firms) {
  if (n_firms < 1 || n_firms > 63) throw DomainError("profile size must be in [1, 63]");
  if (index >> n_firms) throw DomainError("profile index out of range");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_firms));
  for (int i = 0; i < n_firms; ++i) bits[static_cast<std::size_t>(i)] = (index >> i) & 1U;
  return ActionProfile(std::move(bits));
}

ActionProfile ActionProfile::all(int n_firms, bool disclose) {
  return ActionProfile(std::vector<std::uint8_t>(static_cast<std::size_t>(n_firms), disclose ? 1 : 0));
}

int ActionProfile::disclosers() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint64_t ActionProfile::index() const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) idx |= static_cast<std::uint64_t>(bits_[i]) << i;
  return idx;
}

ActionProfile ActionProfile::with(int firm, bool disclose) const {
  auto bits = bits_;
  bits.at(static_cast<std::size_t>(firm)) = disclose ? 1 : 0;
  return ActionProfile(std::move(bits));
}

std::string ActionProfile::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < bits_.size(); ++i) os << (i ? "," : "") << int(bits_[i]);
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------------------

double role_payoff(const GameSpec& spec, bool cooperator, int x) {
  const int n = spec.n_firms;
  if (cooperator) {
    if (x < 1 || x > n) throw DomainError("C(x) requires 1 <= x <= N, got x=" + std::to_string(x));
    return gain(spec, x - 1) - spec.loss;
  }
  if (x < 0 || x > n - 1) throw DomainError("D(x) requires 0 <= x <= N-1, got x=" + std::to_string(x));
  return gain(spec, x);
}

std::vector<double> profile_payoff(const GameSpec& spec, const ActionProfile& r) {
  if (r.size() != spec.n_firms) throw DomainError("profile length differs from n_firms");
  const int x = r.disclosers();
  std::vector<double> u(static_cast<std::size_t>(spec.n_firms));
  // Only the roles actually present are evaluated (C(0) and D(N) are undefined).
  const double c = x >= 1 ? role_payoff(spec, true, x) : 0.0;
  const double d = x <= spec.n_firms - 1 ? role_payoff(spec, false, x) : 0.0;
  for (int i = 0; i < spec.n_firms; ++i) u[static_cast<std::size_t>(i)] = r.discloses(i) ? c : d;
  return u;
}

double social_welfare(const GameSpec& spec, int x) {
  const int n = spec.n_firms;
  if (x < 0 || x > n) throw DomainError("welfare requires 0 <= x <= N");
  double w = 0.0;
  if (x >= 1) w += x * role_payoff(spec, true, x);
  if (x <= n - 1) w += (n - x) * role_payoff(spec, false, x);
  return w;
}

AssumptionReport check_assumptions(const GameSpec& spec) {
  const int n = spec.n_firms;
  AssumptionReport rep;

  rep.a1_holds = true;
  for (int x = 1; x <= n; ++x) {
    if (!(deviator_payoff(spec, x - 1) - cooperator_payoff(spec, x) > kAssumptionTolerance)) {
      rep.a1_holds = false;
      rep.a1_witness = x;
      break;
    }
  }

  rep.a2_holds = cooperator_payoff(spec, n) - deviator_payoff(spec, 0) > kAssumptionTolerance;
  if (!rep.a2_holds) rep.a2_witness = n;

  rep.a2prime_holds = true;
  for (int x = 1; x <= n; ++x) {
    if (!(social_welfare(spec, x) - social_welfare(spec, x - 1) > kAssumptionTolerance)) {
      rep.a2prime_holds = false;
      rep.a2prime_witness = x;
      break;
    }
  }
  return rep;
}

MinmaxResult minmax(const GameSpec& spec, int firm) {
  if (firm < 0 || firm >= spec.n_firms) throw DomainError("firm index out of range");
  // Others concealing minimize both D and C; the firm best-responds to that.
  return {ActionProfile::all(spec.n_firms, false),
          std::max(deviator_payoff(spec, 0), cooperator_payoff(spec, 1))};
}

}  // namespace infoshare
