#pragma once

#include <stdexcept>
#include <string>

namespace infoshare {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Problem size exceeds what an enumeration-based routine supports.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A folk-theorem condition that is not defined for the given game (e.g. N = 2 for C2/C3).
class ConditionInapplicable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A strategy produced an action or message the protocol does not allow.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(const std::string& what, int firm, int period)
      : std::runtime_error(what), firm_(firm), period_(period) {}
  int firm() const noexcept { return firm_; }
  int period() const noexcept { return period_; }

 private:
  int firm_;
  int period_;
};

/// Raised by the promise automaton when a continuation promise leaves the
/// clipped feasible hull. `suggested_discount` is the smallest discount factor
/// that would have kept every update observed so far inside the hull; it is a
/// diagnostic, not a certified bound.
class DiscountTooSmall : public std::runtime_error {
 public:
  DiscountTooSmall(const std::string& what, int period, double suggested_discount)
      : std::runtime_error(what), period_(period), suggested_discount_(suggested_discount) {}
  int period() const noexcept { return period_; }
  double suggested_discount() const noexcept { return suggested_discount_; }

 private:
  int period_;
  double suggested_discount_;
};

/// Malformed input document (spec file, CSV).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace infoshare
