#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppfc {

/// Bad dimensions, malformed configuration, or a precondition the caller
/// could have checked.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function (|sigma| >= 1 for
/// the intermediate function, pitch at +-pi/2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The normalized error reached (or came within the guard band of) the funnel
/// boundary on some channel.
class FunnelViolation : public std::runtime_error {
 public:
  FunnelViolation(std::size_t channel, double t, const std::string& what)
      : std::runtime_error(what), channel_(channel), t_(t) {}

  std::size_t channel() const noexcept { return channel_; }
  double time() const noexcept { return t_; }

 private:
  std::size_t channel_;
  double t_;
};

/// NaN or Inf produced somewhere in the closed loop.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ppfc
