#pragma once

#include <stdexcept>
#include <string>

namespace pvn {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was not met (bad index, shape mismatch, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The potential is singular at a requested point.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

/// The requested quantity has no implementation for this input.
class NotAvailable : public Error {
 public:
  using Error::Error;
};

/// A metric or overlap is too close to singular for the requested operation.
class IllConditioned : public Error {
 public:
  IllConditioned(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// An eigensolver or other numerical kernel failed.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// A search or enumeration ran out of its size budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo estimate with no hits.
class DegenerateEstimate : public Error {
 public:
  using Error::Error;
};

/// Classical motion at the requested energy is not bounded.
class UnboundedOrbit : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration text or values.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, int line, const std::string& message)
      : Error(format(field, line, message)), field_(field), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, int line,
                            const std::string& message) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!field.empty()) out += " [" + field + "]";
    return out + ": " + message;
  }
  std::string field_;
  int line_;
};

}  // namespace pvn
