#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace muni {

enum class ErrorKind {
  // Input and configuration problems (CLI exit code 2).
  Validation,
  Parse,
  MissingField,
  UnknownGrade,
  NonBinary,
  // Computation problems (CLI exit code 1).
  NonFiniteRate,
  NoRoot,
  Matured,
  MissingFederalRate,
  MissingCurve,
  NoCustomerTrades,
  NoInterdealerTrades,
  InsufficientTrades,
  ZeroDenominator,
  NoRatedBonds,
  ZeroBase,
  EmptyPool,
  NotConverged,
  Underdetermined,
  DegenerateCluster,
  MissingBenchmark,
  MissingCoefficient,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for kinds that describe bad inputs rather than failed computations.
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace muni
