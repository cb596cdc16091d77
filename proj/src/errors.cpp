#include "muni/errors.hpp"

namespace muni {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "Validation";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::UnknownGrade: return "UnknownGrade";
    case ErrorKind::NonBinary: return "NonBinary";
    case ErrorKind::NonFiniteRate: return "NonFiniteRate";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::Matured: return "Matured";
    case ErrorKind::MissingFederalRate: return "MissingFederalRate";
    case ErrorKind::MissingCurve: return "MissingCurve";
    case ErrorKind::NoCustomerTrades: return "NoCustomerTrades";
    case ErrorKind::NoInterdealerTrades: return "NoInterdealerTrades";
    case ErrorKind::InsufficientTrades: return "InsufficientTrades";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::NoRatedBonds: return "NoRatedBonds";
    case ErrorKind::ZeroBase: return "ZeroBase";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::Underdetermined: return "Underdetermined";
    case ErrorKind::DegenerateCluster: return "DegenerateCluster";
    case ErrorKind::MissingBenchmark: return "MissingBenchmark";
    case ErrorKind::MissingCoefficient: return "MissingCoefficient";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::MissingField:
    case ErrorKind::UnknownGrade:
    case ErrorKind::NonBinary:
      return true;
    default:
      return false;
  }
}

}  // namespace muni
