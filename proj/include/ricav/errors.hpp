#ifndef RICAV_ERRORS_HPP
#define RICAV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ricav {

enum class ErrorCode {
  NegativeWeight,
  SumNotOne,
  BarycenterMismatch,
  BadWeights,
  EmptyDomain,
  BadIndices,
  ResolutionTooSmall,
  AlphaOutOfRange,
  EmptyMenu,
  BadAct,
  NonConvexSpec,
  PriorOnDomainBoundary,
  PriorMismatch,
  OutsideDomain,
  PriorOutsideDomain,
  NonConvexInput,
  NotTwoStates,
  UnsupportedCostFamily,
  InfeasibleGrid,
  UnboundedObjective,
  PriorNotInHull,
  CertificateInvalid,
  EpsilonSearchFailed,
  NonUniqueHyperplane,
  ParseError,
  UnknownMenu,
  SolverError,
};

const char* error_code_name(ErrorCode c);

// Single exception type; code() distinguishes failure classes so tests and
// the CLI can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ricav

#endif
