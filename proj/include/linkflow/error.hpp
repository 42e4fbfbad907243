#ifndef LINKFLOW_ERROR_HPP
#define LINKFLOW_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace linkflow {

enum class Errc {
  // network model
  DegenerateNetwork,
  RankDeficient,
  DimensionMismatch,
  // kernel algebra
  NoBaseSet,
  SingularComplement,
  Singular,
  // correction
  NotFullColumnRank,
  OracleTooLarge,
  // recoverability
  DegenerateDirection,
  DegenerateSubset,
  InvalidAlpha,
  // file parsing
  SyntaxError,
  UnknownNode,
  DuplicateId,
  NegativeCount,
  UnmonitoredObservation,
  MissingObservation,
  // cli / generator
  InfeasibleSpec,
  MissingGroundTruth,
  InvalidArgument,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DegenerateNetwork: return "DegenerateNetwork";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NoBaseSet: return "NoBaseSet";
    case Errc::SingularComplement: return "SingularComplement";
    case Errc::Singular: return "Singular";
    case Errc::NotFullColumnRank: return "NotFullColumnRank";
    case Errc::OracleTooLarge: return "OracleTooLarge";
    case Errc::DegenerateDirection: return "DegenerateDirection";
    case Errc::DegenerateSubset: return "DegenerateSubset";
    case Errc::InvalidAlpha: return "InvalidAlpha";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::NegativeCount: return "NegativeCount";
    case Errc::UnmonitoredObservation: return "UnmonitoredObservation";
    case Errc::MissingObservation: return "MissingObservation";
    case Errc::InfeasibleSpec: return "InfeasibleSpec";
    case Errc::MissingGroundTruth: return "MissingGroundTruth";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// True for errors caused by a malformed input document or network.
  bool is_input_error() const noexcept {
    switch (code_) {
      case Errc::SyntaxError:
      case Errc::UnknownNode:
      case Errc::DuplicateId:
      case Errc::NegativeCount:
      case Errc::UnmonitoredObservation:
      case Errc::MissingObservation:
      case Errc::DegenerateNetwork:
      case Errc::RankDeficient:
        return true;
      default:
        return false;
    }
  }

 private:
  Errc code_;
};

}  // namespace linkflow

#endif  // LINKFLOW_ERROR_HPP
