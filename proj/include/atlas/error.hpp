#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atlas {

enum class Errc {
  // input validation
  InvalidEdge,
  TooFewOutcomes,
  DuplicateMeasurement,
  UnknownMeasurement,
  MissingContextTable,
  NegativeProbability,
  ScenarioMismatch,
  NoDisturbanceViolated,
  NotInEventForm,
  NonCommutingContext,
  InvalidModel,
  NotAPOVM,
  RankDeficiencyAmbiguous,
  NotDichotomic,
  InvalidSet,
  NotABellScenario,
  InvalidPartition,
  UndersizedPart,
  TooSmall,
  SicVerificationFailed,
  DimensionTooLarge,
  ParseError,
  // resource limits
  BudgetExceeded,
  SizeLimitExceeded,
  ConvergenceFailure,
  // command line
  UsageError,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidEdge: return "InvalidEdge";
    case Errc::TooFewOutcomes: return "TooFewOutcomes";
    case Errc::DuplicateMeasurement: return "DuplicateMeasurement";
    case Errc::UnknownMeasurement: return "UnknownMeasurement";
    case Errc::MissingContextTable: return "MissingContextTable";
    case Errc::NegativeProbability: return "NegativeProbability";
    case Errc::ScenarioMismatch: return "ScenarioMismatch";
    case Errc::NoDisturbanceViolated: return "NoDisturbanceViolated";
    case Errc::NotInEventForm: return "NotInEventForm";
    case Errc::NonCommutingContext: return "NonCommutingContext";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::NotAPOVM: return "NotAPOVM";
    case Errc::RankDeficiencyAmbiguous: return "RankDeficiencyAmbiguous";
    case Errc::NotDichotomic: return "NotDichotomic";
    case Errc::InvalidSet: return "InvalidSet";
    case Errc::NotABellScenario: return "NotABellScenario";
    case Errc::InvalidPartition: return "InvalidPartition";
    case Errc::UndersizedPart: return "UndersizedPart";
    case Errc::TooSmall: return "TooSmall";
    case Errc::SicVerificationFailed: return "SicVerificationFailed";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::ParseError: return "ParseError";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::SizeLimitExceeded: return "SizeLimitExceeded";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::UsageError: return "UsageError";
  }
  return "Unknown";
}

/// True for failures caused by a size budget or an iteration cap rather than bad input.
constexpr bool is_resource_error(Errc code) {
  return code == Errc::BudgetExceeded || code == Errc::SizeLimitExceeded ||
         code == Errc::ConvergenceFailure;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace atlas
