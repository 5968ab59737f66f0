#include "flapkin/errors.hpp"

#include <fmt/format.h>

#include <numbers>

namespace flapkin {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingDriver: return "MissingDriver";
    case ErrorCode::OpenChain: return "OpenChain";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::DanglingOutput: return "DanglingOutput";
    case ErrorCode::MobilityMismatch: return "MobilityMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NotAssemblable: return "NotAssemblable";
    case ErrorCode::SingularConfiguration: return "SingularConfiguration";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BranchSwitch: return "BranchSwitch";
    case ErrorCode::ZeroRatio: return "ZeroRatio";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyResidual: return "EmptyResidual";
    case ErrorCode::NoFeasibleStart: return "NoFeasibleStart";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::NonPositiveStretch: return "NonPositiveStretch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::VersionError: return "VersionError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail, const std::optional<double>& phase) {
  if (phase) {
    return fmt::format("{}: {} (phi = {:.6g} deg)", to_string(code), detail, *phase * 180.0 / std::numbers::pi);
  }
  return fmt::format("{}: {}", to_string(code), detail);
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<double> phase)
    : std::runtime_error(compose(code, message, phase)), code_(code), phase_(phase), detail_(message) {}

Error Error::at_phase(double phase) const {
  return Error(code_, detail_, phase_ ? phase_ : std::optional<double>(phase));
}

Error Error::with_context(std::string_view context) const {
  return Error(code_, fmt::format("{}: {}", context, detail_), phase_);
}

}  // namespace flapkin
