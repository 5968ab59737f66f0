#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flapkin {

enum class ErrorCode {
  // mechanism validation
  MissingDriver,
  OpenChain,
  NonPositiveLength,
  DanglingOutput,
  MobilityMismatch,
  InvalidSpec,
  // kinematics
  NotAssemblable,
  SingularConfiguration,
  SingularJacobian,
  NoConvergence,
  BranchSwitch,
  ZeroRatio,
  // fitting / analysis
  GridMismatch,
  EmptyResidual,
  NoFeasibleStart,
  BudgetExhausted,
  UnknownParameter,
  NonPositiveStretch,
  InvalidArgument,
  // file formats
  SyntaxError,
  SchemaError,
  VersionError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for every domain failure. The code is stable and
/// machine-readable; the phase (radians) is attached when a kinematic solve
/// fails at a specific crank angle.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<double> phase = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<double>& phase() const noexcept { return phase_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Copy of this error annotated with a phase (keeps an existing phase).
  Error at_phase(double phase) const;
  /// Copy with a context prefix prepended to the message.
  Error with_context(std::string_view context) const;

 private:
  ErrorCode code_;
  std::optional<double> phase_;
  std::string detail_;
};

}  // namespace flapkin
