#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tmw {

enum class ErrorCode {
  UnknownParent,
  DuplicateName,
  InvalidName,
  UnknownThimac,
  UnknownStage,
  DuplicateStageKind,
  InvalidPort,
  IllegalFlow,
  DuplicateFlow,
  SameThimacTrigger,
  DuplicateTrigger,
  EmptyRegion,
  DuplicateEvent,
  UnknownEvent,
  UnknownEndpoint,
  UnreachableEvent,
  MixedChoice,
  RegionForeign,
  InvalidBehavior,
  InvalidModel,
  NotACreateStage,
  NegativeAmount,
  InvalidAmount,
  DuplicateConfig,
  UnknownConfig,
  UnknownCase,
  MalformedJson,
  SchemaVersion,
  MalformedXml,
  MissingStartEvent,
  InvalidBpmn,
  DegenerateGateway,
  EmptyLattice,
  AlreadySettled,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace tmw
