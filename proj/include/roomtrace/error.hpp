// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROOMTRACE_ERROR_HPP
#define ROOMTRACE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace roomtrace {

enum class ErrorCode {
  kMalformedHeader,
  kNonFiniteCoordinate,
  kEmptyCloud,
  kNonPositiveVoxel,
  kInvalidArgument,
  kDegenerateGeometry,
  kTooFewPoints,
  kDegenerateExtent,
  kPointOutsideFrame,
  kEmptyCounts,
  kIoFailure,
  kEmptyRaster,
  kBackendUnavailable,
  kFrameMismatch,
  kDecodeFailure,
  kDimensionMismatch,
  kNoCandidates,
  kMultipleComponents,
  kDegenerateAfterMerge,
  kOverlappingRooms,
  kEmptyGroundTruth,
  kInvalidLayout,
  kConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code and, once it has crossed a
/// pipeline stage boundary, the name of that stage.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(ErrorCode code, std::string stage, const std::string& message)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

  /// Same error re-tagged with the stage it escaped from.
  [[nodiscard]] Error with_stage(std::string stage) const {
    return Error(code_, std::move(stage), what());
  }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace roomtrace

#endif  // ROOMTRACE_ERROR_HPP
