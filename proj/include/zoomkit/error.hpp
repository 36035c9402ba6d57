// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zoomkit {

// Numeric values are shared with zk_status in zoomkit.h; keep both in sync.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kIoFailure = 2,
  kParseError = 3,
  kMissingManifest = 10,
  kShapeMismatch = 11,
  kMissingMandatoryRole = 12,
  kNegativeAttention = 13,
  kAttentionMassExceeded = 14,
  kEmptyHeadAxis = 20,
  kTokenGridMismatch = 21,
  kLayerOutOfRange = 22,
  kGeometryMismatch = 23,
  kGenericFlagMissing = 24,
  kMissingGradients = 25,
  kMissingConnectorAttention = 26,
  kWrongChannelCount = 30,
  kGridSmallerThanPatches = 31,
  kDimensionMismatch = 32,
  kEmptyMap = 40,
  kNonPositiveResolution = 41,
  kDegenerateBBox = 42,
  kOutOfBounds = 43,
  kBlockMapMismatch = 44,
  kDegenerateInput = 50,
  kEmptyInput = 51,
  kMissingPredictions = 52,
  kMissingGenericBundle = 53,
  kInvalidConfig = 60,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace zoomkit
