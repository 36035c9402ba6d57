// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/error.hpp"

namespace zoomkit {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingManifest: return "MissingManifest";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kMissingMandatoryRole: return "MissingMandatoryRole";
    case ErrorCode::kNegativeAttention: return "NegativeAttention";
    case ErrorCode::kAttentionMassExceeded: return "AttentionMassExceeded";
    case ErrorCode::kEmptyHeadAxis: return "EmptyHeadAxis";
    case ErrorCode::kTokenGridMismatch: return "TokenGridMismatch";
    case ErrorCode::kLayerOutOfRange: return "LayerOutOfRange";
    case ErrorCode::kGeometryMismatch: return "GeometryMismatch";
    case ErrorCode::kGenericFlagMissing: return "GenericFlagMissing";
    case ErrorCode::kMissingGradients: return "MissingGradients";
    case ErrorCode::kMissingConnectorAttention: return "MissingConnectorAttention";
    case ErrorCode::kWrongChannelCount: return "WrongChannelCount";
    case ErrorCode::kGridSmallerThanPatches: return "GridSmallerThanPatches";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyMap: return "EmptyMap";
    case ErrorCode::kNonPositiveResolution: return "NonPositiveResolution";
    case ErrorCode::kDegenerateBBox: return "DegenerateBBox";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kBlockMapMismatch: return "BlockMapMismatch";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMissingPredictions: return "MissingPredictions";
    case ErrorCode::kMissingGenericBundle: return "MissingGenericBundle";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace zoomkit
