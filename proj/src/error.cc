#include "kgqa/error.h"

namespace kgqa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kDisconnectedGraph: return "disconnected_graph";
    case ErrorCode::kNoUnknown: return "no_unknown";
    case ErrorCode::kProviderUnavailable: return "provider_unavailable";
    case ErrorCode::kNoPatternsExtracted: return "no_patterns_extracted";
    case ErrorCode::kMalformedModelOutput: return "malformed_model_output";
    case ErrorCode::kEmptyAfterNormalization: return "empty_after_normalization";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kEndpointError: return "endpoint_error";
    case ErrorCode::kMalformedResults: return "malformed_results";
    case ErrorCode::kUnsupportedDialect: return "unsupported_dialect";
    case ErrorCode::kNoAnchorVertices: return "no_anchor_vertices";
    case ErrorCode::kNoViableBGP: return "no_viable_bgp";
    case ErrorCode::kAllPlansFailed: return "all_plans_failed";
    case ErrorCode::kMalformedBenchmark: return "malformed_benchmark";
    case ErrorCode::kConfigError: return "config_error";
    case ErrorCode::kMalformedData: return "malformed_data";
  }
  return "unknown";
}

}  // namespace kgqa
