// Copyright 2026 The Mutspec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mutspec/error.h"

namespace mutspec {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError:
      return "SYNTAX_ERROR";
    case ErrorCode::kUnknownAdapter:
      return "UNKNOWN_ADAPTER";
    case ErrorCode::kMalformedReport:
      return "MALFORMED_REPORT";
    case ErrorCode::kUnknownOperator:
      return "UNKNOWN_OPERATOR";
    case ErrorCode::kUnparseableResult:
      return "UNPARSEABLE_RESULT";
    case ErrorCode::kTemplateMissing:
      return "TEMPLATE_MISSING";
    case ErrorCode::kRenderError:
      return "RENDER_ERROR";
    case ErrorCode::kSpawnFailure:
      return "SPAWN_FAILURE";
    case ErrorCode::kKExceedsN:
      return "K_EXCEEDS_N";
    case ErrorCode::kFractionOutOfRange:
      return "FRACTION_OUT_OF_RANGE";
    case ErrorCode::kCoverageAbsent:
      return "COVERAGE_ABSENT";
    case ErrorCode::kProviderError:
      return "PROVIDER_ERROR";
    case ErrorCode::kCountExceedsPopulation:
      return "COUNT_EXCEEDS_POPULATION";
    case ErrorCode::kTooFewMutants:
      return "TOO_FEW_MUTANTS";
    case ErrorCode::kMissingTests:
      return "MISSING_TESTS";
    case ErrorCode::kEditOutsideAllowlist:
      return "EDIT_OUTSIDE_ALLOWLIST";
    case ErrorCode::kClientError:
      return "CLIENT_ERROR";
    case ErrorCode::kHttpError:
      return "HTTP_ERROR";
    case ErrorCode::kTimeout:
      return "TIMEOUT";
    case ErrorCode::kReplayMiss:
      return "REPLAY_MISS";
    case ErrorCode::kAuthMissing:
      return "AUTH_MISSING";
    case ErrorCode::kDuplicateKey:
      return "DUPLICATE_KEY";
    case ErrorCode::kIoError:
      return "IO_ERROR";
    case ErrorCode::kMissingSample:
      return "MISSING_SAMPLE";
    case ErrorCode::kEmptySelection:
      return "EMPTY_SELECTION";
    case ErrorCode::kInvalidArgument:
      return "INVALID_ARGUMENT";
    case ErrorCode::kUsage:
      return "USAGE";
  }
  return "UNKNOWN";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return 2;
    case ErrorCode::kIoError:
    case ErrorCode::kSpawnFailure:
    case ErrorCode::kClientError:
    case ErrorCode::kHttpError:
    case ErrorCode::kTimeout:
    case ErrorCode::kReplayMiss:
    case ErrorCode::kAuthMissing:
    case ErrorCode::kProviderError:
      return 3;
    case ErrorCode::kSyntaxError:
    case ErrorCode::kUnknownAdapter:
    case ErrorCode::kMalformedReport:
    case ErrorCode::kUnknownOperator:
    case ErrorCode::kUnparseableResult:
    case ErrorCode::kTemplateMissing:
    case ErrorCode::kRenderError:
    case ErrorCode::kKExceedsN:
    case ErrorCode::kFractionOutOfRange:
    case ErrorCode::kCoverageAbsent:
    case ErrorCode::kCountExceedsPopulation:
    case ErrorCode::kTooFewMutants:
    case ErrorCode::kMissingTests:
    case ErrorCode::kEditOutsideAllowlist:
    case ErrorCode::kDuplicateKey:
    case ErrorCode::kMissingSample:
    case ErrorCode::kEmptySelection:
    case ErrorCode::kInvalidArgument:
      return 1;
  }
  return 1;
}

void Ensure(bool condition, std::string_view what) {
  if (!condition) {
    throw std::logic_error("invariant violated: " + std::string(what));
  }
}

}  // namespace mutspec
