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

#ifndef MUTSPEC_ERROR_H_
#define MUTSPEC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mutspec {

// Every failure the toolkit reports is one of these codes. The CLI maps
// them onto process exit codes, so adding a code means extending
// ExitCodeFor as well.
enum class ErrorCode {
  kSyntaxError,
  kUnknownAdapter,
  kMalformedReport,
  kUnknownOperator,
  kUnparseableResult,
  kTemplateMissing,
  kRenderError,
  kSpawnFailure,
  kKExceedsN,
  kFractionOutOfRange,
  kCoverageAbsent,
  kProviderError,
  kCountExceedsPopulation,
  kTooFewMutants,
  kMissingTests,
  kEditOutsideAllowlist,
  kClientError,
  kHttpError,
  kTimeout,
  kReplayMiss,
  kAuthMissing,
  kDuplicateKey,
  kIoError,
  kMissingSample,
  kEmptySelection,
  kInvalidArgument,
  kUsage,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// HTTP failures keep their status so retry policy can tell 5xx from 4xx.
class HttpError : public Error {
 public:
  HttpError(int status, const std::string& message)
      : Error(ErrorCode::kHttpError,
              "status " + std::to_string(status) + ": " + message),
        status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

// Process exit codes used by the CLI: 1 domain failure, 2 usage error,
// 3 I/O or client error.
int ExitCodeFor(ErrorCode code);

// Internal invariant check. Violations are programming errors, not domain
// failures, so they throw std::logic_error rather than Error.
void Ensure(bool condition, std::string_view what);

}  // namespace mutspec

#endif  // MUTSPEC_ERROR_H_
