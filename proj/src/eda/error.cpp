// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/error.hpp"

namespace eda {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kSingularCovariance: return "singular covariance";
    case ErrorCode::kNumerical: return "numerical failure";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kCheckFailed: return "check failed";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace eda
