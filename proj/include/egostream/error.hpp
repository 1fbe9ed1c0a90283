// Copyright (C) 2026 egostream contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace egostream {

enum class ErrorCode {
    IoError,
    MalformedManifest,
    FormatMismatch,
    TruncatedStream,
    NonFiniteValue,
    DimensionMismatch,
    MalformedAnnotation,
    InvalidConfig,
    NoPrediction,
    AnnotationMissing,
};

std::string_view to_string(ErrorCode code);

/// Every module reports failures through this exception; `code()` lets callers
/// (and tests) dispatch without parsing the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace egostream
