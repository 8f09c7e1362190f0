// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nnsimplify {

/// Failure categories surfaced by the library. Malformed input and exhausted
/// capability are errors; inconclusive verification outcomes are values
/// (Unknown verdicts), never exceptions.
enum class ErrorKind {
    MalformedHeader,
    DimensionMismatch,
    NonNumericToken,
    NonPositiveRange,
    TooLarge,
    InputUnreadable,
    InvalidConfig,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedHeader: return "MalformedHeader";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonNumericToken: return "NonNumericToken";
        case ErrorKind::NonPositiveRange: return "NonPositiveRange";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::InputUnreadable: return "InputUnreadable";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace nnsimplify
