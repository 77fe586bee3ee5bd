/*
* Copyright (C) 2026 The wihost Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wihost
{

enum class ErrorCode
{
    ParseError,
    ValidationError,
    ParamsMismatch,
    StepLimitExceeded,
    NonFiniteState,
    DegenerateDecay,
    NewtonDiverged,
    ConvergedToBoundary,
    BracketFailure,
    InvalidSweepValue,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError:
        return "ParseError";
    case ErrorCode::ValidationError:
        return "ValidationError";
    case ErrorCode::ParamsMismatch:
        return "ParamsMismatch";
    case ErrorCode::StepLimitExceeded:
        return "StepLimitExceeded";
    case ErrorCode::NonFiniteState:
        return "NonFiniteState";
    case ErrorCode::DegenerateDecay:
        return "DegenerateDecay";
    case ErrorCode::NewtonDiverged:
        return "NewtonDiverged";
    case ErrorCode::ConvergedToBoundary:
        return "ConvergedToBoundary";
    case ErrorCode::BracketFailure:
        return "BracketFailure";
    case ErrorCode::InvalidSweepValue:
        return "InvalidSweepValue";
    case ErrorCode::IoError:
        return "IoError";
    }
    return "Unknown";
}

/// True for failures of the numerical machinery (as opposed to bad input).
constexpr bool is_numerical(ErrorCode code)
{
    switch (code) {
    case ErrorCode::StepLimitExceeded:
    case ErrorCode::NonFiniteState:
    case ErrorCode::DegenerateDecay:
    case ErrorCode::NewtonDiverged:
    case ErrorCode::ConvergedToBoundary:
    case ErrorCode::BracketFailure:
        return true;
    default:
        return false;
    }
}

/**
 * @brief Single exception type of the library. The code identifies the failure
 * category; the message carries the details (key path, line number, time, ...).
 */
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message)
        , m_code(code)
    {
    }

    ErrorCode code() const noexcept
    {
        return m_code;
    }

    std::string_view category() const noexcept
    {
        return to_string(m_code);
    }

private:
    ErrorCode m_code;
};

} // namespace wihost
