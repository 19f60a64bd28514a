// SPDX-License-Identifier: Apache-2.0
//
// polmimo - dual-polarized Ricean MIMO channel modelling and analysis
// Copyright (C) 2026 The polmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace polmimo
{

// Argument errors use std::invalid_argument directly. The types below cover the
// remaining failure classes; the CLI maps each one to its own exit code.

/// Matrix expected to be positive semidefinite has a significantly negative eigenvalue.
class NotPsdError : public std::domain_error
{
public:
    explicit NotPsdError(const std::string &what) : std::domain_error(what) {}
};

/// Input data admits no meaningful result (zero co-polarized power, all-zero channel, ...).
class DegenerateInputError : public std::runtime_error
{
public:
    explicit DegenerateInputError(const std::string &what) : std::runtime_error(what) {}
};

/// A numerical evaluation produced a non-finite value.
class NumericalError : public std::runtime_error
{
public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

/// Malformed snapshot file. `offset()` is the byte position where parsing failed.
class FormatError : public std::runtime_error
{
public:
    FormatError(const std::string &what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset)
    {
    }
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// Malformed configuration. `line()` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string &what, int line = 0, std::string field = {})
        : std::runtime_error(format(what, line, field)), line_(line), field_(std::move(field))
    {
    }
    int line() const noexcept { return line_; }
    const std::string &field() const noexcept { return field_; }

private:
    static std::string format(const std::string &what, int line, const std::string &field)
    {
        std::string out;
        if (line > 0)
            out += "line " + std::to_string(line) + ": ";
        if (!field.empty())
            out += "'" + field + "': ";
        return out + what;
    }
    int line_;
    std::string field_;
};

} // namespace polmimo
