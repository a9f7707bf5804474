// Copyright 2026 The vpkit Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace vpkit {

/// Base class of every error raised by the library. The exit code is what
/// the command-line driver reports when the error escapes a command.
class Error : public std::runtime_error
{
  public:
    explicit Error(std::string const& what, int exit_code = 4)
        : std::runtime_error(what), exit_code_(exit_code)
    {
    }

    int exit_code() const noexcept { return exit_code_; }
    virtual char const* kind() const noexcept { return "internal"; }

  private:
    int exit_code_;
};

/// Invalid arguments (bad bounds, mismatched grids, ...).
class ArgumentError : public Error
{
  public:
    explicit ArgumentError(std::string const& what) : Error(what, 4) {}
    char const* kind() const noexcept override { return "argument"; }
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error
{
  public:
    explicit DomainError(std::string const& what) : Error(what, 4) {}
    char const* kind() const noexcept override { return "domain"; }
};

class UnsupportedModelError : public Error
{
  public:
    explicit UnsupportedModelError(std::string const& what) : Error(what, 4)
    {
    }
    char const* kind() const noexcept override { return "unsupported_model"; }
};

/// An iterative procedure (eigenvalue search, partial-wave sum, ...) did not
/// converge. `diagnostics` carries a machine-readable JSON fragment.
class ConvergenceError : public Error
{
  public:
    ConvergenceError(std::string const& what, std::string diagnostics = "{}")
        : Error(what, 3), diagnostics_(std::move(diagnostics))
    {
    }
    char const* kind() const noexcept override { return "convergence"; }
    std::string const& diagnostics() const noexcept { return diagnostics_; }

  private:
    std::string diagnostics_;
};

class ConfigError : public Error
{
  public:
    explicit ConfigError(std::string const& what) : Error(what, 2) {}
    char const* kind() const noexcept override { return "config"; }
};

}  // namespace vpkit
