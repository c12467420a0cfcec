// Copyright 2026 The Flipmon Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flipmon {

/// Root of every error raised by the toolkit.
///
/// Three families map onto the CLI exit-code taxonomy: ConfigError (2),
/// NumericalError (3) and IoError (4).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class NumericalError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

// geometry
class GeometryError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};
class OverlapError : public GeometryError {
  public:
    using GeometryError::GeometryError;
};
class DanglingReference : public GeometryError {
  public:
    using GeometryError::GeometryError;
};
class DegenerateSolid : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

// solver
class MeshBudgetExceeded : public ConfigError {
  public:
    using ConfigError::ConfigError;
};
class NetNotFound : public ConfigError {
  public:
    using ConfigError::ConfigError;
};
class PlaneOutsideDomain : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

class NoConvergence : public NumericalError {
  public:
    NoConvergence(std::size_t iterations, double residual)
        : NumericalError("no convergence after " + std::to_string(iterations) +
                         " iterations (relative residual " + std::to_string(residual) + ")"),
          iterations_(iterations),
          residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

  private:
    std::size_t iterations_;
    double residual_;
};

// participation
class RegionEmpty : public NumericalError {
  public:
    using NumericalError::NumericalError;
};
class EmptySurfaceSet : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// transmon
class MissingNet : public ConfigError {
  public:
    using ConfigError::ConfigError;
};
class NonPositiveCSigma : public NumericalError {
  public:
    using NumericalError::NumericalError;
};
class CutoffTooSmall : public NumericalError {
  public:
    using NumericalError::NumericalError;
};
class NoRoot : public NumericalError {
  public:
    using NumericalError::NumericalError;
};
class Ambiguous : public NumericalError {
  public:
    using NumericalError::NumericalError;
};
class NonPositive : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

// loss
class NegativeTangent : public NumericalError {
  public:
    using NumericalError::NumericalError;
};
class SingularSystem : public NumericalError {
  public:
    using NumericalError::NumericalError;
};
class StraddlePoint : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

}  // namespace flipmon
