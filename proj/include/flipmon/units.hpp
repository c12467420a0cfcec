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

#include <numbers>

namespace flipmon {

/// CODATA-2018 values. e and h are exact by SI definition.
namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
}  // namespace constants

/// The single place where file units (micrometres) become SI.
inline constexpr double um_to_m(double um) { return um * 1e-6; }
inline constexpr double m_to_um(double m) { return m * 1e6; }
inline constexpr double nm_to_m(double nm) { return nm * 1e-9; }

inline constexpr double joules_to_ghz(double e) { return e / constants::planck * 1e-9; }
inline constexpr double ghz_to_joules(double f) { return f * 1e9 * constants::planck; }

}  // namespace flipmon
