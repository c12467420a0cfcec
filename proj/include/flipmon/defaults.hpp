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

#include <nlohmann/json.hpp>

namespace flipmon::defaults {

// Physical defaults. Every run manifest embeds this table verbatim.
inline constexpr double interface_thickness_nm = 3.0;
inline constexpr double interface_epsilon = 10.0;
inline constexpr double vacuum_gap_um = 5.0;
inline constexpr double substrate_epsilon = 11.45;  // isotropic sapphire approximation
inline constexpr double metal_thickness_um = 0.12;

// Solver defaults.
inline constexpr double solver_tolerance = 1e-8;
inline constexpr std::size_t solver_max_iterations = 50000;

// Transmon defaults.
inline constexpr int charge_cutoff = 35;
inline constexpr double junction_capacitance = 0.0;
inline constexpr double ic_sanity_bound = 10e-3;  // A

inline nlohmann::json as_json() {
    return {
        {"interface_thickness_nm", interface_thickness_nm},
        {"interface_epsilon", interface_epsilon},
        {"vacuum_gap_um", vacuum_gap_um},
        {"substrate_epsilon", substrate_epsilon},
        {"metal_thickness_um", metal_thickness_um},
        {"solver_tolerance", solver_tolerance},
        {"solver_max_iterations", solver_max_iterations},
        {"charge_cutoff", charge_cutoff},
        {"junction_capacitance_F", junction_capacitance},
        {"ic_sanity_bound_A", ic_sanity_bound},
    };
}

}  // namespace flipmon::defaults
