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

#include <filesystem>
#include <ostream>

#include "flipmon/solver.hpp"

namespace flipmon {

/// Writes `<stem>.json` (dims, coordinates in um, drive, residual) and
/// `<stem>.bin` (little-endian float64 potentials, x fastest).
void write_field_dump(const FieldSolution& solution, const std::filesystem::path& stem);

struct FieldDump {
    std::array<std::vector<double>, 3> lines_um;
    std::vector<double> potential;
};

FieldDump read_field_dump(const std::filesystem::path& stem);

/// `u_um,v_um,E_V_per_m` rows, v outer.
void write_slice_csv(std::ostream& out, const FieldSlice& slice);

/// Heat map with a fixed perceptual ramp and min/max annotations.
void write_slice_svg(std::ostream& out, const FieldSlice& slice);

}  // namespace flipmon
