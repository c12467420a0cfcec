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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipmon/defaults.hpp"
#include "flipmon/geometry.hpp"

namespace flipmon {

/// Flip-chip vacuum-gap transmon. All lengths in micrometres.
///
/// Bottom chip (carrier, z <= 0): a square ring pad, the junction island in
/// the ring opening and a ground plane. Top chip (z >= gap_d): a square pad
/// facing the ring and a ground plane. A square indium pillar with the
/// cross-section of a round bump of `bump_radius` joins the island to the
/// top pad. Metal films are inlaid flush with the substrate surfaces.
struct FlipmonParams {
    double pad_side = 148.0;
    double gap_d = defaults::vacuum_gap_um;
    double bump_radius = 10.0;
    double substrate_thickness = 150.0;
    double sub_epsilon = defaults::substrate_epsilon;

    double island_margin = 5.0;     // island edge beyond the bump edge
    double junction_gap = 15.0;     // island to ring inner edge
    double top_pad_overhang = 20.0;  // top pad edge beyond the ring outer edge
    double ground_clearance_top = 40.0;
    double ground_clearance_bottom = 40.0;
    double domain_factor = 3.0;     // lateral half-width / device half-width
    double ground_margin = 10.0;    // ground plane stops short of the box
    double metal_thickness = defaults::metal_thickness_um;

    double bump_side() const;
    double island_side() const;
    double ring_opening() const;
    double device_half_width() const;
};

/// Throws GeometryError if the bump does not fit inside the pad footprint or
/// any dimension is non-positive.
DeviceGeometry flipmon_template(const FlipmonParams& params);

/// Coplanar floating two-pad transmon on a single substrate.
struct PlanarParams {
    double pad_width = 250.0;    // along x
    double pad_length = 400.0;   // along y
    double pad_gap = 30.0;       // pad-to-pad separation along x
    double ground_clearance = 60.0;
    double substrate_thickness = 300.0;
    double air_height = 300.0;
    double sub_epsilon = defaults::substrate_epsilon;
    double domain_factor = 3.0;
    double ground_margin = 10.0;
    double metal_thickness = defaults::metal_thickness_um;
};

/// Pads are mirror images about x = 0. Zero separation raises OverlapError.
DeviceGeometry planar_transmon_template(const PlanarParams& params);

struct DielectricLayer {
    double thickness = 0.0;  // um
    double epsilon_r = 1.0;
};

/// Two plates covering the whole lateral cross-section of an insulating box,
/// `gap` apart. Optional layers fill the gap from the bottom plate upward;
/// any remainder is vacuum. The field between the plates is exactly 1D.
DeviceGeometry parallel_plate_template(double side, double gap,
                                       const std::vector<DielectricLayer>& layers = {});

/// Applies "name=value" overrides to template parameters. Unknown names
/// raise ConfigError.
void set_param(FlipmonParams& params, const std::string& name, double value);
void set_param(PlanarParams& params, const std::string& name, double value);
nlohmann::json to_json(const FlipmonParams& params);
nlohmann::json to_json(const PlanarParams& params);

}  // namespace flipmon
