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

#include "flipmon/templates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "flipmon/error.hpp"

namespace flipmon {

namespace {

template <typename P>
using ParamTable = std::vector<std::pair<const char*, double P::*>>;

const ParamTable<FlipmonParams>& flipmon_table() {
    static const ParamTable<FlipmonParams> table{
        {"pad_side", &FlipmonParams::pad_side},
        {"gap_d", &FlipmonParams::gap_d},
        {"bump_radius", &FlipmonParams::bump_radius},
        {"substrate_thickness", &FlipmonParams::substrate_thickness},
        {"sub_epsilon", &FlipmonParams::sub_epsilon},
        {"island_margin", &FlipmonParams::island_margin},
        {"junction_gap", &FlipmonParams::junction_gap},
        {"top_pad_overhang", &FlipmonParams::top_pad_overhang},
        {"ground_clearance_top", &FlipmonParams::ground_clearance_top},
        {"ground_clearance_bottom", &FlipmonParams::ground_clearance_bottom},
        {"domain_factor", &FlipmonParams::domain_factor},
        {"ground_margin", &FlipmonParams::ground_margin},
        {"metal_thickness", &FlipmonParams::metal_thickness},
    };
    return table;
}

const ParamTable<PlanarParams>& planar_table() {
    static const ParamTable<PlanarParams> table{
        {"pad_width", &PlanarParams::pad_width},
        {"pad_length", &PlanarParams::pad_length},
        {"pad_gap", &PlanarParams::pad_gap},
        {"ground_clearance", &PlanarParams::ground_clearance},
        {"substrate_thickness", &PlanarParams::substrate_thickness},
        {"air_height", &PlanarParams::air_height},
        {"sub_epsilon", &PlanarParams::sub_epsilon},
        {"domain_factor", &PlanarParams::domain_factor},
        {"ground_margin", &PlanarParams::ground_margin},
        {"metal_thickness", &PlanarParams::metal_thickness},
    };
    return table;
}

template <typename P>
void set_from_table(const ParamTable<P>& table, P& params, const std::string& name, double value) {
    for (const auto& [key, member] : table) {
        if (name == key) {
            params.*member = value;
            return;
        }
    }
    throw ConfigError("unknown template parameter '" + name + "'");
}

template <typename P>
nlohmann::json table_to_json(const ParamTable<P>& table, const P& params) {
    nlohmann::json j;
    for (const auto& [key, member] : table) j[key] = params.*member;
    return j;
}

Solid make_solid(std::string name, Box box, std::string material,
                 std::optional<std::string> net = std::nullopt, std::string label = {}) {
    return Solid{std::move(name), box, std::move(material), std::move(net), std::move(label)};
}

/// Square frame [-outer, outer]^2 minus [-inner, inner]^2 as four
/// non-overlapping rectangles.
void add_frame(std::vector<Solid>& out, const std::string& name, double inner, double outer,
               double z0, double z1, const std::string& material, const std::string& net) {
    out.push_back(make_solid(name + "_s", Box::from_extents(-outer, outer, -outer, -inner, z0, z1),
                             material, net));
    out.push_back(make_solid(name + "_n", Box::from_extents(-outer, outer, inner, outer, z0, z1),
                             material, net));
    out.push_back(make_solid(name + "_w", Box::from_extents(-outer, -inner, -inner, inner, z0, z1),
                             material, net));
    out.push_back(make_solid(name + "_e", Box::from_extents(inner, outer, -inner, inner, z0, z1),
                             material, net));
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw GeometryError(std::string(what) + " must be positive");
    }
}

}  // namespace

double FlipmonParams::bump_side() const { return bump_radius * std::sqrt(std::numbers::pi); }
double FlipmonParams::island_side() const { return bump_side() + 2.0 * island_margin; }
double FlipmonParams::ring_opening() const { return island_side() + 2.0 * junction_gap; }
double FlipmonParams::device_half_width() const {
    return 0.5 * pad_side + std::max(top_pad_overhang + ground_clearance_top, ground_clearance_bottom);
}

DeviceGeometry flipmon_template(const FlipmonParams& p) {
    require_positive(p.pad_side, "pad_side");
    require_positive(p.gap_d, "gap_d");
    require_positive(p.bump_radius, "bump_radius");
    require_positive(p.substrate_thickness, "substrate_thickness");
    require_positive(p.island_margin, "island_margin");
    require_positive(p.junction_gap, "junction_gap");
    require_positive(p.ground_clearance_top, "ground_clearance_top");
    require_positive(p.ground_clearance_bottom, "ground_clearance_bottom");
    require_positive(p.metal_thickness, "metal_thickness");
    if (!(p.sub_epsilon >= 1.0)) throw GeometryError("sub_epsilon must be >= 1");
    if (!(p.domain_factor > 1.0)) throw GeometryError("domain_factor must exceed 1");
    if (p.top_pad_overhang < 0.0) throw GeometryError("top_pad_overhang must be non-negative");
    // The ring needs metal between its opening and its outer edge.
    if (p.ring_opening() >= p.pad_side) {
        throw GeometryError("bump and junction island do not fit inside the pad footprint");
    }

    const double half = 0.5 * p.pad_side;
    const double d = p.gap_d;
    const double tm = p.metal_thickness;
    const double H = p.substrate_thickness;
    const double W = p.domain_factor * p.device_half_width();
    const double ground_outer = W - p.ground_margin;
    const double top_half = half + p.top_pad_overhang;
    if (ground_outer <= std::max(top_half + p.ground_clearance_top, half + p.ground_clearance_bottom)) {
        throw GeometryError("ground margin leaves no ground plane");
    }

    DeviceGeometry g;
    g.domain = Box::from_extents(-W, W, -W, W, -H, d + H);
    g.materials = {
        {"vacuum", MaterialKind::vacuum, 1.0},
        {"sapphire", MaterialKind::dielectric, p.sub_epsilon},
        {"tantalum", MaterialKind::conductor, 1.0},
        {"indium", MaterialKind::conductor, 1.0},
    };
    g.nets = {{"pad_top", NetRole::pad_top},
              {"pad_bottom", NetRole::pad_bottom},
              {"ground", NetRole::ground}};
    g.chip_split_z = 0.5 * d;
    g.outer_boundary = all_faces(BoundaryKind::grounded);

    auto& s = g.solids;
    s.push_back(make_solid("carrier", Box::from_extents(-W, W, -W, W, -H, 0.0), "sapphire"));
    s.push_back(make_solid("chip", Box::from_extents(-W, W, -W, W, d, d + H), "sapphire"));

    s.push_back(make_solid("top_pad",
                           Box::from_extents(-top_half, top_half, -top_half, top_half, d, d + tm),
                           "tantalum", "pad_top"));
    add_frame(s, "top_ground", top_half + p.ground_clearance_top, ground_outer, d, d + tm, "tantalum",
              "ground");

    const double hi = 0.5 * p.island_side();
    const double ho = 0.5 * p.ring_opening();
    add_frame(s, "ring_pad", ho, half, -tm, 0.0, "tantalum", "pad_bottom");
    s.push_back(make_solid("island", Box::from_extents(-hi, hi, -hi, hi, -tm, 0.0), "tantalum",
                           "pad_top"));
    add_frame(s, "bottom_ground", half + p.ground_clearance_bottom, ground_outer, -tm, 0.0,
              "tantalum", "ground");

    const double hb = 0.5 * p.bump_side();
    s.push_back(make_solid("bump", Box::from_extents(-hb, hb, -hb, hb, 0.0, d), "indium",
                           "pad_top", "bump"));
    validate(g);
    return g;
}

DeviceGeometry planar_transmon_template(const PlanarParams& p) {
    require_positive(p.pad_width, "pad_width");
    require_positive(p.pad_length, "pad_length");
    require_positive(p.ground_clearance, "ground_clearance");
    require_positive(p.substrate_thickness, "substrate_thickness");
    require_positive(p.air_height, "air_height");
    require_positive(p.metal_thickness, "metal_thickness");
    if (p.pad_gap < 0.0) throw GeometryError("pad_gap must be non-negative");
    if (!(p.sub_epsilon >= 1.0)) throw GeometryError("sub_epsilon must be >= 1");
    if (!(p.domain_factor > 1.0)) throw GeometryError("domain_factor must exceed 1");

    const double hx = 0.5 * p.pad_gap + p.pad_width;
    const double hy = 0.5 * p.pad_length;
    const double cut = std::max(hx, hy) + p.ground_clearance;
    const double W = p.domain_factor * cut;
    const double tm = p.metal_thickness;
    const double H = p.substrate_thickness;

    DeviceGeometry g;
    g.domain = Box::from_extents(-W, W, -W, W, -H, p.air_height);
    g.materials = {
        {"vacuum", MaterialKind::vacuum, 1.0},
        {"sapphire", MaterialKind::dielectric, p.sub_epsilon},
        {"tantalum", MaterialKind::conductor, 1.0},
    };
    g.nets = {{"pad_left", NetRole::pad_bottom},
              {"pad_right", NetRole::pad_top},
              {"ground", NetRole::ground}};
    g.outer_boundary = all_faces(BoundaryKind::grounded);
    auto& s = g.solids;
    s.push_back(make_solid("substrate", Box::from_extents(-W, W, -W, W, -H, 0.0), "sapphire"));
    const double g0 = 0.5 * p.pad_gap;
    s.push_back(make_solid("pad_left", Box::from_extents(-hx, -g0, -hy, hy, -tm, 0.0), "tantalum",
                           "pad_left"));
    s.push_back(make_solid("pad_right", Box::from_extents(g0, hx, -hy, hy, -tm, 0.0), "tantalum",
                           "pad_right"));
    add_frame(s, "ground", cut, W - p.ground_margin, -tm, 0.0, "tantalum", "ground");
    validate(g);
    return g;
}

DeviceGeometry parallel_plate_template(double side, double gap,
                                       const std::vector<DielectricLayer>& layers) {
    require_positive(side, "side");
    require_positive(gap, "gap");
    constexpr double plate = 1.0;
    DeviceGeometry g;
    g.domain = Box::from_extents(0.0, side, 0.0, side, -plate, gap + plate);
    g.materials = {{"vacuum", MaterialKind::vacuum, 1.0}, {"metal", MaterialKind::conductor, 1.0}};
    g.nets = {{"top", NetRole::pad_top}, {"bottom", NetRole::pad_bottom}};
    g.outer_boundary = all_faces(BoundaryKind::insulating);
    g.chip_split_z = 0.5 * gap;
    double z = 0.0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string name = "layer" + std::to_string(i);
        require_positive(layers[i].thickness, "layer thickness");
        if (z + layers[i].thickness > gap * (1.0 + 1e-12)) {
            throw GeometryError("dielectric layers are thicker than the gap");
        }
        g.materials.push_back({name, MaterialKind::dielectric, layers[i].epsilon_r});
        g.solids.push_back(make_solid(name,
                                      Box::from_extents(0.0, side, 0.0, side, z,
                                                        std::min(gap, z + layers[i].thickness)),
                                      name));
        z += layers[i].thickness;
    }
    g.solids.push_back(
        make_solid("bottom", Box::from_extents(0.0, side, 0.0, side, -plate, 0.0), "metal", "bottom"));
    g.solids.push_back(
        make_solid("top", Box::from_extents(0.0, side, 0.0, side, gap, gap + plate), "metal", "top"));
    return g;
}

void set_param(FlipmonParams& params, const std::string& name, double value) {
    set_from_table(flipmon_table(), params, name, value);
}

void set_param(PlanarParams& params, const std::string& name, double value) {
    set_from_table(planar_table(), params, name, value);
}

nlohmann::json to_json(const FlipmonParams& params) { return table_to_json(flipmon_table(), params); }
nlohmann::json to_json(const PlanarParams& params) { return table_to_json(planar_table(), params); }

}  // namespace flipmon
