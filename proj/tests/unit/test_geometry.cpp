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


#include <gtest/gtest.h>

#include <cmath>

#include "flipmon/error.hpp"
#include "flipmon/geometry.hpp"
#include "flipmon/geometry_io.hpp"
#include "flipmon/templates.hpp"
#include "oracles.hpp"

namespace flipmon {
namespace {

DeviceGeometry vacuum_box() {
    DeviceGeometry g;
    g.domain = Box::from_extents(0, 10, 0, 10, 0, 10);
    return g;
}

DeviceGeometry two_pads(double z_gap) {
    DeviceGeometry g = vacuum_box();
    g.materials = {{"metal", MaterialKind::conductor, 1.0}};
    g.nets = {{"a", NetRole::pad_top}, {"b", NetRole::pad_bottom}};
    g.solids = {{"pa", Box::from_extents(2, 8, 2, 8, 5 + z_gap, 6 + z_gap), "metal", "a", ""},
                {"pb", Box::from_extents(2, 8, 2, 8, 4, 5), "metal", "b", ""}};
    return g;
}

TEST(Validate, EmptyVacuumBoxHasNoNets) {
    const ValidatedGeometry v = validate(vacuum_box());
    EXPECT_EQ(v.net_count(), 0u);
    EXPECT_TRUE(v.find_material("vacuum").has_value());
}

TEST(Validate, SameNetOverlapIsAUnion) {
    DeviceGeometry g = vacuum_box();
    g.materials = {{"metal", MaterialKind::conductor, 1.0}};
    g.nets = {{"a", NetRole::other}};
    g.solids = {{"p1", Box::from_extents(1, 5, 1, 5, 1, 2), "metal", "a", ""},
                {"p2", Box::from_extents(3, 7, 3, 7, 1, 2), "metal", "a", ""}};
    EXPECT_NO_THROW(validate(g));
}

TEST(Validate, SharedFaceBetweenPadsIsOverlap) {
    EXPECT_THROW(validate(two_pads(0.0)), OverlapError);
    EXPECT_NO_THROW(validate(two_pads(0.5)));
}

TEST(Validate, DanglingAndDegenerate) {
    DeviceGeometry g = two_pads(1.0);
    g.solids[0].material = "copper";
    EXPECT_THROW(validate(g), DanglingReference);
    g = two_pads(1.0);
    g.solids[0].net = "c";
    EXPECT_THROW(validate(g), DanglingReference);
    g = two_pads(1.0);
    g.solids[1].bounds.hi[0] = g.solids[1].bounds.lo[0];
    EXPECT_THROW(validate(g), DegenerateSolid);
    g = two_pads(1.0);
    g.solids[0].bounds.hi[2] = 11.0;
    EXPECT_THROW(validate(g), GeometryError);
}

TEST(Validate, ChipSideFollowsSplitPlane) {
    DeviceGeometry g = vacuum_box();
    g.chip_split_z = 5.0;
    const ValidatedGeometry v = validate(g);
    EXPECT_EQ(v.side_of(6.0), ChipSide::top);
    EXPECT_EQ(v.side_of(4.0), ChipSide::bottom);
}

const Solid& solid_named(const DeviceGeometry& g, const std::string& name) {
    for (const auto& s : g.solids) {
        if (s.name == name) return s;
    }
    throw std::runtime_error("no solid " + name);
}

TEST(FlipmonTemplate, TopPadStartsOneGapAboveBottomMetal) {
    for (double d : {4.6, 5.0, 5.4}) {
        FlipmonParams p;
        p.gap_d = d;
        const DeviceGeometry g = flipmon_template(p);
        const Box top = solid_named(g, "top_pad").bounds;
        double bottom_metal = -1e9;
        for (const auto& s : g.solids) {
            if (s.net && *s.net == "pad_bottom") bottom_metal = std::max(bottom_metal, s.bounds.hi[2]);
        }
        EXPECT_NEAR(top.lo[2] - bottom_metal, d, 1e-12);
    }
}

TEST(FlipmonTemplate, BumpJoinsIslandToTopPad) {
    const DeviceGeometry g = flipmon_template({});
    const Solid& bump = solid_named(g, "bump");
    EXPECT_EQ(bump.label, "bump");
    EXPECT_EQ(*bump.net, "pad_top");
    EXPECT_NEAR(bump.bounds.extent(0) * bump.bounds.extent(1), oracle::kPi * 10.0 * 10.0, 1e-9);
}

TEST(FlipmonTemplate, DegenerateBumpIsRejected) {
    FlipmonParams p;
    p.bump_radius = 0.0;
    EXPECT_THROW(flipmon_template(p), GeometryError);
    p = {};
    p.bump_radius = 100.0;
    EXPECT_THROW(flipmon_template(p), GeometryError);
}

TEST(FlipmonTemplate, IdealPlateArithmetic) {
    // 220.5 um square plates 5 um apart.
    const double c = oracle::plate_capacitance(220.5 * 220.5, 5.0);
    EXPECT_NEAR(c * 1e15, 86.1, 0.05);
    EXPECT_NEAR(oracle::ec_ghz(c) * 1e3, 225.0, 0.3);
}

TEST(FlipmonTemplate, ParamOverrides) {
    FlipmonParams p;
    set_param(p, "gap_d", 4.6);
    EXPECT_DOUBLE_EQ(p.gap_d, 4.6);
    EXPECT_THROW(set_param(p, "no_such", 1.0), ConfigError);
    EXPECT_DOUBLE_EQ(to_json(p).at("gap_d").get<double>(), 4.6);
}

TEST(PlanarTemplate, MirrorSymmetricAboutPadMidline) {
    const DeviceGeometry g = planar_transmon_template({});
    const Box l = solid_named(g, "pad_left").bounds;
    const Box r = solid_named(g, "pad_right").bounds;
    EXPECT_DOUBLE_EQ(l.lo[0], -r.hi[0]);
    EXPECT_DOUBLE_EQ(l.hi[0], -r.lo[0]);
    for (int a : {1, 2}) {
        EXPECT_DOUBLE_EQ(l.lo[a], r.lo[a]);
        EXPECT_DOUBLE_EQ(l.hi[a], r.hi[a]);
    }
    EXPECT_DOUBLE_EQ(g.domain.lo[0], -g.domain.hi[0]);
}

TEST(PlanarTemplate, ZeroSeparationIsOverlap) {
    PlanarParams p;
    p.pad_gap = 0.0;
    EXPECT_THROW(planar_transmon_template(p), OverlapError);
}

TEST(PlatesTemplate, LayersMustFitTheGap) {
    EXPECT_THROW(parallel_plate_template(100, 5, {{3.0, 4.0}, {3.0, 2.0}}), GeometryError);
    EXPECT_THROW(parallel_plate_template(100, 0, {}), GeometryError);
    EXPECT_NO_THROW(parallel_plate_template(100, 5, {{2.0, 4.0}}));
}

TEST(GeometryIo, RoundTripPreservesDocument) {
    const DeviceGeometry g = flipmon_template({});
    const nlohmann::json j = geometry_to_json(g);
    const DeviceGeometry back = geometry_from_json(j);
    EXPECT_EQ(geometry_to_json(back), j);
    EXPECT_EQ(back.solids.size(), g.solids.size());
    EXPECT_EQ(back.chip_split_z, g.chip_split_z);
}

TEST(GeometryIo, ObjectBoxesAndClassSelection) {
    const nlohmann::json doc = nlohmann::json::parse(R"({
        "domain": {"x": [0, 10], "y": [0, 10], "z": [0, 10]},
        "materials": [{"name": "m", "kind": "conductor"}],
        "nets": [{"name": "n", "role": "ground"}],
        "solids": [{"name": "s", "box": [1, 2, 1, 2, 1, 2], "material": "m", "net": "n"}],
        "interface": {"thickness_nm": 2, "epsilon": 5, "classes": {"top": ["MA"]}},
        "boundary": "insulating"
    })");
    const DeviceGeometry g = geometry_from_json(doc);
    EXPECT_DOUBLE_EQ(g.interface_spec.thickness_m, 2e-9);
    EXPECT_TRUE(g.interface_spec.is_enabled(InterfaceClass::MA, ChipSide::top));
    EXPECT_FALSE(g.interface_spec.is_enabled(InterfaceClass::SA, ChipSide::top));
    EXPECT_TRUE(g.interface_spec.is_enabled(InterfaceClass::SA, ChipSide::bottom));
    EXPECT_EQ(g.outer_boundary[5], BoundaryKind::insulating);
}

TEST(GeometryIo, MalformedDocuments) {
    EXPECT_THROW(geometry_from_json(nlohmann::json::parse(R"({"domain": [0, 1]})")), GeometryError);
    EXPECT_THROW(geometry_from_json(nlohmann::json::parse(R"({})")), GeometryError);
    EXPECT_THROW(geometry_from_json(nlohmann::json::parse(
                     R"({"domain": [0,1,0,1,0,1], "materials": [{"name": "x", "kind": "plasma"}]})")),
                 GeometryError);
    EXPECT_THROW(load_geometry("/nonexistent/geometry.json"), IoError);
}

}  // namespace
}  // namespace flipmon
