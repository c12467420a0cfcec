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

#include "flipmon/capacitance.hpp"
#include "flipmon/error.hpp"
#include "flipmon/templates.hpp"
#include "oracles.hpp"

namespace flipmon {
namespace {

MeshPolicy coarse() {
    MeshPolicy p;
    p.min_cell = {6.0, 6.0, 1.0};
    p.max_cell = {60.0, 60.0, 60.0};
    return p;
}

void expect_maxwell_properties(const CapacitanceMatrix& c) {
    EXPECT_LE(c.asymmetry(), 0.02);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_GT(c(i, i), 0.0);
        for (std::size_t j = 0; j < c.size(); ++j) {
            EXPECT_EQ(c(i, j), c(j, i));
            if (i != j) EXPECT_LE(c(i, j), 0.0);
        }
        // Diagonal dominance: the grounded box absorbs the remainder.
        EXPECT_GE(c.row_sum(i), -1e-6 * c(i, i));
    }
}

DeviceGeometry single_blob() {
    DeviceGeometry g;
    g.domain = Box::from_extents(-50, 50, -50, 50, 0, 100);
    g.materials = {{"metal", MaterialKind::conductor, 1.0}};
    g.nets = {{"blob", NetRole::other}};
    g.solids = {{"blob", Box::from_extents(-10, 10, -10, 10, 40, 60), "metal", "blob", ""}};
    return g;
}

TEST(Capacitance, SingleNetAboveGroundedBox) {
    const auto r = capacitance_matrix(validate(single_blob()), MeshPolicy::uniform(5.0, 10.0));
    ASSERT_EQ(r.matrix.size(), 1u);
    EXPECT_GT(r.matrix(0, 0), 0.0);
    // A 20 um cube: between the inscribed-sphere bound and the plate-sum bound.
    EXPECT_GT(r.matrix(0, 0), 4.0 * oracle::kPi * oracle::kEps0 * 10e-6);
}

TEST(Capacitance, PlanarPadsAreMirrorImages) {
    const auto r = capacitance_matrix(validate(planar_transmon_template({})), MeshPolicy::uniform(20.0, 160.0));
    const CapacitanceMatrix& c = r.matrix;
    expect_maxwell_properties(c);
    const std::size_t a = c.index_of("pad_left"), b = c.index_of("pad_right");
    const double c1g = c(a, a) + c(a, b), c2g = c(b, b) + c(b, a);
    EXPECT_NEAR(c1g, c2g, 0.01 * c1g);
}

TEST(Capacitance, FlipmonMatrixAndEnergyIdentity) {
    const ValidatedGeometry g = validate(flipmon_template({}));
    const auto r = capacitance_matrix(g, coarse(), {}, 3);
    expect_maxwell_properties(r.matrix);

    const auto pads = qubit_pads(g);
    const QubitModeDrive mode = qubit_mode_drive(r.matrix, pads.first, pads.second);
    EXPECT_NEAR(mode.v_a - mode.v_b, 1.0, 1e-12);
    const FieldSolution s = qubit_mode_solution(r, mode);
    const auto q = net_charges(s);
    double half_vq = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) half_vq += 0.5 * s.drive.get(g.nets()[i].name) * q[i];
    EXPECT_NEAR(half_vq, energy(s), 0.01 * energy(s));
    // The floating mode induces no net charge on the pad pair.
    const std::size_t a = r.matrix.index_of(pads.first), b = r.matrix.index_of(pads.second);
    EXPECT_NEAR(q[a] + q[b], 0.0, 0.01 * std::abs(q[a]));
}

TEST(Capacitance, JobsDoNotChangeResults) {
    const ValidatedGeometry g = validate(planar_transmon_template({}));
    const auto p = MeshPolicy::uniform(25.0, 200.0);
    const auto a = capacitance_matrix(g, p, {}, 1);
    const auto b = capacitance_matrix(g, p, {}, 4);
    for (std::size_t i = 0; i < a.matrix.size(); ++i) {
        for (std::size_t j = 0; j < a.matrix.size(); ++j) EXPECT_EQ(a.matrix(i, j), b.matrix(i, j));
    }
}

TEST(Capacitance, VacuumFlipmonPlateTermPlusBoundedFringe) {
    FlipmonParams fp;
    fp.sub_epsilon = 1.0;
    const ValidatedGeometry g = validate(flipmon_template(fp));
    MeshPolicy p2 = coarse();
    for (int a = 0; a < 3; ++a) {
        p2.min_cell[a] *= 2.0;
        p2.max_cell[a] *= 2.0;
    }
    const auto pads = qubit_pads(g);
    const double c_fine = -capacitance_matrix(g, coarse(), {}, 3).matrix.at(pads.first, pads.second);
    const double c_coarse = -capacitance_matrix(g, p2, {}, 3).matrix.at(pads.first, pads.second);
    // First-order Richardson extrapolation of the pad-pad coupling.
    const double c_extrap = 2.0 * c_fine - c_coarse;
    const double ring = fp.pad_side * fp.pad_side - fp.ring_opening() * fp.ring_opening();
    const double plate = oracle::plate_capacitance(ring, fp.gap_d);
    EXPECT_GT(c_fine, plate);
    EXPECT_NEAR(c_fine, c_extrap, 0.05 * c_extrap);
    EXPECT_LT(c_extrap, 1.5 * plate);
}

TEST(Capacitance, MatrixAccessors) {
    const CapacitanceMatrix c({"a", "b"}, {2.0, -1.0, -1.0, 3.0}, 0.01);
    EXPECT_DOUBLE_EQ(c.at("b", "a"), -1.0);
    EXPECT_DOUBLE_EQ(c.row_sum(1), 2.0);
    EXPECT_DOUBLE_EQ(c.scaled(2.0)(1, 1), 6.0);
    EXPECT_THROW(c.index_of("z"), NetNotFound);
    const QubitModeDrive m = qubit_mode_drive(c, "a", "b");
    EXPECT_NEAR(m.v_a, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.v_b, -1.0 / 3.0, 1e-15);
}

TEST(Capacitance, MissingPads) {
    EXPECT_THROW(qubit_pads(validate(single_blob())), MissingNet);
}

}  // namespace
}  // namespace flipmon
