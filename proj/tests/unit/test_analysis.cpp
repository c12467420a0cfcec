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

#include "flipmon/analysis.hpp"
#include "flipmon/error.hpp"
#include "flipmon/templates.hpp"

namespace flipmon {
namespace {

AnalysisSettings plate_settings() {
    AnalysisSettings s;
    s.mesh.min_cell = {10, 10, 0.5};
    s.mesh.max_cell = {20, 20, 1.0};
    s.jobs = 2;
    return s;
}

SweepPoint point(double value, double ec) {
    SweepPoint p;
    p.value = value;
    p.ec_ghz = ec;
    return p;
}

TEST(SweepSummary, SpreadsAndRatios) {
    const auto s = summarize_sweep({point(1, 1.0), point(2, 1.5), point(3, 2.0), point(4, 2.5), point(5, 3.0)});
    EXPECT_DOUBLE_EQ(s.ec_ratio, 3.0);
    EXPECT_DOUBLE_EQ(s.plate_ratio, 5.0);
    EXPECT_DOUBLE_EQ(s.ec_spread, 2.0 / 2.0);
    EXPECT_DOUBLE_EQ(s.ec_spread_half, 1.0 / 2.0);
    EXPECT_TRUE(s.strictly_increasing);
    EXPECT_FALSE(summarize_sweep({point(1, 2.0), point(2, 2.0)}).strictly_increasing);
    EXPECT_THROW(summarize_sweep({point(1, 1.0)}), ConfigError);
}

TEST(Sweep, IdealPlatesFollowTheGap) {
    const std::vector<double> gaps{4.6, 4.8, 5.0, 5.2, 5.4};
    const auto make = [](double gap) { return validate(parallel_plate_template(40, gap)); };
    const auto pts = run_sweep(gaps, make, plate_settings(), 14.6, false);
    ASSERT_EQ(pts.size(), gaps.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_EQ(pts[i].value, gaps[i]);
        EXPECT_GT(pts[i].eta_ghz, 0.0);
    }
    const SweepSummary s = summarize_sweep(pts);
    EXPECT_NEAR(s.ec_ratio, 5.4 / 4.6, 0.01 * 5.4 / 4.6);
    EXPECT_TRUE(s.strictly_increasing);
    EXPECT_THROW(run_sweep({5.0}, make, plate_settings(), 14.6, false), ConfigError);
}

TEST(Sweep, FailuresPropagate) {
    const auto make = [](double gap) { return validate(parallel_plate_template(40, gap)); };
    EXPECT_THROW(run_sweep({5.0, -1.0}, make, plate_settings(), 14.6, false), GeometryError);
}

TEST(Analysis, PlateParticipationUsesTheQubitMode) {
    const auto a = analyze_participation(validate(parallel_plate_template(40, 5)), plate_settings());
    ASSERT_TRUE(a.cap.pads.has_value());
    EXPECT_NEAR(a.report[RegionId::Vacuum], 1.0, 1e-9);
    EXPECT_GT(a.cap.ec_ghz, 0.0);
}

}  // namespace
}  // namespace flipmon
