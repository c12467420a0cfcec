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
#include <random>

#include "flipmon/capacitance.hpp"
#include "flipmon/error.hpp"
#include "flipmon/transmon.hpp"
#include "oracles.hpp"

namespace flipmon {
namespace {

// Frozen from the dense-Jacobi oracle in oracles.hpp.
constexpr double kOracleF01 = 4.83722965551;   // E_J 14.6, E_C 0.2199
constexpr double kOracleEta = 0.247014356876;
constexpr double kFitEj = 16.13289803;         // fit of (4.853, 0.2199)
constexpr double kFitEc = 0.1983885976;
constexpr double kDispersion66 = 5.846919e-07;  // E_J/E_C = 66, E_C = 0.2

TEST(Spectrum, MatchesDenseOracle) {
    for (const auto& [ej, ec, ng] : std::vector<std::tuple<double, double, double>>{
             {14.6, 0.2199, 0.0}, {5.0, 0.3, 0.25}, {20.0, 0.2, 0.5}, {1.0, 0.25, 0.1}}) {
        const TransmonSpectrum s = spectrum({ej, ec, ng});
        const oracle::Levels o = oracle::transmon(ej, ec, ng);
        EXPECT_NEAR(s.f01, o.f01, 1e-9);
        EXPECT_NEAR(s.eta, o.eta, 1e-9);
        EXPECT_DOUBLE_EQ(s.eta, s.f01 - s.f12);
    }
    const TransmonSpectrum s = spectrum({14.6, 0.2199});
    EXPECT_NEAR(s.f01, kOracleF01, 1e-9);
    EXPECT_NEAR(s.eta, kOracleEta, 1e-9);
    EXPECT_DOUBLE_EQ(s.levels_ghz[0], 0.0);
}

TEST(Spectrum, IntegerChargePeriodicity) {
    for (double ng : {0.0, 0.2, 0.5}) {
        const TransmonSpectrum a = spectrum({8.0, 0.4, ng});
        const TransmonSpectrum b = spectrum({8.0, 0.4, ng + 1.0});
        const TransmonSpectrum c = spectrum({8.0, 0.4, ng - 3.0});
        for (std::size_t k = 0; k < a.levels_ghz.size(); ++k) {
            EXPECT_NEAR(a.levels_ghz[k], b.levels_ghz[k], 1e-10);
            EXPECT_NEAR(a.levels_ghz[k], c.levels_ghz[k], 1e-10);
        }
    }
}

TEST(Spectrum, AnharmonicityApproachesChargingEnergyFromAbove) {
    double previous = 10.0;
    for (double ratio = 40.0; ratio <= 100.0; ratio += 5.0) {
        const double r = spectrum({ratio * 0.2, 0.2}).eta / 0.2;
        EXPECT_GT(r, 1.0);
        EXPECT_LT(r, 1.2);
        EXPECT_LT(r, previous);
        previous = r;
    }
}

TEST(Spectrum, CutoffGrowsAndCaps) {
    EXPECT_GT(spectrum({2000.0, 0.2, 0.0, 5}).cutoff_used, 5u);
    EXPECT_THROW(spectrum({1e9, 1e-4}), CutoffTooSmall);
    EXPECT_THROW(spectrum({1.0, 0.0}), NonPositive);
    EXPECT_THROW(spectrum({-1.0, 0.2}), NonPositive);
}

TEST(Fit, FrozenOracleValues) {
    const EjEcFit f = fit_ej_ec(4.853, 0.2199);
    EXPECT_NEAR(f.ej_ghz, kFitEj, 1e-7);
    EXPECT_NEAR(f.ec_ghz, kFitEc, 1e-9);
    EXPECT_LT(f.residual_ghz, 1e-9);
}

TEST(Fit, RoundTripRecoversParameters) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ec(0.15, 0.35), ratio(20.0, 120.0);
    for (int i = 0; i < 25; ++i) {
        const double c = ec(rng), j = ratio(rng) * c;
        const TransmonSpectrum s = spectrum({j, c});
        const EjEcFit f = fit_ej_ec(s.f01, s.eta);
        EXPECT_NEAR(f.ej_ghz, j, 1e-4 * j);
        EXPECT_NEAR(f.ec_ghz, c, 1e-4 * c);
        const TransmonSpectrum back = spectrum({f.ej_ghz, f.ec_ghz});
        EXPECT_LT(std::abs(back.f01 - s.f01), 1e-6);
        EXPECT_LT(std::abs(back.eta - s.eta), 1e-6);
    }
}

TEST(Fit, Preconditions) {
    EXPECT_THROW(fit_ej_ec(4.8, 4.8), NoRoot);
    EXPECT_THROW(fit_ej_ec(4.8, 5.0), NoRoot);
    EXPECT_THROW(fit_ej_ec(4.8, -0.2), NoRoot);
    EXPECT_THROW(fit_ej_ec(0.5, 0.45), NumericalError);
}

TEST(ChargeDispersion, DeepTransmonIsFlat) {
    const double d = charge_dispersion({66 * 0.2, 0.2});
    EXPECT_LT(d, 1e-6);
    EXPECT_NEAR(d, kDispersion66, 1e-9);
}

TEST(ChargeDispersion, BareChargeParabolas) {
    // E_J = 0: f01 is 4 E_C at n_g = 0 and 0 at the n_g = 1/2 degeneracy.
    const oracle::Levels a = oracle::transmon(0.0, 0.2, 0.0), b = oracle::transmon(0.0, 0.2, 0.5);
    EXPECT_NEAR(charge_dispersion({0.0, 0.2}), std::abs(a.f01 - b.f01), 1e-12);
    EXPECT_NEAR(charge_dispersion({0.0, 0.2}), 4.0 * 0.2, 1e-12);
}

TEST(ChargeDispersion, DecreasesWithRatio) {
    double previous = 1e9;
    for (double ratio = 10.0; ratio <= 100.0; ratio += 5.0) {
        const double d = charge_dispersion({ratio * 0.2, 0.2});
        EXPECT_LT(d, previous);
        previous = d;
    }
}

TEST(JosephsonEnergy, CriticalCurrentArithmetic) {
    auto ej = [](double ic) { return ic / (4.0 * oracle::kPi * oracle::kE) * 1e-9; };
    EXPECT_NEAR(ej_from_ic(29.4e-9), ej(29.4e-9), 1e-12);
    EXPECT_NEAR(ej_from_ic(29.4e-9), 14.6, 0.01);
    EXPECT_DOUBLE_EQ(ej_from_ic(58.8e-9), 2.0 * ej_from_ic(29.4e-9));
    EXPECT_NEAR(ej_from_ic(10e-3), 4.97e6, 0.01e6);
    EXPECT_TRUE(ic_out_of_regime(10.1e-3));
    EXPECT_FALSE(ic_out_of_regime(29.4e-9));
    EXPECT_THROW(ej_from_ic(0.0), NonPositive);
}

TEST(ChargingEnergy, FromCapacitanceMatrix) {
    const double c12 = 86.1e-15;
    const CapacitanceMatrix plates({"a", "b"}, {c12, -c12, -c12, c12});
    EXPECT_NEAR(ec_from_capacitance(plates, {"a", "b"}) * 1e3, 225.0, 0.225);
    EXPECT_NEAR(ec_from_capacitance(plates, {"a", "b"}), oracle::ec_ghz(c12), 1e-12);
    EXPECT_NEAR(c_sigma(plates, {"a", "b"}, 5e-15), c12 + 5e-15, 1e-27);

    const double c1g = 30e-15, c2g = 60e-15;
    const CapacitanceMatrix grounded({"a", "b"}, {c12 + c1g, -c12, -c12, c12 + c2g});
    EXPECT_NEAR(c_sigma(grounded, {"a", "b"}), c12 + c1g * c2g / (c1g + c2g), 1e-27);
    EXPECT_NEAR(ec_from_capacitance(grounded.scaled(2.0), {"a", "b"}),
                0.5 * ec_from_capacitance(grounded, {"a", "b"}), 1e-12);
    EXPECT_THROW(ec_from_capacitance(grounded, {"a", "z"}), MissingNet);
    EXPECT_THROW(ec_from_capacitance(grounded, {"a", "a"}), MissingNet);
    const CapacitanceMatrix zero({"a", "b"}, {0.0, 0.0, 0.0, 0.0});
    EXPECT_THROW(ec_from_capacitance(zero, {"a", "b"}), NonPositiveCSigma);
}

}  // namespace
}  // namespace flipmon
