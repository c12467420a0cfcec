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
#include <map>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipmon/participation.hpp"
#include "flipmon/records.hpp"

namespace flipmon {

struct LossTangentTable {
    std::map<RegionId, double> tan_delta;
    double gamma0 = 0.0;  // background rate, 1/s
};

/// {"tan_delta": {"MA_t": 2e-3, ...}, "gamma0_per_s": 0}. Throws ConfigError
/// for unknown regions or negative entries.
LossTangentTable tangents_from_json(const nlohmann::json& j);
LossTangentTable load_tangents(const std::filesystem::path& path);

struct RegionLoss {
    RegionId region;
    double p = 0.0;
    double tan_delta = 0.0;
    double inv_q = 0.0;
};

struct LossBudget {
    std::vector<RegionLoss> regions;  // tangent-table order
    double inv_q = 0.0;
    double gamma0 = 0.0;
    double f01_ghz = 0.0;
    double t1_s = 0.0;       // infinity when unbounded
    bool unbounded = false;  // no loss channel at all
};

/// 1/Q = sum p_i tan_i; T1 = 1 / (2 pi f01 / Q + gamma0). Throws NonPositive
/// for f01 <= 0.
LossBudget predict_t1(const ParticipationReport& report, const LossTangentTable& tangents,
                      double f01_ghz);

/// `region,p,tan_delta,inv_Q,T1_limit_us` plus a total row.
void write_budget_csv(std::ostream& out, const LossBudget& budget);

/// Loss tangent that explains the measured T1 through one region alone
/// (an upper bound for that region). Throws NegativeTangent when gamma0
/// exceeds the measured rate, ConfigError for missing T1 / f_q or p <= 0.
double extract_tangent(double t1_s, double f_q_ghz, double p, double gamma0 = 0.0);
double extract_tangent(const MeasuredQubitRecord& record, const ParticipationReport& report,
                       RegionId region, double gamma0 = 0.0);

struct TwoDesignResult {
    double tan_delta = 0.0;
    double gamma0 = 0.0;
    bool negative = false;  // either component below zero
};

/// Solves gamma_k = gamma0 + 2 pi f_k p_k tan for k = a, b. Throws
/// SingularSystem when the two designs have equal 2 pi f p.
TwoDesignResult two_design_decomposition(double t1_a_s, double f_a_ghz, double p_a, double t1_b_s,
                                         double f_b_ghz, double p_b);
TwoDesignResult two_design_decomposition(const MeasuredQubitRecord& a, const ParticipationReport& ra,
                                         const MeasuredQubitRecord& b, const ParticipationReport& rb,
                                         RegionId region);

struct Coupling {
    double g_mhz = 0.0;      // chi = g^2 alpha / (Delta (Delta + alpha)), alpha = -eta
    double g_alt_mhz = 0.0;  // same with chi read as the full pull (2 chi convention)
};

/// Throws StraddlePoint when Delta or Delta - eta is within 1 kHz of zero,
/// ConfigError when f_r, f_q, eta or chi is missing or eta <= 0.
Coupling g_from_chi(double f_q_ghz, double f_r_ghz, double eta_mhz, double chi_mhz);
Coupling g_from_chi(const MeasuredQubitRecord& record);
/// Inverse of g_from_chi(...).g_mhz; returns |chi| in MHz.
double chi_from_g(double g_mhz, double f_q_ghz, double f_r_ghz, double eta_mhz);

}  // namespace flipmon
