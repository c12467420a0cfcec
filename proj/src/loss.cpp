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

#include "flipmon/loss.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "flipmon/error.hpp"

namespace flipmon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double omega(double f_ghz) { return kTwoPi * f_ghz * 1e9; }

std::string sci(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

}  // namespace

LossTangentTable tangents_from_json(const nlohmann::json& j) {
    LossTangentTable t;
    try {
        for (const auto& [name, v] : j.at("tan_delta").items()) {
            const double x = v.get<double>();
            if (!(x >= 0.0)) throw ConfigError("tan_delta for " + name + " must be >= 0");
            t.tan_delta[parse_region(name)] = x;
        }
        t.gamma0 = j.value("gamma0_per_s", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed tangent table: ") + e.what());
    }
    if (!(t.gamma0 >= 0.0)) throw ConfigError("gamma0_per_s must be >= 0");
    return t;
}

LossTangentTable load_tangents(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tangent table " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("tangent table is not valid JSON: " + std::string(e.what()));
    }
    return tangents_from_json(j);
}

LossBudget predict_t1(const ParticipationReport& report, const LossTangentTable& tangents,
                      double f01_ghz) {
    if (!(f01_ghz > 0.0)) throw NonPositive("f01 must be positive");
    LossBudget b;
    b.f01_ghz = f01_ghz;
    b.gamma0 = tangents.gamma0;
    for (const auto& [region, tan] : tangents.tan_delta) {
        RegionLoss r;
        r.region = region;
        r.p = report.p.at(region);
        r.tan_delta = tan;
        r.inv_q = r.p * tan;
        b.inv_q += r.inv_q;
        b.regions.push_back(r);
    }
    const double rate = omega(f01_ghz) * b.inv_q + b.gamma0;
    b.unbounded = rate == 0.0;
    b.t1_s = b.unbounded ? std::numeric_limits<double>::infinity() : 1.0 / rate;
    return b;
}

void write_budget_csv(std::ostream& out, const LossBudget& b) {
    out << "region,p,tan_delta,inv_Q,T1_limit_us\n";
    for (const auto& r : b.regions) {
        const double t1 = r.inv_q > 0.0 ? 1e6 / (omega(b.f01_ghz) * r.inv_q)
                                        : std::numeric_limits<double>::infinity();
        out << to_string(r.region) << ',' << sci(r.p) << ',' << sci(r.tan_delta) << ','
            << sci(r.inv_q) << ',' << sci(t1) << '\n';
    }
    if (b.gamma0 > 0.0) out << "background,,,," << sci(1e6 / b.gamma0) << '\n';
    out << "total,,," << sci(b.inv_q) << ',' << sci(b.t1_s * 1e6) << '\n';
}

double extract_tangent(double t1_s, double f_q_ghz, double p, double gamma0) {
    if (!(t1_s > 0.0)) throw ConfigError("T1 must be positive");
    if (!(f_q_ghz > 0.0)) throw ConfigError("qubit frequency must be positive");
    if (!(p > 0.0)) throw ConfigError("participation must be positive");
    const double w = omega(f_q_ghz);
    const double tan = (1.0 / (w * t1_s) - gamma0 / w) / p;
    if (tan < 0.0) throw NegativeTangent("background rate exceeds the measured decay rate");
    return tan;
}

double extract_tangent(const MeasuredQubitRecord& rec, const ParticipationReport& report,
                       RegionId region, double gamma0) {
    if (!rec.t1_us || !rec.f_q_ghz) throw ConfigError(rec.label + ": T1 and f_q are required");
    return extract_tangent(*rec.t1_us * 1e-6, *rec.f_q_ghz, report.p.at(region), gamma0);
}

TwoDesignResult two_design_decomposition(double t1_a, double f_a, double p_a, double t1_b,
                                         double f_b, double p_b) {
    if (!(t1_a > 0.0) || !(t1_b > 0.0)) throw ConfigError("both T1 values must be positive");
    const double ka = omega(f_a) * p_a;
    const double kb = omega(f_b) * p_b;
    const double det = ka - kb;
    if (std::abs(det) <= 1e-12 * std::max(std::abs(ka), std::abs(kb))) {
        throw SingularSystem("the two designs have the same participation");
    }
    const double ga = 1.0 / t1_a;
    const double gb = 1.0 / t1_b;
    TwoDesignResult r;
    r.tan_delta = (ga - gb) / det;
    r.gamma0 = (ka * gb - kb * ga) / det;
    r.negative = r.tan_delta < 0.0 || r.gamma0 < 0.0;
    return r;
}

TwoDesignResult two_design_decomposition(const MeasuredQubitRecord& a, const ParticipationReport& ra,
                                         const MeasuredQubitRecord& b, const ParticipationReport& rb,
                                         RegionId region) {
    if (!a.t1_us || !a.f_q_ghz || !b.t1_us || !b.f_q_ghz) {
        throw ConfigError("both records need T1 and f_q");
    }
    return two_design_decomposition(*a.t1_us * 1e-6, *a.f_q_ghz, ra.p.at(region), *b.t1_us * 1e-6,
                                    *b.f_q_ghz, rb.p.at(region));
}

Coupling g_from_chi(double f_q, double f_r, double eta_mhz, double chi_mhz) {
    if (!(eta_mhz > 0.0)) throw ConfigError("anharmonicity must be positive");
    const double delta = (f_q - f_r) * 1e3;  // MHz
    const double detuned = delta - eta_mhz;
    if (std::abs(delta) < 1e-3 || std::abs(detuned) < 1e-3) {
        throw StraddlePoint("qubit sits at a straddling point");
    }
    Coupling c;
    c.g_mhz = std::sqrt(std::abs(chi_mhz) * std::abs(delta) * std::abs(detuned) / eta_mhz);
    c.g_alt_mhz = c.g_mhz / std::numbers::sqrt2;
    return c;
}

Coupling g_from_chi(const MeasuredQubitRecord& r) {
    if (!r.f_q_ghz || !r.f_r_ghz || !r.eta_mhz || !r.chi_mhz) {
        throw ConfigError(r.label + ": f_r, f_q, eta and chi are required");
    }
    return g_from_chi(*r.f_q_ghz, *r.f_r_ghz, *r.eta_mhz, *r.chi_mhz);
}

double chi_from_g(double g_mhz, double f_q, double f_r, double eta_mhz) {
    if (!(eta_mhz > 0.0)) throw ConfigError("anharmonicity must be positive");
    const double delta = (f_q - f_r) * 1e3;
    const double detuned = delta - eta_mhz;
    if (std::abs(delta) < 1e-3 || std::abs(detuned) < 1e-3) {
        throw StraddlePoint("qubit sits at a straddling point");
    }
    return g_mhz * g_mhz * eta_mhz / (std::abs(delta) * std::abs(detuned));
}

}  // namespace flipmon
