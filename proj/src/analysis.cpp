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

#include "flipmon/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "flipmon/error.hpp"

namespace flipmon {

CapacitanceAnalysis analyze_capacitance(const ValidatedGeometry& geometry, const AnalysisSettings& s) {
    CapacitanceAnalysis a;
    a.grid = std::make_shared<const RectilinearGrid>(build_grid(geometry, s.mesh));
    a.result = capacitance_matrix(LaplaceSolver(a.grid, s.solver), s.jobs);
    if (geometry.find_net(NetRole::pad_top) && geometry.find_net(NetRole::pad_bottom)) {
        a.pads = qubit_pads(geometry);
        a.c_sigma = c_sigma(a.result.matrix, *a.pads, s.c_j);
        a.ec_ghz = ec_ghz_from_farads(a.c_sigma);
    }
    return a;
}

namespace {

ParticipationAnalysis participation_on(const ValidatedGeometry& geometry, const AnalysisSettings& s) {
    ParticipationAnalysis p;
    p.cap = analyze_capacitance(geometry, s);
    if (p.cap.pads) {
        const auto mode = qubit_mode_drive(p.cap.result.matrix, p.cap.pads->first, p.cap.pads->second);
        p.drive = mode.drive();
        p.solution = qubit_mode_solution(p.cap.result, mode);
    } else {
        p.drive.set(geometry.nets().front().name, 1.0);
        p.solution = p.cap.result.unit_solutions.front();
    }
    p.report = full_report(p.solution);
    return p;
}

}  // namespace

ParticipationAnalysis analyze_participation(const ValidatedGeometry& geometry,
                                            const AnalysisSettings& s, bool error_estimate) {
    ParticipationAnalysis fine = participation_on(geometry, s);
    if (error_estimate) {
        AnalysisSettings coarse = s;
        for (int a = 0; a < 3; ++a) {
            coarse.mesh.min_cell[a] *= 2.0;
            coarse.mesh.max_cell[a] *= 2.0;
        }
        coarse.mesh.max_growth_ratio = s.mesh.max_growth_ratio * s.mesh.max_growth_ratio;
        const ParticipationAnalysis c = participation_on(geometry, coarse);
        attach_error_estimate(fine.report, c.report);
    }
    return fine;
}

std::vector<SweepPoint> run_sweep(const std::vector<double>& values,
                                  const std::function<ValidatedGeometry(double)>& make,
                                  const AnalysisSettings& s, double ej_ghz, bool with_participation) {
    if (values.size() < 2) throw ConfigError("a sweep needs at least two points");
    std::vector<SweepPoint> out(values.size());
    AnalysisSettings inner = s;
    inner.jobs = 1;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                const ValidatedGeometry g = make(values[i]);
                SweepPoint p;
                p.value = values[i];
                if (with_participation) {
                    const auto a = analyze_participation(g, inner);
                    p.c_sigma = a.cap.c_sigma;
                    p.ec_ghz = a.cap.ec_ghz;
                    p.p_vacuum = a.report.p.at(RegionId::Vacuum);
                } else {
                    const auto a = analyze_capacitance(g, inner);
                    p.c_sigma = a.c_sigma;
                    p.ec_ghz = a.ec_ghz;
                    p.p_vacuum = std::numeric_limits<double>::quiet_NaN();
                }
                if (!(p.ec_ghz > 0.0)) throw MissingNet("sweep geometry has no pad pair");
                p.eta_ghz = spectrum({ej_ghz, p.ec_ghz, 0.0, defaults::charge_cutoff}).eta;
                out[i] = p;
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(s.jobs, 1, values.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

SweepSummary summarize_sweep(const std::vector<SweepPoint>& pts) {
    SweepSummary s;
    if (pts.size() < 2) throw ConfigError("a sweep needs at least two points");
    s.ec_ratio = pts.back().ec_ghz / pts.front().ec_ghz;
    s.plate_ratio = pts.back().value / pts.front().value;
    s.strictly_increasing = true;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i].ec_ghz > pts[i - 1].ec_ghz)) s.strictly_increasing = false;
    }
    auto spread = [](const std::vector<double>& v) {
        if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        return (*hi - *lo) / mean;
    };
    std::vector<double> all, half;
    const double lo = std::min(pts.front().value, pts.back().value);
    const double hi = std::max(pts.front().value, pts.back().value);
    const double mid = 0.5 * (lo + hi);
    const double quarter = 0.25 * (hi - lo);
    for (const auto& p : pts) {
        all.push_back(p.ec_ghz);
        if (std::abs(p.value - mid) <= quarter * (1.0 + 1e-9)) half.push_back(p.ec_ghz);
    }
    s.ec_spread = spread(all);
    s.ec_spread_half = spread(half);
    return s;
}

}  // namespace flipmon
