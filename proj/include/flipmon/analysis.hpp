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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flipmon/capacitance.hpp"
#include "flipmon/participation.hpp"
#include "flipmon/transmon.hpp"

namespace flipmon {

struct AnalysisSettings {
    MeshPolicy mesh;
    SolverSettings solver;
    std::size_t jobs = 1;
    double c_j = defaults::junction_capacitance;
};

struct CapacitanceAnalysis {
    std::shared_ptr<const RectilinearGrid> grid;
    CapacitanceResult result;
    std::optional<std::pair<std::string, std::string>> pads;
    double c_sigma = 0.0;  // farads, 0 without a pad pair
    double ec_ghz = 0.0;
};

/// Builds the grid, extracts the Maxwell matrix and, when the geometry has a
/// pad_top / pad_bottom pair, C_sigma and E_C.
CapacitanceAnalysis analyze_capacitance(const ValidatedGeometry& geometry, const AnalysisSettings& s);

struct ParticipationAnalysis {
    CapacitanceAnalysis cap;
    /// Drive used for the field: the qubit mode with a pad pair, otherwise
    /// the first net at 1 V.
    DriveVector drive;
    FieldSolution solution;
    ParticipationReport report;
};

/// Qubit-mode field and full participation report. With `error_estimate`
/// the analysis is repeated on a mesh with doubled cell bounds and the
/// per-region difference is attached as the error estimate.
ParticipationAnalysis analyze_participation(const ValidatedGeometry& geometry,
                                            const AnalysisSettings& s, bool error_estimate = false);

struct SweepPoint {
    double value = 0.0;
    double c_sigma = 0.0;  // farads
    double ec_ghz = 0.0;
    double p_vacuum = 0.0;
    double eta_ghz = 0.0;  // from the spectrum at the sweep's E_J
};

struct SweepSummary {
    double ec_ratio = 0.0;       // E_C(last) / E_C(first)
    double ec_spread = 0.0;      // (max - min) / mean over all points
    double ec_spread_half = 0.0; // same over the central half of the range
    double plate_ratio = 0.0;    // last / first value: the ideal-plate E_C ratio
    bool strictly_increasing = false;
};

/// Evaluates `make(value)` at every value; up to s.jobs points run
/// concurrently and results keep input order. Throws ConfigError for fewer
/// than two points.
std::vector<SweepPoint> run_sweep(const std::vector<double>& values,
                                  const std::function<ValidatedGeometry(double)>& make,
                                  const AnalysisSettings& s, double ej_ghz, bool with_participation);

SweepSummary summarize_sweep(const std::vector<SweepPoint>& points);

}  // namespace flipmon
