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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "flipmon/solver.hpp"

namespace flipmon {

/// Maxwell capacitance matrix over conductor nets, in farads.
class CapacitanceMatrix {
  public:
    CapacitanceMatrix() = default;
    CapacitanceMatrix(std::vector<std::string> nets, std::vector<double> entries,
                      double asymmetry = 0.0);

    std::size_t size() const { return nets_.size(); }
    const std::vector<std::string>& nets() const { return nets_; }
    double operator()(std::size_t i, std::size_t j) const { return c_[i * size() + j]; }
    double at(const std::string& a, const std::string& b) const;
    /// Throws NetNotFound.
    std::size_t index_of(const std::string& net) const;
    /// Largest |C_ij - C_ji| relative to the pair magnitude, before averaging.
    double asymmetry() const { return asymmetry_; }
    double row_sum(std::size_t i) const;

    CapacitanceMatrix scaled(double factor) const;

  private:
    std::vector<std::string> nets_;
    std::vector<double> c_;
    double asymmetry_ = 0.0;
};

struct CapacitanceResult {
    CapacitanceMatrix matrix;
    /// Solution with net i at 1 V and every other net at 0 V, in net order.
    std::vector<FieldSolution> unit_solutions;
};

/// One solve per net; C_ij is the charge on net j with net i at 1 V. The
/// returned matrix is the symmetric average. Up to `jobs` solves run
/// concurrently; results do not depend on `jobs`.
CapacitanceResult capacitance_matrix(const LaplaceSolver& solver, std::size_t jobs = 1);

CapacitanceResult capacitance_matrix(const ValidatedGeometry& geometry, const MeshPolicy& policy,
                                     const SolverSettings& settings = {}, std::size_t jobs = 1);

/// The two qubit pads: nets with roles pad_top and pad_bottom.
/// Throws MissingNet.
std::pair<std::string, std::string> qubit_pads(const ValidatedGeometry& geometry);

/// Pad voltages of the floating qubit mode: unit voltage difference, zero
/// net charge induced on the surroundings.
struct QubitModeDrive {
    std::string pad_a, pad_b;
    double v_a = 0.5, v_b = -0.5;
    DriveVector drive() const;
};

QubitModeDrive qubit_mode_drive(const CapacitanceMatrix& c, const std::string& pad_a,
                                const std::string& pad_b);

/// Field of the qubit mode assembled from the unit solutions.
FieldSolution qubit_mode_solution(const CapacitanceResult& result, const QubitModeDrive& mode);

}  // namespace flipmon
