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

#include "flipmon/capacitance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "flipmon/error.hpp"

namespace flipmon {

CapacitanceMatrix::CapacitanceMatrix(std::vector<std::string> nets, std::vector<double> entries,
                                     double asymmetry)
    : nets_(std::move(nets)), c_(std::move(entries)), asymmetry_(asymmetry) {
    if (c_.size() != nets_.size() * nets_.size()) {
        throw ConfigError("capacitance matrix needs N*N entries");
    }
}

std::size_t CapacitanceMatrix::index_of(const std::string& net) const {
    auto it = std::find(nets_.begin(), nets_.end(), net);
    if (it == nets_.end()) throw NetNotFound("net '" + net + "' not in capacitance matrix");
    return static_cast<std::size_t>(it - nets_.begin());
}

double CapacitanceMatrix::at(const std::string& a, const std::string& b) const {
    return (*this)(index_of(a), index_of(b));
}

double CapacitanceMatrix::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += (*this)(i, j);
    return s;
}

CapacitanceMatrix CapacitanceMatrix::scaled(double factor) const {
    std::vector<double> c = c_;
    for (double& v : c) v *= factor;
    return CapacitanceMatrix(nets_, std::move(c), asymmetry_);
}

CapacitanceResult capacitance_matrix(const LaplaceSolver& solver, std::size_t jobs) {
    const ValidatedGeometry& geo = solver.grid().geometry();
    const std::size_t n = geo.net_count();
    if (n == 0) throw MissingNet("capacitance matrix needs at least one net");

    std::vector<FieldSolution> solutions(n);
    std::vector<std::vector<double>> charges(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                DriveVector d;
                d.set(geo.nets()[i].name, 1.0);
                solutions[i] = solver.solve(d);
                charges[i] = net_charges(solutions[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, n);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    double diag_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag_max = std::max(diag_max, std::abs(charges[i][i]));
    const double floor = 1e-9 * diag_max;
    double asym = 0.0;
    std::vector<double> c(n * n);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(geo.nets()[i].name);
        for (std::size_t j = 0; j < n; ++j) {
            const double a = charges[i][j];
            const double b = charges[j][i];
            c[i * n + j] = 0.5 * (a + b);
            const double scale = 0.5 * (std::abs(a) + std::abs(b));
            if (i != j && scale > floor) asym = std::max(asym, std::abs(a - b) / scale);
        }
    }
    return {CapacitanceMatrix(std::move(names), std::move(c), asym), std::move(solutions)};
}

CapacitanceResult capacitance_matrix(const ValidatedGeometry& geometry, const MeshPolicy& policy,
                                     const SolverSettings& settings, std::size_t jobs) {
    auto grid = std::make_shared<const RectilinearGrid>(build_grid(geometry, policy));
    return capacitance_matrix(LaplaceSolver(grid, settings), jobs);
}

std::pair<std::string, std::string> qubit_pads(const ValidatedGeometry& geometry) {
    const auto top = geometry.find_net(NetRole::pad_top);
    const auto bottom = geometry.find_net(NetRole::pad_bottom);
    if (!top || !bottom) throw MissingNet("geometry needs nets with roles pad_top and pad_bottom");
    return {geometry.nets()[*top].name, geometry.nets()[*bottom].name};
}

DriveVector QubitModeDrive::drive() const {
    DriveVector d;
    d.set(pad_a, v_a);
    d.set(pad_b, v_b);
    return d;
}

QubitModeDrive qubit_mode_drive(const CapacitanceMatrix& c, const std::string& pad_a,
                                const std::string& pad_b) {
    const std::size_t a = c.index_of(pad_a);
    const std::size_t b = c.index_of(pad_b);
    const double cag = c(a, a) + c(a, b);
    const double cbg = c(b, b) + c(b, a);
    QubitModeDrive m;
    m.pad_a = pad_a;
    m.pad_b = pad_b;
    if (cag + cbg > 0.0) {
        m.v_a = cbg / (cag + cbg);
        m.v_b = -cag / (cag + cbg);
    }
    return m;
}

FieldSolution qubit_mode_solution(const CapacitanceResult& result, const QubitModeDrive& mode) {
    const auto& c = result.matrix;
    const std::vector<FieldSolution> parts{result.unit_solutions.at(c.index_of(mode.pad_a)),
                                           result.unit_solutions.at(c.index_of(mode.pad_b))};
    const std::vector<double> w{mode.v_a, mode.v_b};
    return superpose(parts, w);
}

}  // namespace flipmon
