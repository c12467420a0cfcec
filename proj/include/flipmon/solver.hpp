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
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flipmon/defaults.hpp"
#include "flipmon/grid.hpp"

namespace flipmon {

/// Net voltages in volts. Nets not listed sit at 0 V.
class DriveVector {
  public:
    DriveVector() = default;
    DriveVector(std::initializer_list<std::pair<const std::string, double>> init) : volts_(init) {}

    void set(const std::string& net, double volts) { volts_[net] = volts; }
    double get(const std::string& net) const {
        auto it = volts_.find(net);
        return it == volts_.end() ? 0.0 : it->second;
    }
    const std::map<std::string, double>& entries() const { return volts_; }

    DriveVector scaled(double factor) const;

    /// Per-net voltages in net order. Throws NetNotFound for unknown names
    /// and ConfigError for non-finite values.
    std::vector<double> resolve(const ValidatedGeometry& geometry) const;

  private:
    std::map<std::string, double> volts_;
};

enum class Preconditioner { jacobi, z_line };

struct SolverSettings {
    double tolerance = defaults::solver_tolerance;
    std::size_t max_iterations = defaults::solver_max_iterations;
    Preconditioner preconditioner = Preconditioner::z_line;
};

/// Node potentials for one drive.
struct FieldSolution {
    std::shared_ptr<const RectilinearGrid> grid;
    std::vector<double> potential;  // volts, node order of grid
    DriveVector drive;
    double residual = 0.0;  // achieved relative residual
    std::size_t iterations = 0;
};

/// Finite-volume discretisation of div(eps grad phi) on the node lattice.
/// Each edge couples its two nodes with the eps-weighted quarter areas of the
/// (up to four) cells sharing the edge, divided by the edge length, so
/// material interfaces on grid planes are captured exactly in 1D.
///
/// Construction precomputes edge weights and the line preconditioner; the
/// object is immutable afterwards and may be shared across threads.
class LaplaceSolver {
  public:
    explicit LaplaceSolver(std::shared_ptr<const RectilinearGrid> grid,
                           SolverSettings settings = {});

    const RectilinearGrid& grid() const { return *grid_; }
    const SolverSettings& settings() const { return settings_; }

    /// Throws NoConvergence when max_iterations is reached.
    FieldSolution solve(const DriveVector& drive) const;

    /// Low-level entry: fixed nodes take `fixed_values`, every other node is
    /// solved for. `fixed` and `fixed_values` are in grid node order.
    /// Conductor and grounded-boundary nodes are NOT implied here.
    std::vector<double> solve_fixed(std::span<const unsigned char> fixed,
                                    std::span<const double> fixed_values, double* residual = nullptr,
                                    std::size_t* iterations = nullptr) const;

    /// Operator applied to a potential: (A phi)_n = sum_m w_nm (phi_n - phi_m),
    /// in units of farad / eps0 per volt. Charge on a node is eps0 * (A phi)_n.
    std::vector<double> apply(std::span<const double> potential) const;

    /// Nodes held by the outer boundary or by conductors.
    const std::vector<unsigned char>& dirichlet_mask() const { return dirichlet_; }

  private:
    void build_weights();
    std::vector<double> run_cg(std::span<const unsigned char> fixed, std::span<const double> values,
                               double& residual, std::size_t& iterations) const;

    std::shared_ptr<const RectilinearGrid> grid_;
    SolverSettings settings_;
    std::size_t nx_ = 0, ny_ = 0, nz_ = 0, pad_ = 0;
    // Padded arrays: logical node n lives at n + pad_.
    std::vector<double> wx_, wy_, wz_, diag_;
    std::vector<unsigned char> dirichlet_;
};

/// Convenience wrapper: one-off solve.
FieldSolution solve(std::shared_ptr<const RectilinearGrid> grid, const DriveVector& drive,
                    double tol = defaults::solver_tolerance,
                    std::size_t max_iter = defaults::solver_max_iterations);

/// Total electrostatic energy (J): half eps0 eps_r |grad phi|^2 integrated
/// cell by cell; each cell averages the squared edge gradients of its four
/// parallel edges per axis, which makes the sum equal to half phi.A.phi.
double energy(const FieldSolution& solution);

/// Per-cell energies (J) in grid cell order; they sum to energy().
std::vector<double> cell_energies(const FieldSolution& solution);

/// Charge on a net (C): the discrete Gauss flux leaving the dual cells of
/// the net's nodes. Throws NetNotFound.
double charge_on_net(const FieldSolution& solution, const std::string& net);

/// Charges of every net in net order.
std::vector<double> net_charges(const FieldSolution& solution);

/// Linear combination of solutions sharing one grid.
FieldSolution superpose(std::span<const FieldSolution> parts, std::span<const double> weights);

struct PlaneSpec {
    int axis = 1;           // normal axis, 0=x 1=y 2=z
    double position_um = 0.0;
    std::size_t samples_u = 200;  // along the lower remaining axis
    std::size_t samples_v = 200;  // along the higher remaining axis
};

/// Parses "y=0", "z=2.5" (um).
PlaneSpec parse_plane(const std::string& text);

struct FieldSlice {
    PlaneSpec plane;
    int axis_u = 0, axis_v = 2;
    std::vector<double> u_um, v_um;
    std::vector<double> magnitude;  // V/m, row-major: v outer, u inner

    double at(std::size_t iu, std::size_t iv) const { return magnitude[iv * u_um.size() + iu]; }
};

/// Regular samples of |grad phi| on a plane; zero inside conductors.
/// Throws PlaneOutsideDomain.
FieldSlice field_slice(const FieldSolution& solution, const PlaneSpec& plane);

/// |grad phi| at a point (um), zero inside conductor cells.
double field_magnitude_at(const FieldSolution& solution, const std::array<double, 3>& point_um);

}  // namespace flipmon
