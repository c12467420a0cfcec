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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipmon/geometry.hpp"

namespace flipmon {

struct MeshPolicy {
    /// Cell size at every solid face, per axis (um).
    std::array<double, 3> min_cell{2.0, 2.0, 0.5};
    /// Largest cell anywhere, per axis (um).
    std::array<double, 3> max_cell{40.0, 40.0, 40.0};
    bool refine_near_surfaces = true;
    double max_growth_ratio = 1.5;
    double max_aspect_ratio = 1000.0;
    std::size_t max_cells = 20'000'000;
    /// Conductors thinner than this collapse to zero-thickness sheets (um).
    double sheet_threshold = 0.5;

    static MeshPolicy uniform(double min_cell, double max_cell) {
        MeshPolicy p;
        p.min_cell = {min_cell, min_cell, min_cell};
        p.max_cell = {max_cell, max_cell, max_cell};
        return p;
    }

    /// Halves every cell-size bound: the next level of a refinement study.
    MeshPolicy refined() const;
};

nlohmann::json to_json(const MeshPolicy& policy);
MeshPolicy mesh_policy_from_json(const nlohmann::json& j, MeshPolicy base = {});

/// Coordinate lines along one axis for the interval breakpoints, graded
/// geometrically away from every refined breakpoint. Intervals between two
/// refined breakpoints shorter than 20 min_cell are meshed uniformly at
/// min_cell or finer. Exposed for testing.
std::vector<double> graded_lines(std::vector<double> breakpoints, std::vector<bool> refined,
                                 double min_cell, double max_cell, double growth_ratio);

/// Structured rectilinear grid in SI units. Potentials live on nodes,
/// materials on cells; conductor nets mark nodes.
class RectilinearGrid {
  public:
    static constexpr int kFree = -1;

    const ValidatedGeometry& geometry() const { return geometry_; }
    const std::vector<double>& lines(int axis) const { return lines_[axis]; }
    std::size_t nodes(int axis) const { return lines_[axis].size(); }
    std::size_t cells(int axis) const { return lines_[axis].size() - 1; }
    std::size_t node_count() const { return nodes(0) * nodes(1) * nodes(2); }
    std::size_t cell_count() const { return cells(0) * cells(1) * cells(2); }

    std::size_t node_index(std::size_t i, std::size_t j, std::size_t k) const {
        return i + nodes(0) * (j + nodes(1) * k);
    }
    std::size_t cell_index(std::size_t i, std::size_t j, std::size_t k) const {
        return i + cells(0) * (j + cells(1) * k);
    }
    double spacing(int axis, std::size_t cell) const {
        return lines_[axis][cell + 1] - lines_[axis][cell];
    }

    /// Index into geometry().materials().
    std::uint16_t cell_material(std::size_t cell) const { return cell_material_[cell]; }
    double cell_epsilon(std::size_t cell) const { return cell_epsilon_[cell]; }
    bool cell_is_conductor(std::size_t cell) const { return cell_conductor_[cell] != 0; }
    /// Net index or kFree.
    int node_net(std::size_t node) const { return node_net_[node]; }

    /// Effective (sheet-collapsed) solid boxes used to build the grid, in um.
    const std::vector<Box>& effective_boxes() const { return boxes_; }
    const MeshPolicy& policy() const { return policy_; }

    /// Largest cell aspect ratio over all cells.
    double max_aspect_ratio() const;
    /// Largest ratio between adjacent cell sizes along any axis.
    double max_adjacent_ratio() const;

  private:
    friend RectilinearGrid build_grid(const ValidatedGeometry&, const MeshPolicy&);
    friend RectilinearGrid build_grid_from_lines(const ValidatedGeometry&,
                                                 std::array<std::vector<double>, 3>,
                                                 const MeshPolicy&);
    void assign(const std::vector<Box>& boxes);

    ValidatedGeometry geometry_;
    MeshPolicy policy_;
    std::array<std::vector<double>, 3> lines_;
    std::vector<std::uint16_t> cell_material_;
    std::vector<double> cell_epsilon_;
    std::vector<std::uint8_t> cell_conductor_;
    std::vector<int> node_net_;
    std::vector<Box> boxes_;
};

/// Builds the grid: coordinate lines include every (effective) solid face;
/// cells touching a face are no larger than min_cell when refinement is on;
/// adjacent cells differ by at most max_growth_ratio. Throws
/// MeshBudgetExceeded above policy.max_cells and GeometryError when the
/// aspect-ratio bound is violated.
RectilinearGrid build_grid(const ValidatedGeometry& geometry, const MeshPolicy& policy);

/// Builds a grid on caller-supplied lines (um), which must contain every
/// effective solid face. Used for refinement studies on uniform grids.
RectilinearGrid build_grid_from_lines(const ValidatedGeometry& geometry,
                                      std::array<std::vector<double>, 3> lines_um,
                                      const MeshPolicy& policy = {});

/// Same geometry with every cell bisected along every axis.
RectilinearGrid bisect_cells(const RectilinearGrid& grid);

}  // namespace flipmon
