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
#include <string_view>
#include <vector>

#include "flipmon/geometry.hpp"
#include "flipmon/grid.hpp"

namespace flipmon {

enum class SurfaceClass { MA, MS, SA, Bump };

std::string_view to_string(SurfaceClass c);

/// One grid face on a classified surface.
struct SurfaceFace {
    SurfaceClass cls = SurfaceClass::MA;
    ChipSide side = ChipSide::bottom;
    int axis = 2;            // face normal
    std::size_t plane = 0;   // coordinate-line index along the normal
    std::size_t u = 0;       // cell index along the lower in-plane axis
    std::size_t v = 0;       // cell index along the higher in-plane axis
    int toward = +1;         // direction from the face into `cell`
    std::size_t cell = 0;    // evaluation cell: non-metal side, or substrate side for SA
    std::size_t other = 0;   // vacuum-side cell for SA; equal to `cell` otherwise
    double area = 0.0;       // m^2
};

class SurfaceSet {
  public:
    const std::vector<SurfaceFace>& faces() const { return faces_; }
    std::vector<SurfaceFace> select(SurfaceClass c, ChipSide side) const;
    std::vector<SurfaceFace> select(SurfaceClass c) const;
    double area(SurfaceClass c, ChipSide side) const;
    double area(SurfaceClass c) const;

  private:
    friend SurfaceSet classify_surfaces(const RectilinearGrid& grid);
    std::vector<SurfaceFace> faces_;
};

/// Labels every exposed face of the grid's conductors MA (vacuum side) or MS
/// (dielectric side), every uncovered dielectric-vacuum face SA, and the
/// lateral faces of conductors labelled "bump" as Bump. A zero-thickness
/// sheet contributes one face per exposed side. Chip side follows the
/// geometry's split plane.
SurfaceSet classify_surfaces(const RectilinearGrid& grid);

/// Classification on the coarsest grid that resolves every solid face.
SurfaceSet classify_surfaces(const ValidatedGeometry& geometry);

}  // namespace flipmon
