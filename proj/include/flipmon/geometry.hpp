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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flipmon/defaults.hpp"

namespace flipmon {

/// Axis-aligned cuboid. Geometry-level lengths are micrometres.
struct Box {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};

    static Box from_extents(double x0, double x1, double y0, double y1, double z0, double z1) {
        return Box{{x0, y0, z0}, {x1, y1, z1}};
    }

    double extent(int axis) const { return hi[axis] - lo[axis]; }
    double center(int axis) const { return 0.5 * (lo[axis] + hi[axis]); }
    double volume() const { return extent(0) * extent(1) * extent(2); }

    /// Closed-set test; `tol` widens the box on every side.
    bool contains(const std::array<double, 3>& p, double tol = 0.0) const;
    /// True when the boxes share at least one point (touching faces count).
    bool touches(const Box& other, double tol = 0.0) const;
    /// True when the interiors intersect.
    bool overlaps(const Box& other) const;
    bool inside(const Box& outer, double tol = 0.0) const;

    friend bool operator==(const Box&, const Box&) = default;
};

enum class MaterialKind { conductor, dielectric, vacuum };

struct Material {
    std::string name;
    MaterialKind kind = MaterialKind::vacuum;
    double epsilon_r = 1.0;  // ignored for conductors
};

enum class NetRole { pad_top, pad_bottom, ground, bump, other };

struct Net {
    std::string name;
    NetRole role = NetRole::other;
};

struct Solid {
    std::string name;
    Box bounds;
    std::string material;
    std::optional<std::string> net;
    /// Free-form tag. Conductor solids tagged "bump" have their lateral
    /// faces classified as BumpSurface.
    std::string label;
};

enum class InterfaceClass { MA, MS, SA };
enum class ChipSide { top, bottom };

struct InterfaceSpec {
    double thickness_m = defaults::interface_thickness_nm * 1e-9;
    double epsilon_layer = defaults::interface_epsilon;
    /// enabled[side][class], side 0 = top, 1 = bottom.
    std::array<std::array<bool, 3>, 2> enabled{{{true, true, true}, {true, true, true}}};

    bool is_enabled(InterfaceClass c, ChipSide s) const {
        return enabled[s == ChipSide::top ? 0 : 1][static_cast<int>(c)];
    }
};

enum class BoundaryKind { grounded, insulating };

/// Face order: -x, +x, -y, +y, -z, +z.
using OuterBoundary = std::array<BoundaryKind, 6>;

inline OuterBoundary all_faces(BoundaryKind kind) {
    return {kind, kind, kind, kind, kind, kind};
}

struct DeviceGeometry {
    Box domain;
    std::vector<Material> materials;
    /// Later solids override earlier ones where they overlap.
    std::vector<Solid> solids;
    std::vector<Net> nets;
    InterfaceSpec interface_spec;
    OuterBoundary outer_boundary = all_faces(BoundaryKind::grounded);
    /// Plane separating the bottom chip (carrier) from the top chip. Absent
    /// means everything belongs to the bottom chip.
    std::optional<double> chip_split_z;
};

std::string_view to_string(MaterialKind kind);
std::string_view to_string(NetRole role);
std::string_view to_string(InterfaceClass c);
std::string_view to_string(ChipSide s);
std::string_view to_string(BoundaryKind b);
MaterialKind parse_material_kind(std::string_view s);
NetRole parse_net_role(std::string_view s);
BoundaryKind parse_boundary_kind(std::string_view s);

/// Geometry whose invariants have been checked and whose name references
/// are resolved to indices. Only `validate` constructs one.
class ValidatedGeometry {
  public:
    const DeviceGeometry& raw() const { return geometry_; }
    const Box& domain() const { return geometry_.domain; }
    const std::vector<Material>& materials() const { return geometry_.materials; }
    const std::vector<Solid>& solids() const { return geometry_.solids; }
    const std::vector<Net>& nets() const { return geometry_.nets; }
    const InterfaceSpec& interface_spec() const { return geometry_.interface_spec; }
    const OuterBoundary& outer_boundary() const { return geometry_.outer_boundary; }

    std::size_t net_count() const { return geometry_.nets.size(); }
    /// Index into materials() for solid i.
    std::size_t solid_material(std::size_t i) const { return solid_material_[i]; }
    /// Index into nets() for solid i, or -1 when the solid is not a conductor.
    int solid_net(std::size_t i) const { return solid_net_[i]; }
    const Material& material_of(std::size_t solid) const {
        return geometry_.materials[solid_material_[solid]];
    }
    /// Material used where no solid is present (always vacuum).
    std::size_t background_material() const { return background_material_; }

    std::optional<std::size_t> find_net(std::string_view name) const;
    std::optional<std::size_t> find_net(NetRole role) const;
    std::optional<std::size_t> find_material(std::string_view name) const;

    ChipSide side_of(double z_um) const;
    double length_tolerance() const { return length_tol_; }

  private:
    friend ValidatedGeometry validate(DeviceGeometry geometry);
    DeviceGeometry geometry_;
    std::vector<std::size_t> solid_material_;
    std::vector<int> solid_net_;
    std::size_t background_material_ = 0;
    double length_tol_ = 1e-9;
};

/// Checks every geometry invariant.
///
/// Throws DegenerateSolid for zero-extent solids or domain, DanglingReference
/// for unknown material or net names, OverlapError when solids of distinct
/// nets share any point (a shared face counts: the pad gap must be > 0), and
/// GeometryError for the remaining invariants. A vacuum material named
/// "vacuum" is appended when the table has none.
ValidatedGeometry validate(DeviceGeometry geometry);

/// Effective boxes used for meshing: conductor solids thinner than
/// `sheet_threshold_um` along an axis collapse to a zero-thickness sheet on
/// the face that is coplanar with a dielectric face (the substrate surface
/// the film rests on), or to the mid-plane when no such face exists.
std::vector<Box> effective_boxes(const ValidatedGeometry& geometry, double sheet_threshold_um);

/// Smallest z-distance between the conductor solids of two nets.
double min_z_distance(const ValidatedGeometry& geometry, std::size_t net_a, std::size_t net_b);

}  // namespace flipmon
