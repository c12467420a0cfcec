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

#include "flipmon/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "flipmon/units.hpp"

namespace flipmon {

std::string_view to_string(SurfaceClass c) {
    switch (c) {
        case SurfaceClass::MA: return "MA";
        case SurfaceClass::MS: return "MS";
        case SurfaceClass::SA: return "SA";
        case SurfaceClass::Bump: return "BumpSurface";
    }
    return "?";
}

std::vector<SurfaceFace> SurfaceSet::select(SurfaceClass c, ChipSide side) const {
    std::vector<SurfaceFace> out;
    for (const auto& f : faces_) {
        if (f.cls == c && f.side == side) out.push_back(f);
    }
    return out;
}

std::vector<SurfaceFace> SurfaceSet::select(SurfaceClass c) const {
    std::vector<SurfaceFace> out;
    for (const auto& f : faces_) {
        if (f.cls == c) out.push_back(f);
    }
    return out;
}

double SurfaceSet::area(SurfaceClass c, ChipSide side) const {
    double a = 0.0;
    for (const auto& f : faces_) {
        if (f.cls == c && f.side == side) a += f.area;
    }
    return a;
}

double SurfaceSet::area(SurfaceClass c) const {
    double a = 0.0;
    for (const auto& f : faces_) {
        if (f.cls == c) a += f.area;
    }
    return a;
}

namespace {

struct FaceAxes {
    int u, v;
};

FaceAxes in_plane(int axis) {
    if (axis == 0) return {1, 2};
    if (axis == 1) return {0, 2};
    return {0, 1};
}

std::size_t cell_at(const RectilinearGrid& g, int axis, std::size_t plane_cell, int ua,
                    std::size_t u, int va, std::size_t v) {
    std::array<std::size_t, 3> idx{};
    idx[axis] = plane_cell;
    idx[ua] = u;
    idx[va] = v;
    return g.cell_index(idx[0], idx[1], idx[2]);
}

std::size_t face_key(const RectilinearGrid& g, int axis, std::size_t plane, int ua, std::size_t u,
                     int va, std::size_t v) {
    std::array<std::size_t, 3> idx{};
    idx[axis] = plane;
    idx[ua] = u;
    idx[va] = v;
    return static_cast<std::size_t>(axis) * g.node_count() + g.node_index(idx[0], idx[1], idx[2]);
}

// Position of a face-centre coordinate along the z axis, in um.
double face_z_um(const RectilinearGrid& g, int axis, std::size_t plane, std::size_t v) {
    const auto& z = g.lines(2);
    if (axis == 2) return m_to_um(z[plane]);
    return m_to_um(0.5 * (z[v] + z[v + 1]));
}

}  // namespace

SurfaceSet classify_surfaces(const RectilinearGrid& g) {
    const ValidatedGeometry& geo = g.geometry();
    const auto& materials = geo.materials();
    const auto& boxes = g.effective_boxes();
    const double tol = geo.length_tolerance();

    SurfaceSet out;
    std::vector<std::uint8_t> metal(3 * g.node_count(), 0);

    auto kind_of = [&](std::size_t cell) { return materials[g.cell_material(cell)].kind; };
    auto line_index = [&](int axis, double um) -> std::ptrdiff_t {
        const auto& l = g.lines(axis);
        const double x = um_to_m(um);
        auto it = std::lower_bound(l.begin(), l.end(), x - um_to_m(tol));
        if (it == l.end() || std::abs(*it - x) > um_to_m(tol)) return -1;
        return it - l.begin();
    };
    auto cell_range = [&](int axis, double lo_um, double hi_um) {
        const auto& l = g.lines(axis);
        std::size_t first = l.size(), last = 0;
        for (std::size_t c = 0; c + 1 < l.size(); ++c) {
            const double mid = m_to_um(0.5 * (l[c] + l[c + 1]));
            if (mid >= lo_um && mid <= hi_um) {
                first = std::min(first, c);
                last = c + 1;
            }
        }
        return std::pair<std::size_t, std::size_t>(first, std::max(first, last));
    };

    for (std::size_t s = 0; s < boxes.size(); ++s) {
        if (geo.solid_net(s) < 0) continue;
        const Box& b = boxes[s];
        const bool bump = geo.solids()[s].label == "bump";
        for (int axis = 0; axis < 3; ++axis) {
            const auto [ua, va] = in_plane(axis);
            const auto ur = cell_range(ua, b.lo[ua], b.hi[ua]);
            const auto vr = cell_range(va, b.lo[va], b.hi[va]);
            std::vector<double> planes{b.lo[axis]};
            if (b.hi[axis] - b.lo[axis] > tol) planes.push_back(b.hi[axis]);
            for (double pc : planes) {
                const std::ptrdiff_t p = line_index(axis, pc);
                if (p < 0) continue;
                const auto plane = static_cast<std::size_t>(p);
                for (std::size_t v = vr.first; v < vr.second; ++v) {
                    for (std::size_t u = ur.first; u < ur.second; ++u) {
                        const std::size_t key = face_key(g, axis, plane, ua, u, va, v);
                        for (int dir : {-1, +1}) {
                            const std::uint8_t bit = dir < 0 ? 1 : 2;
                            if (metal[key] & bit) continue;
                            if (dir < 0 && plane == 0) continue;
                            if (dir > 0 && plane + 1 >= g.nodes(axis)) continue;
                            const std::size_t pcell = dir < 0 ? plane - 1 : plane;
                            const std::size_t cell = cell_at(g, axis, pcell, ua, u, va, v);
                            metal[key] |= bit;
                            const MaterialKind k = kind_of(cell);
                            if (k == MaterialKind::conductor) continue;
                            SurfaceFace f;
                            if (bump && axis != 2) {
                                f.cls = SurfaceClass::Bump;
                            } else {
                                f.cls = k == MaterialKind::vacuum ? SurfaceClass::MA : SurfaceClass::MS;
                            }
                            f.side = geo.side_of(face_z_um(g, axis, plane, v));
                            f.axis = axis;
                            f.plane = plane;
                            f.u = u;
                            f.v = v;
                            f.toward = dir;
                            f.cell = cell;
                            f.other = cell;
                            f.area = g.spacing(ua, u) * g.spacing(va, v);
                            out.faces_.push_back(f);
                        }
                    }
                }
            }
        }
    }

    for (int axis = 0; axis < 3; ++axis) {
        const auto [ua, va] = in_plane(axis);
        for (std::size_t plane = 1; plane + 1 < g.nodes(axis); ++plane) {
            for (std::size_t v = 0; v < g.cells(va); ++v) {
                for (std::size_t u = 0; u < g.cells(ua); ++u) {
                    const std::size_t below = cell_at(g, axis, plane - 1, ua, u, va, v);
                    const std::size_t above = cell_at(g, axis, plane, ua, u, va, v);
                    const MaterialKind kb = kind_of(below);
                    const MaterialKind ka = kind_of(above);
                    const bool b_sub = kb == MaterialKind::dielectric && ka == MaterialKind::vacuum;
                    const bool a_sub = ka == MaterialKind::dielectric && kb == MaterialKind::vacuum;
                    if (!b_sub && !a_sub) continue;
                    if (metal[face_key(g, axis, plane, ua, u, va, v)] != 0) continue;
                    SurfaceFace f;
                    f.cls = SurfaceClass::SA;
                    f.side = geo.side_of(face_z_um(g, axis, plane, v));
                    f.axis = axis;
                    f.plane = plane;
                    f.u = u;
                    f.v = v;
                    f.toward = b_sub ? -1 : +1;
                    f.cell = b_sub ? below : above;
                    f.other = b_sub ? above : below;
                    f.area = g.spacing(ua, u) * g.spacing(va, v);
                    out.faces_.push_back(f);
                }
            }
        }
    }
    return out;
}

SurfaceSet classify_surfaces(const ValidatedGeometry& geometry) {
    MeshPolicy p;
    p.refine_near_surfaces = false;
    const double span = std::max({geometry.domain().extent(0), geometry.domain().extent(1),
                                  geometry.domain().extent(2)});
    p.min_cell = {span, span, span};
    p.max_cell = {span, span, span};
    p.max_aspect_ratio = std::numeric_limits<double>::infinity();
    p.max_growth_ratio = std::numeric_limits<double>::infinity();
    return classify_surfaces(build_grid(geometry, p));
}

}  // namespace flipmon
