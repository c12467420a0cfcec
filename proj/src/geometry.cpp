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

#include "flipmon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "flipmon/error.hpp"

namespace flipmon {

bool Box::contains(const std::array<double, 3>& p, double tol) const {
    for (int a = 0; a < 3; ++a) {
        if (p[a] < lo[a] - tol || p[a] > hi[a] + tol) {
            return false;
        }
    }
    return true;
}

bool Box::touches(const Box& other, double tol) const {
    for (int a = 0; a < 3; ++a) {
        if (hi[a] < other.lo[a] - tol || other.hi[a] < lo[a] - tol) {
            return false;
        }
    }
    return true;
}

bool Box::overlaps(const Box& other) const {
    for (int a = 0; a < 3; ++a) {
        if (hi[a] <= other.lo[a] || other.hi[a] <= lo[a]) {
            return false;
        }
    }
    return true;
}

bool Box::inside(const Box& outer, double tol) const {
    for (int a = 0; a < 3; ++a) {
        if (lo[a] < outer.lo[a] - tol || hi[a] > outer.hi[a] + tol) {
            return false;
        }
    }
    return true;
}

std::string_view to_string(MaterialKind kind) {
    switch (kind) {
        case MaterialKind::conductor:
            return "conductor";
        case MaterialKind::dielectric:
            return "dielectric";
        case MaterialKind::vacuum:
            return "vacuum";
    }
    return "?";
}

std::string_view to_string(NetRole role) {
    switch (role) {
        case NetRole::pad_top:
            return "pad_top";
        case NetRole::pad_bottom:
            return "pad_bottom";
        case NetRole::ground:
            return "ground";
        case NetRole::bump:
            return "bump";
        case NetRole::other:
            return "other";
    }
    return "?";
}

std::string_view to_string(InterfaceClass c) {
    switch (c) {
        case InterfaceClass::MA:
            return "MA";
        case InterfaceClass::MS:
            return "MS";
        case InterfaceClass::SA:
            return "SA";
    }
    return "?";
}

std::string_view to_string(ChipSide s) { return s == ChipSide::top ? "top" : "bottom"; }

std::string_view to_string(BoundaryKind b) {
    return b == BoundaryKind::grounded ? "grounded" : "insulating";
}

MaterialKind parse_material_kind(std::string_view s) {
    if (s == "conductor") return MaterialKind::conductor;
    if (s == "dielectric") return MaterialKind::dielectric;
    if (s == "vacuum") return MaterialKind::vacuum;
    throw GeometryError("unknown material kind '" + std::string(s) + "'");
}

NetRole parse_net_role(std::string_view s) {
    if (s == "pad_top") return NetRole::pad_top;
    if (s == "pad_bottom") return NetRole::pad_bottom;
    if (s == "ground") return NetRole::ground;
    if (s == "bump") return NetRole::bump;
    if (s == "other") return NetRole::other;
    throw GeometryError("unknown net role '" + std::string(s) + "'");
}

BoundaryKind parse_boundary_kind(std::string_view s) {
    if (s == "grounded") return BoundaryKind::grounded;
    if (s == "insulating") return BoundaryKind::insulating;
    throw GeometryError("unknown boundary kind '" + std::string(s) + "'");
}

std::optional<std::size_t> ValidatedGeometry::find_net(std::string_view name) const {
    for (std::size_t i = 0; i < geometry_.nets.size(); ++i) {
        if (geometry_.nets[i].name == name) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> ValidatedGeometry::find_net(NetRole role) const {
    for (std::size_t i = 0; i < geometry_.nets.size(); ++i) {
        if (geometry_.nets[i].role == role) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> ValidatedGeometry::find_material(std::string_view name) const {
    for (std::size_t i = 0; i < geometry_.materials.size(); ++i) {
        if (geometry_.materials[i].name == name) return i;
    }
    return std::nullopt;
}

ChipSide ValidatedGeometry::side_of(double z_um) const {
    if (geometry_.chip_split_z && z_um > *geometry_.chip_split_z) {
        return ChipSide::top;
    }
    return ChipSide::bottom;
}

ValidatedGeometry validate(DeviceGeometry geometry) {
    ValidatedGeometry out;
    const Box& domain = geometry.domain;
    for (int a = 0; a < 3; ++a) {
        if (!(domain.extent(a) > 0.0) || !std::isfinite(domain.extent(a))) {
            throw DegenerateSolid("domain has non-positive extent along axis " + std::to_string(a));
        }
    }
    double scale = 0.0;
    for (int a = 0; a < 3; ++a) {
        scale = std::max({scale, std::abs(domain.lo[a]), std::abs(domain.hi[a])});
    }
    out.length_tol_ = 1e-9 * std::max(scale, 1.0);
    const double tol = out.length_tol_;

    std::set<std::string> names;
    bool have_vacuum = false;
    for (std::size_t i = 0; i < geometry.materials.size(); ++i) {
        const Material& m = geometry.materials[i];
        if (!names.insert(m.name).second) {
            throw GeometryError("duplicate material '" + m.name + "'");
        }
        if (m.kind != MaterialKind::conductor && !(m.epsilon_r >= 1.0)) {
            throw GeometryError("material '" + m.name + "' has epsilon_r < 1");
        }
        if (m.kind == MaterialKind::vacuum) {
            if (m.epsilon_r != 1.0) {
                throw GeometryError("vacuum material '" + m.name + "' must have epsilon_r = 1");
            }
            if (!have_vacuum) {
                out.background_material_ = i;
                have_vacuum = true;
            }
        }
    }
    if (!have_vacuum) {
        if (names.count("vacuum") != 0) {
            throw GeometryError("material named 'vacuum' is not of vacuum kind");
        }
        geometry.materials.push_back(Material{"vacuum", MaterialKind::vacuum, 1.0});
        out.background_material_ = geometry.materials.size() - 1;
    }

    names.clear();
    for (const Net& n : geometry.nets) {
        if (!names.insert(n.name).second) {
            throw GeometryError("duplicate net '" + n.name + "'");
        }
    }

    std::vector<int> net_use(geometry.nets.size(), 0);
    for (const Solid& s : geometry.solids) {
        const std::string label = s.name.empty() ? std::string("<unnamed>") : s.name;
        for (int a = 0; a < 3; ++a) {
            if (!(s.bounds.extent(a) > 0.0)) {
                throw DegenerateSolid("solid '" + label + "' has zero extent along axis " +
                                      std::to_string(a));
            }
        }
        if (!s.bounds.inside(domain, tol)) {
            throw GeometryError("solid '" + label + "' extends outside the domain");
        }
        std::size_t mi = 0;
        for (; mi < geometry.materials.size(); ++mi) {
            if (geometry.materials[mi].name == s.material) break;
        }
        if (mi == geometry.materials.size()) {
            throw DanglingReference("solid '" + label + "' references unknown material '" +
                                    s.material + "'");
        }
        const bool conductor = geometry.materials[mi].kind == MaterialKind::conductor;
        int ni = -1;
        if (s.net) {
            auto it = std::find_if(geometry.nets.begin(), geometry.nets.end(),
                                   [&](const Net& n) { return n.name == *s.net; });
            if (it == geometry.nets.end()) {
                throw DanglingReference("solid '" + label + "' references unknown net '" +
                                        *s.net + "'");
            }
            ni = static_cast<int>(it - geometry.nets.begin());
        }
        if (conductor != (ni >= 0)) {
            throw GeometryError("solid '" + label +
                                "': a net must be given exactly when the material is a conductor");
        }
        if (ni >= 0) ++net_use[static_cast<std::size_t>(ni)];
        out.solid_material_.push_back(mi);
        out.solid_net_.push_back(ni);
    }
    for (std::size_t i = 0; i < geometry.nets.size(); ++i) {
        if (net_use[i] == 0) {
            throw GeometryError("net '" + geometry.nets[i].name +
                                "' is not referenced by any conductor solid");
        }
    }

    const auto& solids = geometry.solids;
    for (std::size_t i = 0; i < solids.size(); ++i) {
        if (out.solid_net_[i] < 0) continue;
        for (std::size_t j = i + 1; j < solids.size(); ++j) {
            if (out.solid_net_[j] < 0 || out.solid_net_[j] == out.solid_net_[i]) continue;
            if (solids[i].bounds.touches(solids[j].bounds, tol)) {
                const bool zero_gap = !solids[i].bounds.overlaps(solids[j].bounds);
                throw OverlapError("solids '" + solids[i].name + "' and '" + solids[j].name +
                                   "' of distinct nets " +
                                   (zero_gap ? "touch (zero gap)" : "overlap"));
            }
        }
    }

    out.geometry_ = std::move(geometry);
    return out;
}

std::vector<Box> effective_boxes(const ValidatedGeometry& geometry, double sheet_threshold_um) {
    const auto& solids = geometry.solids();
    const double tol = geometry.length_tolerance();
    std::vector<Box> boxes;
    boxes.reserve(solids.size());
    for (std::size_t i = 0; i < solids.size(); ++i) {
        Box b = solids[i].bounds;
        if (geometry.material_of(i).kind == MaterialKind::conductor) {
            for (int a = 0; a < 3; ++a) {
                if (b.extent(a) >= sheet_threshold_um) continue;
                const int u = (a + 1) % 3;
                const int v = (a + 2) % 3;
                bool lo_rests = false;
                bool hi_rests = false;
                for (std::size_t j = 0; j < solids.size(); ++j) {
                    if (geometry.material_of(j).kind != MaterialKind::dielectric) continue;
                    const Box& d = solids[j].bounds;
                    const bool footprint = d.lo[u] < b.hi[u] && b.lo[u] < d.hi[u] &&
                                           d.lo[v] < b.hi[v] && b.lo[v] < d.hi[v];
                    if (!footprint) continue;
                    auto coplanar = [&](double c) {
                        return std::abs(d.lo[a] - c) <= tol || std::abs(d.hi[a] - c) <= tol;
                    };
                    lo_rests = lo_rests || coplanar(b.lo[a]);
                    hi_rests = hi_rests || coplanar(b.hi[a]);
                }
                double plane = 0.5 * (b.lo[a] + b.hi[a]);
                if (hi_rests && !lo_rests) {
                    plane = b.hi[a];
                } else if (lo_rests) {
                    plane = b.lo[a];
                }
                b.lo[a] = plane;
                b.hi[a] = plane;
            }
        }
        boxes.push_back(b);
    }
    return boxes;
}

double min_z_distance(const ValidatedGeometry& geometry, std::size_t net_a, std::size_t net_b) {
    double best = std::numeric_limits<double>::infinity();
    const auto& solids = geometry.solids();
    for (std::size_t i = 0; i < solids.size(); ++i) {
        if (geometry.solid_net(i) != static_cast<int>(net_a)) continue;
        for (std::size_t j = 0; j < solids.size(); ++j) {
            if (geometry.solid_net(j) != static_cast<int>(net_b)) continue;
            const Box& p = solids[i].bounds;
            const Box& q = solids[j].bounds;
            const bool facing = p.lo[0] < q.hi[0] && q.lo[0] < p.hi[0] && p.lo[1] < q.hi[1] &&
                                q.lo[1] < p.hi[1];
            if (!facing) continue;
            const double gap = std::max(q.lo[2] - p.hi[2], p.lo[2] - q.hi[2]);
            best = std::min(best, std::max(gap, 0.0));
        }
    }
    return best;
}

}  // namespace flipmon
