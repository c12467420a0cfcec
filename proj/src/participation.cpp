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

#include "flipmon/participation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "flipmon/error.hpp"
#include "flipmon/units.hpp"

namespace flipmon {

std::string_view to_string(RegionId r) {
    switch (r) {
        case RegionId::Sub_t: return "Sub_t";
        case RegionId::Sub_b: return "Sub_b";
        case RegionId::Vacuum: return "Vacuum";
        case RegionId::VacuumGapOnly: return "VacuumGapOnly";
        case RegionId::MA_t: return "MA_t";
        case RegionId::MS_t: return "MS_t";
        case RegionId::SA_t: return "SA_t";
        case RegionId::MA_b: return "MA_b";
        case RegionId::MS_b: return "MS_b";
        case RegionId::SA_b: return "SA_b";
        case RegionId::BumpSurface: return "BumpSurface";
    }
    return "?";
}

RegionId parse_region(std::string_view s) {
    if (s == "SM_t") return RegionId::MS_t;
    if (s == "SM_b") return RegionId::MS_b;
    for (RegionId r : kAllRegions) {
        if (to_string(r) == s) return r;
    }
    throw ConfigError("unknown region '" + std::string(s) + "'");
}

bool is_bulk(RegionId r) {
    return r == RegionId::Sub_t || r == RegionId::Sub_b || r == RegionId::Vacuum ||
           r == RegionId::VacuumGapOnly;
}

std::pair<SurfaceClass, ChipSide> interface_of(RegionId r) {
    switch (r) {
        case RegionId::MA_t: return {SurfaceClass::MA, ChipSide::top};
        case RegionId::MS_t: return {SurfaceClass::MS, ChipSide::top};
        case RegionId::SA_t: return {SurfaceClass::SA, ChipSide::top};
        case RegionId::MA_b: return {SurfaceClass::MA, ChipSide::bottom};
        case RegionId::MS_b: return {SurfaceClass::MS, ChipSide::bottom};
        case RegionId::SA_b: return {SurfaceClass::SA, ChipSide::bottom};
        case RegionId::BumpSurface: return {SurfaceClass::Bump, ChipSide::bottom};
        default: break;
    }
    throw ConfigError("region '" + std::string(to_string(r)) + "' is not an interface");
}

std::vector<Box> inter_pad_gaps(const ValidatedGeometry& geo, const std::vector<Box>& boxes) {
    const auto top = geo.find_net(NetRole::pad_top);
    const auto bottom = geo.find_net(NetRole::pad_bottom);
    std::vector<Box> gaps;
    if (!top || !bottom) return gaps;
    for (std::size_t a = 0; a < boxes.size(); ++a) {
        if (geo.solid_net(a) != static_cast<int>(*top)) continue;
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            if (geo.solid_net(b) != static_cast<int>(*bottom)) continue;
            Box g;
            bool ok = true;
            for (int ax = 0; ax < 2; ++ax) {
                g.lo[ax] = std::max(boxes[a].lo[ax], boxes[b].lo[ax]);
                g.hi[ax] = std::min(boxes[a].hi[ax], boxes[b].hi[ax]);
                ok = ok && g.hi[ax] > g.lo[ax];
            }
            if (!ok) continue;
            const Box& lower = boxes[a].hi[2] <= boxes[b].lo[2] ? boxes[a] : boxes[b];
            const Box& upper = &lower == &boxes[a] ? boxes[b] : boxes[a];
            if (!(upper.lo[2] > lower.hi[2])) continue;
            g.lo[2] = lower.hi[2];
            g.hi[2] = upper.lo[2];
            gaps.push_back(g);
        }
    }
    return gaps;
}

std::vector<unsigned char> region_mask(const RectilinearGrid& g, RegionId region) {
    if (!is_bulk(region)) throw ConfigError("region_mask needs a bulk region");
    const ValidatedGeometry& geo = g.geometry();
    const auto& materials = geo.materials();
    std::vector<unsigned char> mask(g.cell_count(), 0);
    std::vector<Box> gaps;
    if (region == RegionId::VacuumGapOnly) gaps = inter_pad_gaps(geo, g.effective_boxes());
    for (std::size_t k = 0; k < g.cells(2); ++k) {
        const double zc = m_to_um(0.5 * (g.lines(2)[k] + g.lines(2)[k + 1]));
        const ChipSide side = geo.side_of(zc);
        for (std::size_t j = 0; j < g.cells(1); ++j) {
            const double yc = m_to_um(0.5 * (g.lines(1)[j] + g.lines(1)[j + 1]));
            for (std::size_t i = 0; i < g.cells(0); ++i) {
                const std::size_t c = g.cell_index(i, j, k);
                const MaterialKind kind = materials[g.cell_material(c)].kind;
                bool in = false;
                switch (region) {
                    case RegionId::Sub_t:
                        in = kind == MaterialKind::dielectric && side == ChipSide::top;
                        break;
                    case RegionId::Sub_b:
                        in = kind == MaterialKind::dielectric && side == ChipSide::bottom;
                        break;
                    case RegionId::Vacuum: in = kind == MaterialKind::vacuum; break;
                    case RegionId::VacuumGapOnly:
                        if (kind == MaterialKind::vacuum) {
                            const double xc = m_to_um(0.5 * (g.lines(0)[i] + g.lines(0)[i + 1]));
                            for (const Box& b : gaps) {
                                if (b.contains({xc, yc, zc})) {
                                    in = true;
                                    break;
                                }
                            }
                        }
                        break;
                    default: break;
                }
                mask[c] = in ? 1 : 0;
            }
        }
    }
    return mask;
}

double bulk_participation(const RectilinearGrid& g, std::span<const double> cell_energy,
                          double u_tot, RegionId region) {
    const auto mask = region_mask(g, region);
    if (std::find(mask.begin(), mask.end(), 1) == mask.end()) {
        throw RegionEmpty("region " + std::string(to_string(region)) + " has no cells");
    }
    if (!(u_tot > 0.0)) throw NumericalError("total energy must be positive");
    double s = 0.0;
    for (std::size_t c = 0; c < mask.size(); ++c) {
        if (mask[c]) s += cell_energy[c];
    }
    return s / u_tot;
}

double bulk_participation(const FieldSolution& solution, RegionId region) {
    const auto e = cell_energies(solution);
    double u = 0.0;
    for (double v : e) u += v;
    return bulk_participation(*solution.grid, e, u, region);
}

namespace {

std::array<std::size_t, 3> cell_ijk(const RectilinearGrid& g, std::size_t c) {
    const std::size_t cx = g.cells(0), cy = g.cells(1);
    return {c % cx, (c / cx) % cy, c / (cx * cy)};
}

// Mean gradient along `axis` over the four parallel edges of a cell.
double cell_gradient(const FieldSolution& s, std::size_t cell, int axis) {
    const RectilinearGrid& g = *s.grid;
    const auto ijk = cell_ijk(g, cell);
    double sum = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            std::array<std::size_t, 3> lo = ijk;
            const int u = axis == 0 ? 1 : 0;
            const int v = axis == 2 ? 1 : 2;
            lo[u] += a;
            lo[v] += b;
            std::array<std::size_t, 3> hi = lo;
            hi[axis] += 1;
            sum += s.potential[g.node_index(hi[0], hi[1], hi[2])] -
                   s.potential[g.node_index(lo[0], lo[1], lo[2])];
        }
    }
    return 0.25 * sum / g.spacing(axis, ijk[axis]);
}

// Tangential gradient components on a face from its four in-plane edges.
double face_tangential_sq(const FieldSolution& s, const SurfaceFace& f) {
    const RectilinearGrid& g = *s.grid;
    const int ua = f.axis == 0 ? 1 : 0;
    const int va = f.axis == 2 ? 1 : 2;
    auto phi = [&](std::size_t du, std::size_t dv) {
        std::array<std::size_t, 3> idx{};
        idx[f.axis] = f.plane;
        idx[ua] = f.u + du;
        idx[va] = f.v + dv;
        return s.potential[g.node_index(idx[0], idx[1], idx[2])];
    };
    const double eu = 0.5 * ((phi(1, 0) - phi(0, 0)) + (phi(1, 1) - phi(0, 1))) / g.spacing(ua, f.u);
    const double ev = 0.5 * ((phi(0, 1) - phi(0, 0)) + (phi(1, 1) - phi(1, 0))) / g.spacing(va, f.v);
    return eu * eu + ev * ev;
}

void check_thin_layer(double t, double eps_layer, double u_tot) {
    if (!(t >= 0.0)) throw ConfigError("interface thickness must be non-negative");
    if (!(eps_layer >= 1.0)) throw ConfigError("interface permittivity must be >= 1");
    if (!(u_tot > 0.0)) throw NumericalError("total energy must be positive");
}

}  // namespace

double metal_interface_participation(const FieldSolution& s, std::span<const SurfaceFace> faces,
                                     double t, double eps_layer, double u_tot) {
    if (faces.empty()) throw EmptySurfaceSet("no faces in the surface set");
    check_thin_layer(t, eps_layer, u_tot);
    const RectilinearGrid& g = *s.grid;
    double sum = 0.0;
    for (const auto& f : faces) {
        const double eps_adj = g.cell_epsilon(f.cell);
        const double en = cell_gradient(s, f.cell, f.axis);
        sum += (eps_adj * eps_adj / eps_layer) * en * en * f.area;
    }
    return t * 0.5 * constants::vacuum_permittivity * sum / u_tot;
}

double sa_interface_participation(const FieldSolution& s, std::span<const SurfaceFace> faces,
                                  double t, double eps_layer, double u_tot) {
    if (faces.empty()) throw EmptySurfaceSet("no faces in the surface set");
    check_thin_layer(t, eps_layer, u_tot);
    const RectilinearGrid& g = *s.grid;
    double sum = 0.0;
    for (const auto& f : faces) {
        const double eps_sub = g.cell_epsilon(f.cell);
        const double en = cell_gradient(s, f.cell, f.axis);
        sum += (eps_layer * face_tangential_sq(s, f) + (eps_sub * eps_sub / eps_layer) * en * en) *
               f.area;
    }
    return t * 0.5 * constants::vacuum_permittivity * sum / u_tot;
}

ParticipationReport full_report(const FieldSolution& s, const SurfaceSet& surfaces) {
    const RectilinearGrid& g = *s.grid;
    const auto e = cell_energies(s);
    double u = 0.0;
    for (double v : e) u += v;
    if (!(u > 0.0)) throw NumericalError("total energy must be positive");

    ParticipationReport r;
    r.u_tot = u;
    const InterfaceSpec& spec = g.geometry().interface_spec();
    for (RegionId id : kAllRegions) {
        if (is_bulk(id)) {
            const auto mask = region_mask(g, id);
            double sum = 0.0;
            for (std::size_t c = 0; c < mask.size(); ++c) {
                if (mask[c]) sum += e[c];
            }
            r.p[id] = sum / u;
            continue;
        }
        const auto [cls, side] = interface_of(id);
        const auto faces = cls == SurfaceClass::Bump ? surfaces.select(cls) : surfaces.select(cls, side);
        const bool enabled = cls == SurfaceClass::Bump ||
                             spec.is_enabled(static_cast<InterfaceClass>(static_cast<int>(cls)), side);
        if (faces.empty() || !enabled) {
            r.p[id] = 0.0;
            r.empty_regions.push_back(id);
            continue;
        }
        r.p[id] = cls == SurfaceClass::SA
                      ? sa_interface_participation(s, faces, spec.thickness_m, spec.epsilon_layer, u)
                      : metal_interface_participation(s, faces, spec.thickness_m,
                                                      spec.epsilon_layer, u);
    }
    r.bulk_sum = r.p[RegionId::Sub_t] + r.p[RegionId::Sub_b] + r.p[RegionId::Vacuum];

    double hmin = 1e300, hmax = 0.0;
    for (int a = 0; a < 3; ++a) {
        for (std::size_t c = 0; c < g.cells(a); ++c) {
            hmin = std::min(hmin, g.spacing(a, c));
            hmax = std::max(hmax, g.spacing(a, c));
        }
    }
    r.metadata = {{"nodes", {g.nodes(0), g.nodes(1), g.nodes(2)}},
                  {"cells", g.cell_count()},
                  {"min_spacing_um", m_to_um(hmin)},
                  {"max_spacing_um", m_to_um(hmax)},
                  {"solver_iterations", s.iterations},
                  {"solver_residual", s.residual},
                  {"interface_thickness_nm", spec.thickness_m * 1e9},
                  {"interface_epsilon", spec.epsilon_layer},
                  {"sa_perpendicular_field", kSaConvention},
                  {"metal_perpendicular_field", "adjacent-cell mean, half a cell off the metal"},
                  {"interface_rule", "first-order thin layer, not subtracted from bulk"}};
    return r;
}

ParticipationReport full_report(const FieldSolution& solution) {
    return full_report(solution, classify_surfaces(*solution.grid));
}

void attach_error_estimate(ParticipationReport& fine, const ParticipationReport& coarse) {
    for (const auto& [id, p] : fine.p) {
        auto it = coarse.p.find(id);
        if (it != coarse.p.end()) fine.abs_error_est[id] = std::abs(p - it->second);
    }
}

namespace {

std::string sci(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

}  // namespace

void write_participation_csv(std::ostream& out, const ParticipationReport& r) {
    out << "region,p,abs_error_est\n";
    for (RegionId id : kAllRegions) {
        out << to_string(id) << ',' << sci(r.p.at(id)) << ',';
        auto it = r.abs_error_est.find(id);
        if (it != r.abs_error_est.end()) out << sci(it->second, 2);
        out << '\n';
    }
}

void write_participation_table(std::ostream& out, const ParticipationReport& r) {
    struct Row {
        const char* label;
        RegionId id;
    };
    static const Row rows[] = {
        {"Sub_t", RegionId::Sub_t},
        {"Vacuum gap", RegionId::Vacuum},
        {"Sub_b", RegionId::Sub_b},
        {"SM_t (MS_t)", RegionId::MS_t},
        {"SA_t", RegionId::SA_t},
        {"MA_t", RegionId::MA_t},
        {"SM_b (MS_b)", RegionId::MS_b},
        {"SA_b", RegionId::SA_b},
        {"MA_b", RegionId::MA_b},
        {"Bump surface", RegionId::BumpSurface},
        {"Vacuum gap, inter-pad only", RegionId::VacuumGapOnly},
    };
    char line[128];
    out << "Energy participation ratio\n";
    std::snprintf(line, sizeof line, "%-28s %s\n", "Component", "p");
    out << line;
    for (const Row& row : rows) {
        std::snprintf(line, sizeof line, "%-28s %.3g\n", row.label, r.p.at(row.id));
        out << line;
    }
    std::snprintf(line, sizeof line, "%-28s %.4f\n", "Bulk sum", r.bulk_sum);
    out << line;
    out << "SA convention: " << kSaConvention << '\n';
}

nlohmann::json to_json(const ParticipationReport& r) {
    nlohmann::json p = nlohmann::json::object();
    nlohmann::json err = nlohmann::json::object();
    for (const auto& [id, v] : r.p) p[std::string(to_string(id))] = v;
    for (const auto& [id, v] : r.abs_error_est) err[std::string(to_string(id))] = v;
    nlohmann::json empty = nlohmann::json::array();
    for (RegionId id : r.empty_regions) empty.push_back(to_string(id));
    return {{"p", p},
            {"abs_error_est", err},
            {"u_tot_J", r.u_tot},
            {"bulk_sum", r.bulk_sum},
            {"empty_regions", empty},
            {"metadata", r.metadata}};
}

ParticipationReport report_from_json(const nlohmann::json& j) {
    ParticipationReport r;
    try {
        for (const auto& [name, v] : j.at("p").items()) r.p[parse_region(name)] = v.get<double>();
        if (j.contains("abs_error_est")) {
            for (const auto& [name, v] : j.at("abs_error_est").items()) {
                r.abs_error_est[parse_region(name)] = v.get<double>();
            }
        }
        r.u_tot = j.value("u_tot_J", 0.0);
        r.bulk_sum = j.value("bulk_sum", 0.0);
        if (j.contains("metadata")) r.metadata = j.at("metadata");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed participation report: ") + e.what());
    }
    for (RegionId id : kAllRegions) {
        if (!r.p.count(id)) {
            throw ConfigError("participation report lacks region " + std::string(to_string(id)));
        }
    }
    return r;
}

}  // namespace flipmon
