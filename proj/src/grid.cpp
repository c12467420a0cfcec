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

#include "flipmon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flipmon/error.hpp"
#include "flipmon/units.hpp"

namespace flipmon {

MeshPolicy MeshPolicy::refined() const {
    MeshPolicy p = *this;
    for (int a = 0; a < 3; ++a) {
        p.min_cell[a] *= 0.5;
        p.max_cell[a] *= 0.5;
    }
    p.max_growth_ratio = std::sqrt(max_growth_ratio);
    p.max_cells = max_cells * 8;
    return p;
}

nlohmann::json to_json(const MeshPolicy& p) {
    return {{"min_cell_um", p.min_cell},
            {"max_cell_um", p.max_cell},
            {"refine_near_surfaces", p.refine_near_surfaces},
            {"max_growth_ratio", p.max_growth_ratio},
            {"max_aspect_ratio", p.max_aspect_ratio},
            {"max_cells", p.max_cells},
            {"sheet_threshold_um", p.sheet_threshold}};
}

MeshPolicy mesh_policy_from_json(const nlohmann::json& j, MeshPolicy p) {
    auto triple = [](const nlohmann::json& v) {
        if (v.is_number()) {
            const double x = v.get<double>();
            return std::array<double, 3>{x, x, x};
        }
        return v.get<std::array<double, 3>>();
    };
    try {
        if (j.contains("min_cell_um")) p.min_cell = triple(j.at("min_cell_um"));
        if (j.contains("max_cell_um")) p.max_cell = triple(j.at("max_cell_um"));
        p.refine_near_surfaces = j.value("refine_near_surfaces", p.refine_near_surfaces);
        p.max_growth_ratio = j.value("max_growth_ratio", p.max_growth_ratio);
        p.max_aspect_ratio = j.value("max_aspect_ratio", p.max_aspect_ratio);
        p.max_cells = j.value("max_cells", p.max_cells);
        p.sheet_threshold = j.value("sheet_threshold_um", p.sheet_threshold);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed mesh policy: ") + e.what());
    }
    for (int a = 0; a < 3; ++a) {
        if (!(p.min_cell[a] > 0.0) || !(p.max_cell[a] >= p.min_cell[a])) {
            throw ConfigError("mesh policy needs 0 < min_cell <= max_cell");
        }
    }
    if (!(p.max_growth_ratio >= 1.0)) {
        throw ConfigError("max_growth_ratio must be >= 1");
    }
    return p;
}

namespace {

// Gaps between two refined faces up to this many min_cells are meshed uniformly.
constexpr double kUniformSpan = 20.0;

// Sizes for one interval, growing geometrically from both ends.
std::vector<double> grade_interval(double length, double h_left, double h_right, double ratio,
                                   double h_max) {
    std::vector<double> left;
    std::vector<double> right;
    double sl = std::min(h_left, h_max);
    double sr = std::min(h_right, h_max);
    double sum = 0.0;
    while (sum < length * (1.0 - 1e-12)) {
        if (sl <= sr) {
            left.push_back(sl);
            sum += sl;
            sl = std::min(sl * ratio, h_max);
        } else {
            right.push_back(sr);
            sum += sr;
            sr = std::min(sr * ratio, h_max);
        }
    }
    std::vector<double> sizes = std::move(left);
    sizes.insert(sizes.end(), right.rbegin(), right.rend());
    const double scale = length / sum;
    for (double& h : sizes) h *= scale;
    return sizes;
}

}  // namespace

std::vector<double> graded_lines(std::vector<double> breakpoints, std::vector<bool> refined,
                                 double min_cell, double max_cell, double growth_ratio) {
    const std::size_t m = breakpoints.size();
    if (m < 2) throw GeometryError("need at least two breakpoints per axis");
    std::vector<double> end_size(m);
    for (std::size_t i = 0; i < m; ++i) {
        double h = refined[i] ? min_cell : max_cell;
        if (i > 0) h = std::min(h, breakpoints[i] - breakpoints[i - 1]);
        if (i + 1 < m) h = std::min(h, breakpoints[i + 1] - breakpoints[i]);
        end_size[i] = h;
    }
    std::vector<double> lines{breakpoints.front()};
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        std::vector<double> sizes;
        if (refined[i] && refined[i + 1] && b - a <= kUniformSpan * min_cell) {
            const auto n = static_cast<std::size_t>(std::ceil((b - a) / min_cell - 1e-9));
            sizes.assign(std::max<std::size_t>(n, 1), (b - a) / static_cast<double>(std::max<std::size_t>(n, 1)));
        } else {
            sizes = grade_interval(b - a, end_size[i], end_size[i + 1], growth_ratio, max_cell);
        }
        double x = a;
        for (std::size_t s = 0; s + 1 < sizes.size(); ++s) {
            x += sizes[s];
            lines.push_back(x);
        }
        lines.push_back(b);
    }

    // Split cells until neighbouring sizes respect the growth bound.
    const double bound = growth_ratio * (1.0 + 1e-9);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<double> next{lines.front()};
        const std::size_t n = lines.size() - 1;
        for (std::size_t c = 0; c < n; ++c) {
            const double h = lines[c + 1] - lines[c];
            double neighbour = std::numeric_limits<double>::infinity();
            if (c > 0) neighbour = std::min(neighbour, lines[c] - lines[c - 1]);
            if (c + 1 < n) neighbour = std::min(neighbour, lines[c + 2] - lines[c + 1]);
            if (h > bound * neighbour) {
                next.push_back(lines[c] + 0.5 * h);
                changed = true;
            }
            next.push_back(lines[c + 1]);
        }
        lines = std::move(next);
    }
    return lines;
}

void RectilinearGrid::assign(const std::vector<Box>& boxes) {
    boxes_ = boxes;
    const std::size_t ncell = cell_count();
    const std::size_t nnode = node_count();
    cell_material_.assign(ncell, static_cast<std::uint16_t>(geometry_.background_material()));
    node_net_.assign(nnode, kFree);

    std::array<std::vector<double>, 3> centers_um;
    std::array<std::vector<double>, 3> nodes_um;
    for (int a = 0; a < 3; ++a) {
        for (std::size_t c = 0; c + 1 < lines_[a].size(); ++c) {
            centers_um[a].push_back(m_to_um(0.5 * (lines_[a][c] + lines_[a][c + 1])));
        }
        for (double x : lines_[a]) nodes_um[a].push_back(m_to_um(x));
    }
    const double tol = geometry_.length_tolerance();

    // Index range [first, last) of sorted values inside [lo, hi].
    auto range = [](const std::vector<double>& v, double lo, double hi) {
        auto first = std::lower_bound(v.begin(), v.end(), lo);
        auto last = std::upper_bound(v.begin(), v.end(), hi);
        return std::pair<std::size_t, std::size_t>(first - v.begin(),
                                                   std::max(first, last) - v.begin());
    };

    for (std::size_t s = 0; s < boxes.size(); ++s) {
        const Box& b = boxes[s];
        std::array<std::pair<std::size_t, std::size_t>, 3> r;
        for (int a = 0; a < 3; ++a) r[a] = range(centers_um[a], b.lo[a], b.hi[a]);
        const auto mat = static_cast<std::uint16_t>(geometry_.solid_material(s));
        for (std::size_t k = r[2].first; k < r[2].second; ++k) {
            for (std::size_t j = r[1].first; j < r[1].second; ++j) {
                for (std::size_t i = r[0].first; i < r[0].second; ++i) {
                    cell_material_[cell_index(i, j, k)] = mat;
                }
            }
        }
    }
    for (std::size_t s = 0; s < boxes.size(); ++s) {
        const int net = geometry_.solid_net(s);
        if (net < 0) continue;
        const Box& b = boxes[s];
        std::array<std::pair<std::size_t, std::size_t>, 3> r;
        for (int a = 0; a < 3; ++a) r[a] = range(nodes_um[a], b.lo[a] - tol, b.hi[a] + tol);
        for (std::size_t k = r[2].first; k < r[2].second; ++k) {
            for (std::size_t j = r[1].first; j < r[1].second; ++j) {
                for (std::size_t i = r[0].first; i < r[0].second; ++i) {
                    node_net_[node_index(i, j, k)] = net;
                }
            }
        }
    }

    const auto& materials = geometry_.materials();
    cell_epsilon_.resize(ncell);
    cell_conductor_.resize(ncell);
    for (std::size_t c = 0; c < ncell; ++c) {
        const Material& m = materials[cell_material_[c]];
        const bool conductor = m.kind == MaterialKind::conductor;
        cell_conductor_[c] = conductor ? 1 : 0;
        cell_epsilon_[c] = conductor ? 1.0 : m.epsilon_r;
    }
}

double RectilinearGrid::max_aspect_ratio() const {
    std::array<double, 3> hmin{};
    std::array<double, 3> hmax{};
    for (int a = 0; a < 3; ++a) {
        hmin[a] = std::numeric_limits<double>::infinity();
        hmax[a] = 0.0;
        for (std::size_t c = 0; c < cells(a); ++c) {
            hmin[a] = std::min(hmin[a], spacing(a, c));
            hmax[a] = std::max(hmax[a], spacing(a, c));
        }
    }
    double worst = 1.0;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            if (a != b) worst = std::max(worst, hmax[a] / hmin[b]);
        }
    }
    return worst;
}

double RectilinearGrid::max_adjacent_ratio() const {
    double worst = 1.0;
    for (int a = 0; a < 3; ++a) {
        for (std::size_t c = 1; c < cells(a); ++c) {
            const double h0 = spacing(a, c - 1);
            const double h1 = spacing(a, c);
            worst = std::max(worst, std::max(h0 / h1, h1 / h0));
        }
    }
    return worst;
}

namespace {

void check_budget(const std::array<std::vector<double>, 3>& lines, const MeshPolicy& policy) {
    double cells = 1.0;
    for (const auto& l : lines) cells *= static_cast<double>(l.size() - 1);
    if (cells > static_cast<double>(policy.max_cells)) {
        throw MeshBudgetExceeded("mesh needs " + std::to_string(static_cast<long long>(cells)) +
                                 " cells, budget is " + std::to_string(policy.max_cells));
    }
}

}  // namespace

RectilinearGrid build_grid(const ValidatedGeometry& geometry, const MeshPolicy& policy) {
    for (int a = 0; a < 3; ++a) {
        if (!(policy.min_cell[a] > 0.0)) throw ConfigError("min_cell must be positive");
    }
    const std::vector<Box> boxes = effective_boxes(geometry, policy.sheet_threshold);
    const Box& domain = geometry.domain();
    const double tol = geometry.length_tolerance();

    std::array<std::vector<double>, 3> lines_um;
    for (int a = 0; a < 3; ++a) {
        std::vector<std::pair<double, bool>> raw{{domain.lo[a], false}, {domain.hi[a], false}};
        for (const Box& b : boxes) {
            for (double c : {b.lo[a], b.hi[a]}) {
                const bool on_boundary =
                    std::abs(c - domain.lo[a]) <= tol || std::abs(c - domain.hi[a]) <= tol;
                raw.emplace_back(std::clamp(c, domain.lo[a], domain.hi[a]),
                                 policy.refine_near_surfaces && !on_boundary);
            }
        }
        std::sort(raw.begin(), raw.end());
        std::vector<double> points;
        std::vector<bool> refined;
        for (const auto& [c, r] : raw) {
            if (!points.empty() && c - points.back() <= tol) {
                refined.back() = refined.back() || r;
                continue;
            }
            points.push_back(c);
            refined.push_back(r);
        }
        points.front() = domain.lo[a];
        points.back() = domain.hi[a];
        lines_um[a] = graded_lines(points, refined, policy.min_cell[a], policy.max_cell[a],
                                   policy.max_growth_ratio);
    }
    check_budget(lines_um, policy);

    RectilinearGrid grid;
    grid.geometry_ = geometry;
    grid.policy_ = policy;
    for (int a = 0; a < 3; ++a) {
        for (double x : lines_um[a]) grid.lines_[a].push_back(um_to_m(x));
    }
    if (grid.max_aspect_ratio() > policy.max_aspect_ratio) {
        throw GeometryError("cell aspect ratio " + std::to_string(grid.max_aspect_ratio()) +
                            " exceeds the configured maximum");
    }
    grid.assign(boxes);
    return grid;
}

RectilinearGrid build_grid_from_lines(const ValidatedGeometry& geometry,
                                      std::array<std::vector<double>, 3> lines_um,
                                      const MeshPolicy& policy) {
    const std::vector<Box> boxes = effective_boxes(geometry, policy.sheet_threshold);
    const double tol = geometry.length_tolerance();
    for (int a = 0; a < 3; ++a) {
        auto& l = lines_um[a];
        if (l.size() < 2 || !std::is_sorted(l.begin(), l.end()) ||
            std::adjacent_find(l.begin(), l.end()) != l.end()) {
            throw GeometryError("grid lines must be strictly increasing with >= 2 entries");
        }
        auto present = [&](double c) {
            auto it = std::lower_bound(l.begin(), l.end(), c - tol);
            return it != l.end() && std::abs(*it - c) <= tol;
        };
        if (!present(geometry.domain().lo[a]) || !present(geometry.domain().hi[a])) {
            throw GeometryError("grid lines must span the domain");
        }
        for (const Box& b : boxes) {
            if (!present(b.lo[a]) || !present(b.hi[a])) {
                throw GeometryError("grid lines miss a solid face");
            }
        }
    }
    check_budget(lines_um, policy);
    RectilinearGrid grid;
    grid.geometry_ = geometry;
    grid.policy_ = policy;
    for (int a = 0; a < 3; ++a) {
        for (double x : lines_um[a]) grid.lines_[a].push_back(um_to_m(x));
    }
    grid.assign(boxes);
    return grid;
}

RectilinearGrid bisect_cells(const RectilinearGrid& grid) {
    std::array<std::vector<double>, 3> lines_um;
    for (int a = 0; a < 3; ++a) {
        const auto& l = grid.lines(a);
        for (std::size_t c = 0; c + 1 < l.size(); ++c) {
            lines_um[a].push_back(m_to_um(l[c]));
            lines_um[a].push_back(m_to_um(0.5 * (l[c] + l[c + 1])));
        }
        lines_um[a].push_back(m_to_um(l.back()));
    }
    MeshPolicy policy = grid.policy();
    policy.max_cells *= 8;
    return build_grid_from_lines(grid.geometry(), std::move(lines_um), policy);
}

}  // namespace flipmon
