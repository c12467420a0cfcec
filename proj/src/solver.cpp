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

#include "flipmon/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flipmon/error.hpp"
#include "flipmon/units.hpp"

namespace flipmon {

DriveVector DriveVector::scaled(double factor) const {
    DriveVector out;
    for (const auto& [k, v] : volts_) out.set(k, v * factor);
    return out;
}

std::vector<double> DriveVector::resolve(const ValidatedGeometry& geometry) const {
    std::vector<double> out(geometry.net_count(), 0.0);
    for (const auto& [name, v] : volts_) {
        const auto idx = geometry.find_net(name);
        if (!idx) throw NetNotFound("drive names unknown net '" + name + "'");
        if (!std::isfinite(v)) throw ConfigError("drive voltage for '" + name + "' is not finite");
        out[*idx] = v;
    }
    return out;
}

LaplaceSolver::LaplaceSolver(std::shared_ptr<const RectilinearGrid> grid, SolverSettings settings)
    : grid_(std::move(grid)), settings_(settings) {
    if (!grid_) throw ConfigError("solver needs a grid");
    if (!(settings_.tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (settings_.max_iterations == 0) throw ConfigError("max_iterations must be positive");
    build_weights();
}

void LaplaceSolver::build_weights() {
    const RectilinearGrid& g = *grid_;
    nx_ = g.nodes(0);
    ny_ = g.nodes(1);
    nz_ = g.nodes(2);
    pad_ = nx_ * ny_ + 1;
    const std::size_t n = g.node_count();
    wx_.assign(n + 2 * pad_, 0.0);
    wy_.assign(n + 2 * pad_, 0.0);
    wz_.assign(n + 2 * pad_, 0.0);
    diag_.assign(n + 2 * pad_, 0.0);

    for (std::size_t k = 0; k + 1 < nz_; ++k) {
        const double hz = g.spacing(2, k);
        for (std::size_t j = 0; j + 1 < ny_; ++j) {
            const double hy = g.spacing(1, j);
            for (std::size_t i = 0; i + 1 < nx_; ++i) {
                const double hx = g.spacing(0, i);
                const double eps = g.cell_epsilon(g.cell_index(i, j, k));
                const double ax = eps * hy * hz / (4.0 * hx);
                const double ay = eps * hx * hz / (4.0 * hy);
                const double az = eps * hx * hy / (4.0 * hz);
                for (std::size_t dk = 0; dk < 2; ++dk) {
                    for (std::size_t dj = 0; dj < 2; ++dj) {
                        wx_[pad_ + g.node_index(i, j + dj, k + dk)] += ax;
                    }
                    for (std::size_t di = 0; di < 2; ++di) {
                        wy_[pad_ + g.node_index(i + di, j, k + dk)] += ay;
                    }
                }
                for (std::size_t dj = 0; dj < 2; ++dj) {
                    for (std::size_t di = 0; di < 2; ++di) {
                        wz_[pad_ + g.node_index(i + di, j + dj, k)] += az;
                    }
                }
            }
        }
    }
    const std::size_t sy = nx_;
    const std::size_t sz = nx_ * ny_;
    for (std::size_t m = pad_; m < pad_ + n; ++m) {
        diag_[m] = wx_[m] + wx_[m - 1] + wy_[m] + wy_[m - sy] + wz_[m] + wz_[m - sz];
    }

    dirichlet_.assign(n, 0);
    const auto& bnd = g.geometry().outer_boundary();
    for (std::size_t k = 0; k < nz_; ++k) {
        for (std::size_t j = 0; j < ny_; ++j) {
            for (std::size_t i = 0; i < nx_; ++i) {
                const std::size_t node = g.node_index(i, j, k);
                bool fixed = g.node_net(node) != RectilinearGrid::kFree;
                const std::array<std::size_t, 3> idx{i, j, k};
                const std::array<std::size_t, 3> last{nx_ - 1, ny_ - 1, nz_ - 1};
                for (int a = 0; a < 3 && !fixed; ++a) {
                    if (idx[a] == 0 && bnd[2 * a] == BoundaryKind::grounded) fixed = true;
                    if (idx[a] == last[a] && bnd[2 * a + 1] == BoundaryKind::grounded) fixed = true;
                }
                dirichlet_[node] = fixed ? 1 : 0;
            }
        }
    }
}

std::vector<double> LaplaceSolver::apply(std::span<const double> potential) const {
    const std::size_t n = grid_->node_count();
    if (potential.size() != n) throw ConfigError("potential size does not match the grid");
    std::vector<double> p(n + 2 * pad_, 0.0);
    std::copy(potential.begin(), potential.end(), p.begin() + pad_);
    const std::size_t sy = nx_;
    const std::size_t sz = nx_ * ny_;
    std::vector<double> out(n);
    for (std::size_t m = pad_; m < pad_ + n; ++m) {
        out[m - pad_] = diag_[m] * p[m] - wx_[m] * p[m + 1] - wx_[m - 1] * p[m - 1] -
                        wy_[m] * p[m + sy] - wy_[m - sy] * p[m - sy] - wz_[m] * p[m + sz] -
                        wz_[m - sz] * p[m - sz];
    }
    return out;
}

std::vector<double> LaplaceSolver::run_cg(std::span<const unsigned char> fixed,
                                          std::span<const double> values, double& residual,
                                          std::size_t& iterations) const {
    const std::size_t n = grid_->node_count();
    const std::size_t total = n + 2 * pad_;
    const std::size_t sy = nx_;
    const std::size_t sz = nx_ * ny_;
    const std::size_t lo = pad_;
    const std::size_t hi = pad_ + n;

    std::vector<double> free(total, 0.0);
    for (std::size_t i = 0; i < n; ++i) free[lo + i] = fixed[i] ? 0.0 : 1.0;

    auto apply_free = [&](const std::vector<double>& p, std::vector<double>& out) {
        for (std::size_t m = lo; m < hi; ++m) {
            out[m] = free[m] * (diag_[m] * p[m] - wx_[m] * p[m + 1] - wx_[m - 1] * p[m - 1] -
                                wy_[m] * p[m + sy] - wy_[m - sy] * p[m - sy] -
                                wz_[m] * p[m + sz] - wz_[m - sz] * p[m - sz]);
        }
    };
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t m = lo; m < hi; ++m) s += a[m] * b[m];
        return s;
    };

    // Line factorisation along z over free nodes; Jacobi when up == 0.
    std::vector<double> up(total, 0.0);
    std::vector<double> cp(total, 0.0);
    std::vector<double> inv_den(total, 0.0);
    const bool line = settings_.preconditioner == Preconditioner::z_line;
    for (std::size_t m = lo; m < hi; ++m) {
        if (line && free[m] != 0.0 && m + sz < hi && free[m + sz] != 0.0) up[m] = wz_[m];
    }
    for (std::size_t m = lo; m < hi; ++m) {
        if (free[m] == 0.0) continue;
        const double den = diag_[m] + up[m - sz] * cp[m - sz];
        inv_den[m] = 1.0 / den;
        cp[m] = -up[m] * inv_den[m];
    }
    auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
        for (std::size_t m = lo; m < hi; ++m) {
            z[m] = (r[m] + up[m - sz] * z[m - sz]) * inv_den[m];
        }
        for (std::size_t m = hi; m-- > lo;) {
            z[m] -= cp[m] * z[m + sz];
        }
    };

    std::vector<double> x(total, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (fixed[i]) x[lo + i] = values[i];
    }
    std::vector<double> r(total, 0.0);
    apply_free(x, r);
    for (std::size_t m = lo; m < hi; ++m) r[m] = -r[m];
    const double bnorm = std::sqrt(dot(r, r));
    iterations = 0;
    residual = 0.0;
    if (bnorm == 0.0) return {x.begin() + lo, x.begin() + hi};

    std::vector<double> z(total, 0.0);
    std::vector<double> p(total, 0.0);
    std::vector<double> ap(total, 0.0);
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    double rel = 1.0;
    while (true) {
        if (iterations >= settings_.max_iterations) throw NoConvergence(iterations, rel);
        apply_free(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) throw NumericalError("conjugate gradient breakdown");
        const double alpha = rz / pap;
        for (std::size_t m = lo; m < hi; ++m) {
            x[m] += alpha * p[m];
            r[m] -= alpha * ap[m];
        }
        ++iterations;
        rel = std::sqrt(dot(r, r)) / bnorm;
        if (rel <= settings_.tolerance) break;
        precondition(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t m = lo; m < hi; ++m) p[m] = z[m] + beta * p[m];
    }
    residual = rel;
    return {x.begin() + lo, x.begin() + hi};
}

std::vector<double> LaplaceSolver::solve_fixed(std::span<const unsigned char> fixed,
                                               std::span<const double> fixed_values,
                                               double* residual, std::size_t* iterations) const {
    const std::size_t n = grid_->node_count();
    if (fixed.size() != n || fixed_values.size() != n) {
        throw ConfigError("fixed-node arrays do not match the grid");
    }
    double res = 0.0;
    std::size_t it = 0;
    auto x = run_cg(fixed, fixed_values, res, it);
    if (residual) *residual = res;
    if (iterations) *iterations = it;
    return x;
}

FieldSolution LaplaceSolver::solve(const DriveVector& drive) const {
    const RectilinearGrid& g = *grid_;
    const std::vector<double> volts = drive.resolve(g.geometry());
    const std::size_t n = g.node_count();
    std::vector<double> values(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int net = g.node_net(i);
        if (net != RectilinearGrid::kFree) values[i] = volts[static_cast<std::size_t>(net)];
    }
    FieldSolution out;
    out.grid = grid_;
    out.drive = drive;
    out.potential = run_cg(dirichlet_, values, out.residual, out.iterations);
    return out;
}

FieldSolution solve(std::shared_ptr<const RectilinearGrid> grid, const DriveVector& drive,
                    double tol, std::size_t max_iter) {
    SolverSettings s;
    s.tolerance = tol;
    s.max_iterations = max_iter;
    return LaplaceSolver(std::move(grid), s).solve(drive);
}

std::vector<double> cell_energies(const FieldSolution& sol) {
    const RectilinearGrid& g = *sol.grid;
    const auto& phi = sol.potential;
    const std::size_t cx = g.cells(0), cy = g.cells(1), cz = g.cells(2);
    std::vector<double> out(g.cell_count(), 0.0);
    for (std::size_t k = 0; k < cz; ++k) {
        const double hz = g.spacing(2, k);
        for (std::size_t j = 0; j < cy; ++j) {
            const double hy = g.spacing(1, j);
            for (std::size_t i = 0; i < cx; ++i) {
                const std::size_t c = g.cell_index(i, j, k);
                if (g.cell_is_conductor(c)) continue;
                const double hx = g.spacing(0, i);
                double v[2][2][2];
                for (int dk = 0; dk < 2; ++dk)
                    for (int dj = 0; dj < 2; ++dj)
                        for (int di = 0; di < 2; ++di)
                            v[dk][dj][di] = phi[g.node_index(i + di, j + dj, k + dk)];
                double sx = 0.0, sy = 0.0, sz = 0.0;
                for (int a = 0; a < 2; ++a) {
                    for (int b = 0; b < 2; ++b) {
                        sx += std::pow(v[a][b][1] - v[a][b][0], 2);
                        sy += std::pow(v[a][1][b] - v[a][0][b], 2);
                        sz += std::pow(v[1][a][b] - v[0][a][b], 2);
                    }
                }
                const double w = sx * hy * hz / hx + sy * hx * hz / hy + sz * hx * hy / hz;
                out[c] = 0.125 * constants::vacuum_permittivity * g.cell_epsilon(c) * w;
            }
        }
    }
    return out;
}

double energy(const FieldSolution& sol) {
    double u = 0.0;
    for (double e : cell_energies(sol)) u += e;
    return u;
}

std::vector<double> net_charges(const FieldSolution& sol) {
    const RectilinearGrid& g = *sol.grid;
    LaplaceSolver op(sol.grid);
    const auto aphi = op.apply(sol.potential);
    std::vector<double> q(g.geometry().net_count(), 0.0);
    for (std::size_t i = 0; i < aphi.size(); ++i) {
        const int net = g.node_net(i);
        if (net != RectilinearGrid::kFree) q[static_cast<std::size_t>(net)] += aphi[i];
    }
    for (double& v : q) v *= constants::vacuum_permittivity;
    return q;
}

double charge_on_net(const FieldSolution& sol, const std::string& net) {
    const auto idx = sol.grid->geometry().find_net(net);
    if (!idx) throw NetNotFound("unknown net '" + net + "'");
    return net_charges(sol)[*idx];
}

FieldSolution superpose(std::span<const FieldSolution> parts, std::span<const double> weights) {
    if (parts.empty() || parts.size() != weights.size()) {
        throw ConfigError("superpose needs one weight per solution");
    }
    FieldSolution out;
    out.grid = parts.front().grid;
    out.potential.assign(parts.front().potential.size(), 0.0);
    std::map<std::string, double> drive;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        if (parts[p].grid != out.grid) throw ConfigError("superposed solutions must share a grid");
        const double w = weights[p];
        for (std::size_t i = 0; i < out.potential.size(); ++i) {
            out.potential[i] += w * parts[p].potential[i];
        }
        for (const auto& [k, v] : parts[p].drive.entries()) drive[k] += w * v;
        out.residual = std::max(out.residual, parts[p].residual);
        out.iterations += parts[p].iterations;
    }
    for (const auto& [k, v] : drive) out.drive.set(k, v);
    return out;
}

PlaneSpec parse_plane(const std::string& text) {
    PlaneSpec p;
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("plane must look like 'y=0'");
    const std::string axis = text.substr(0, eq);
    if (axis == "x") {
        p.axis = 0;
    } else if (axis == "y") {
        p.axis = 1;
    } else if (axis == "z") {
        p.axis = 2;
    } else {
        throw ConfigError("plane axis must be x, y or z");
    }
    std::istringstream in(text.substr(eq + 1));
    if (!(in >> p.position_um) || !in.eof()) throw ConfigError("bad plane position in '" + text + "'");
    return p;
}

double field_magnitude_at(const FieldSolution& sol, const std::array<double, 3>& point_um) {
    const RectilinearGrid& g = *sol.grid;
    std::array<std::size_t, 3> c{};
    std::array<double, 3> t{};
    std::array<double, 3> h{};
    for (int a = 0; a < 3; ++a) {
        const auto& l = g.lines(a);
        const double x = um_to_m(point_um[a]);
        auto it = std::upper_bound(l.begin(), l.end(), x);
        std::size_t idx = it == l.begin() ? 0 : static_cast<std::size_t>(it - l.begin()) - 1;
        idx = std::min(idx, l.size() - 2);
        c[a] = idx;
        h[a] = l[idx + 1] - l[idx];
        t[a] = std::clamp((x - l[idx]) / h[a], 0.0, 1.0);
    }
    if (g.cell_is_conductor(g.cell_index(c[0], c[1], c[2]))) return 0.0;
    double v[2][2][2];
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di)
                v[dk][dj][di] = sol.potential[g.node_index(c[0] + di, c[1] + dj, c[2] + dk)];
    double gx = 0.0, gy = 0.0, gz = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double wa_z = a ? t[2] : 1.0 - t[2];
            const double wb_y = b ? t[1] : 1.0 - t[1];
            const double wb_x = b ? t[0] : 1.0 - t[0];
            const double wa_y = a ? t[1] : 1.0 - t[1];
            gx += wa_z * wb_y * (v[a][b][1] - v[a][b][0]);
            gy += wa_z * wb_x * (v[a][1][b] - v[a][0][b]);
            gz += wa_y * wb_x * (v[1][a][b] - v[0][a][b]);
        }
    }
    gx /= h[0];
    gy /= h[1];
    gz /= h[2];
    return std::sqrt(gx * gx + gy * gy + gz * gz);
}

FieldSlice field_slice(const FieldSolution& sol, const PlaneSpec& plane) {
    const RectilinearGrid& g = *sol.grid;
    const Box& dom = g.geometry().domain();
    if (plane.axis < 0 || plane.axis > 2) throw ConfigError("plane axis out of range");
    const double tol = g.geometry().length_tolerance();
    if (plane.position_um < dom.lo[plane.axis] - tol || plane.position_um > dom.hi[plane.axis] + tol) {
        throw PlaneOutsideDomain("plane lies outside the domain");
    }
    if (plane.samples_u < 2 || plane.samples_v < 2) throw ConfigError("slice needs >= 2 samples per axis");
    FieldSlice s;
    s.plane = plane;
    s.axis_u = plane.axis == 0 ? 1 : 0;
    s.axis_v = plane.axis == 2 ? 1 : 2;
    auto sample = [](double lo, double hi, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        return v;
    };
    s.u_um = sample(dom.lo[s.axis_u], dom.hi[s.axis_u], plane.samples_u);
    s.v_um = sample(dom.lo[s.axis_v], dom.hi[s.axis_v], plane.samples_v);
    s.magnitude.resize(plane.samples_u * plane.samples_v);
    std::array<double, 3> p{};
    p[plane.axis] = plane.position_um;
    for (std::size_t iv = 0; iv < s.v_um.size(); ++iv) {
        for (std::size_t iu = 0; iu < s.u_um.size(); ++iu) {
            p[s.axis_u] = s.u_um[iu];
            p[s.axis_v] = s.v_um[iv];
            s.magnitude[iv * s.u_um.size() + iu] = field_magnitude_at(sol, p);
        }
    }
    return s;
}

}  // namespace flipmon
