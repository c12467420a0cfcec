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

#include "flipmon/transmon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <lapacke.h>

#include "flipmon/error.hpp"
#include "flipmon/units.hpp"

namespace flipmon {

namespace {

constexpr double kEdgePopulation = 1e-12;

struct Diagonalization {
    std::vector<double> values;  // lowest `levels`, ascending
    bool edges_ok = false;
};

Diagonalization diagonalize(const TransmonParams& p, std::size_t n_cut, std::size_t levels) {
    const std::size_t dim = 2 * n_cut + 1;
    levels = std::min(levels, dim);
    const double n0 = std::round(p.n_g);
    std::vector<double> diag(dim);
    std::vector<double> sub(dim, -0.5 * p.ej_ghz);
    for (std::size_t i = 0; i < dim; ++i) {
        const double n = n0 + static_cast<double>(i) - static_cast<double>(n_cut);
        diag[i] = 4.0 * p.ec_ghz * (n - p.n_g) * (n - p.n_g);
    }
    const auto n = static_cast<lapack_int>(dim);
    const auto iu = static_cast<lapack_int>(levels);
    lapack_int found = 0;
    std::vector<double> w(dim);
    std::vector<double> z(dim * levels);
    std::vector<lapack_int> support(2 * levels);
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), sub.data(), 0.0, 0.0,
                                           1, iu, 0.0, &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != iu) throw NumericalError("tridiagonal eigensolver failed");
    Diagonalization d;
    d.values.assign(w.begin(), w.begin() + iu);
    d.edges_ok = true;
    for (std::size_t k = 0; k < levels; ++k) {
        const double first = z[k * dim];
        const double last = z[k * dim + dim - 1];
        if (first * first > kEdgePopulation || last * last > kEdgePopulation) d.edges_ok = false;
    }
    return d;
}

}  // namespace

TransmonSpectrum spectrum(const TransmonParams& p, std::size_t levels) {
    if (!(p.ec_ghz > 0.0) || !std::isfinite(p.ec_ghz)) throw NonPositive("E_C must be positive");
    if (!(p.ej_ghz >= 0.0) || !std::isfinite(p.ej_ghz)) throw NonPositive("E_J must be non-negative");
    if (!std::isfinite(p.n_g)) throw ConfigError("offset charge must be finite");
    levels = std::max<std::size_t>(levels, 3);
    std::size_t n_cut = std::max<std::size_t>(p.cutoff, 2);
    while (true) {
        if (n_cut > kMaxChargeCutoff) {
            throw CutoffTooSmall("charge cutoff exceeded " + std::to_string(kMaxChargeCutoff));
        }
        const Diagonalization d = diagonalize(p, n_cut, levels);
        if (d.edges_ok) {
            TransmonSpectrum s;
            s.cutoff_used = n_cut;
            for (double e : d.values) s.levels_ghz.push_back(e - d.values.front());
            s.f01 = s.levels_ghz[1];
            s.f12 = s.levels_ghz[2] - s.levels_ghz[1];
            s.eta = s.f01 - s.f12;
            return s;
        }
        n_cut += 10;
    }
}

double charge_dispersion(const TransmonParams& p) {
    TransmonParams a = p;
    a.n_g = 0.0;
    TransmonParams b = p;
    b.n_g = 0.5;
    return std::abs(spectrum(b).f01 - spectrum(a).f01);
}

EjEcFit fit_ej_ec(double f01, double eta) {
    if (!(f01 > 0.0) || !(eta > 0.0) || !std::isfinite(f01) || !std::isfinite(eta)) {
        throw NoRoot("fit needs 0 < eta < f01");
    }
    if (eta >= f01) throw NoRoot("anharmonicity must be below f01");

    auto residual = [&](double ej, double ec) {
        const TransmonSpectrum s = spectrum({ej, ec, 0.0, defaults::charge_cutoff});
        return std::array<double, 2>{s.f01 - f01, s.eta - eta};
    };
    auto norm = [](const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); };

    double ec = eta;
    double ej = (f01 + ec) * (f01 + ec) / (8.0 * ec);
    auto r = residual(ej, ec);
    EjEcFit fit;
    for (std::size_t it = 0; it < 100 && norm(r) > 1e-10; ++it) {
        fit.iterations = it + 1;
        const double hj = 1e-6 * ej;
        const double hc = 1e-6 * ec;
        const auto rj = residual(ej + hj, ec);
        const auto rc = residual(ej, ec + hc);
        const double a = (rj[0] - r[0]) / hj, b = (rc[0] - r[0]) / hc;
        const double c = (rj[1] - r[1]) / hj, d = (rc[1] - r[1]) / hc;
        const double det = a * d - b * c;
        if (det == 0.0 || !std::isfinite(det)) throw NoRoot("singular Jacobian in (E_J, E_C) fit");
        const double dj = -(d * r[0] - b * r[1]) / det;
        const double dc = -(-c * r[0] + a * r[1]) / det;
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            const double ej_new = ej + lambda * dj;
            const double ec_new = ec + lambda * dc;
            if (!(ej_new > 0.0) || !(ec_new > 0.0)) continue;
            const auto r_new = residual(ej_new, ec_new);
            if (norm(r_new) < norm(r)) {
                ej = ej_new;
                ec = ec_new;
                r = r_new;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        if (std::abs(lambda * dj) < 1e-12 && std::abs(lambda * dc) < 1e-12) break;
    }
    fit.ej_ghz = ej;
    fit.ec_ghz = ec;
    fit.residual_ghz = norm(r);
    if (fit.residual_ghz > 1e-6) throw NoRoot("no (E_J, E_C) reproduces the inputs");
    if (ej / ec < 5.0) throw Ambiguous("fit landed at E_J/E_C < 5");
    return fit;
}

double c_sigma(const CapacitanceMatrix& c, const std::pair<std::string, std::string>& pads,
               double c_j) {
    std::size_t a = 0, b = 0;
    try {
        a = c.index_of(pads.first);
        b = c.index_of(pads.second);
    } catch (const NetNotFound& e) {
        throw MissingNet(e.what());
    }
    if (a == b) throw MissingNet("the two pads must be distinct nets");
    const double c12 = -c(a, b);
    const double cag = c(a, a) + c(a, b);
    const double cbg = c(b, b) + c(b, a);
    const double series = cag + cbg > 0.0 ? cag * cbg / (cag + cbg) : 0.0;
    const double total = c_j + c12 + series;
    if (!(total > 0.0)) throw NonPositiveCSigma("C_sigma is not positive");
    return total;
}

double ec_ghz_from_farads(double c) {
    if (!(c > 0.0)) throw NonPositiveCSigma("capacitance must be positive");
    const double e = constants::elementary_charge;
    return joules_to_ghz(e * e / (2.0 * c));
}

double ec_from_capacitance(const CapacitanceMatrix& c, const std::pair<std::string, std::string>& pads,
                           double c_j) {
    return ec_ghz_from_farads(c_sigma(c, pads, c_j));
}

double ej_from_ic(double ic) {
    if (!(ic > 0.0) || !std::isfinite(ic)) throw NonPositive("critical current must be positive");
    return joules_to_ghz(constants::hbar * ic / (2.0 * constants::elementary_charge));
}

bool ic_out_of_regime(double ic) { return ic > defaults::ic_sanity_bound; }

}  // namespace flipmon
