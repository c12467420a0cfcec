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
#include <string>
#include <utility>
#include <vector>

#include "flipmon/capacitance.hpp"
#include "flipmon/defaults.hpp"

namespace flipmon {

/// Energies in GHz (E / h) throughout this module unless noted.
struct TransmonParams {
    double ej_ghz = 0.0;
    double ec_ghz = 0.0;
    double n_g = 0.0;
    std::size_t cutoff = defaults::charge_cutoff;
};

struct TransmonSpectrum {
    std::vector<double> levels_ghz;  // f_k - f_0, k = 0..K
    double f01 = 0.0;
    double f12 = 0.0;
    double eta = 0.0;  // f01 - f12, positive in the transmon regime
    std::size_t cutoff_used = 0;
};

/// Cutoff hard cap for the automatic growth in spectrum().
inline constexpr std::size_t kMaxChargeCutoff = 500;

/// Eigenvalues of 4 E_C (n - n_g)^2 - (E_J / 2) sum (|n><n+1| + h.c.) in a
/// charge basis of 2N+1 states centred on round(n_g). N grows until the
/// populations of the outermost states in the lowest `levels` eigenvectors
/// stay below 1e-12. Throws CutoffTooSmall past kMaxChargeCutoff and
/// NonPositive for E_C <= 0 or E_J < 0.
TransmonSpectrum spectrum(const TransmonParams& params, std::size_t levels = 4);

/// |f01(n_g = 1/2) - f01(n_g = 0)| in GHz.
double charge_dispersion(const TransmonParams& params);

struct EjEcFit {
    double ej_ghz = 0.0;
    double ec_ghz = 0.0;
    std::size_t iterations = 0;
    double residual_ghz = 0.0;  // max |model - measured| over (f01, eta)
};

/// Finds (E_J, E_C) reproducing f01 and eta (GHz) by damped Newton with a
/// finite-difference Jacobian. Throws NoRoot when eta >= f01 or the solve
/// fails, Ambiguous when the solution has E_J / E_C < 5.
EjEcFit fit_ej_ec(double f01_ghz, double eta_ghz);

/// E_C = e^2 / (2 C_sigma) in GHz, with C_sigma = C_J + C_12 +
/// C_1g C_2g / (C_1g + C_2g). C_12 is minus the pad-pad entry; C_ig is
/// everything pad i couples to other than its partner (the row sum of the
/// 2x2 pad block). Throws MissingNet or NonPositiveCSigma.
double ec_from_capacitance(const CapacitanceMatrix& c, const std::pair<std::string, std::string>& pads,
                           double c_j = defaults::junction_capacitance);
double c_sigma(const CapacitanceMatrix& c, const std::pair<std::string, std::string>& pads,
               double c_j = defaults::junction_capacitance);

/// E_J / h in GHz from the critical current (A). Throws NonPositive.
double ej_from_ic(double ic_amperes);
/// True when I_c exceeds the junction-scale sanity bound.
bool ic_out_of_regime(double ic_amperes);

/// E_C / h in GHz from a capacitance in farads.
double ec_ghz_from_farads(double c);

}  // namespace flipmon
