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
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipmon/solver.hpp"
#include "flipmon/surfaces.hpp"

namespace flipmon {

enum class RegionId {
    Sub_t,
    Sub_b,
    Vacuum,
    VacuumGapOnly,
    MA_t,
    MS_t,
    SA_t,
    MA_b,
    MS_b,
    SA_b,
    BumpSurface,
};

inline constexpr std::array<RegionId, 11> kAllRegions{
    RegionId::Sub_t, RegionId::Sub_b, RegionId::Vacuum, RegionId::VacuumGapOnly,
    RegionId::MA_t,  RegionId::MS_t,  RegionId::SA_t,   RegionId::MA_b,
    RegionId::MS_b,  RegionId::SA_b,  RegionId::BumpSurface};

std::string_view to_string(RegionId r);
/// Accepts the canonical names plus the SM_t / SM_b spellings.
RegionId parse_region(std::string_view s);
bool is_bulk(RegionId r);
/// Interface class and side of an interface region.
std::pair<SurfaceClass, ChipSide> interface_of(RegionId r);

/// Per-cell membership of a bulk region.
std::vector<unsigned char> region_mask(const RectilinearGrid& grid, RegionId region);

/// Volume between every xy-overlapping, z-separated pair of pad_top and
/// pad_bottom conductors (um).
std::vector<Box> inter_pad_gaps(const ValidatedGeometry& geometry, const std::vector<Box>& boxes);

/// Energy fraction of a bulk region. Throws RegionEmpty.
double bulk_participation(const FieldSolution& solution, RegionId region);
double bulk_participation(const RectilinearGrid& grid, std::span<const double> cell_energy,
                          double u_tot, RegionId region);

/// Thin-layer participation of metal faces (MA, MS or bump):
/// t * sum 1/2 eps0 (eps_adj^2 / eps_layer) E_perp^2 dA / U, with E_perp the
/// mean normal gradient of the adjacent cell. Throws EmptySurfaceSet.
double metal_interface_participation(const FieldSolution& solution,
                                     std::span<const SurfaceFace> faces, double thickness_m,
                                     double eps_layer, double u_tot);

/// Thin-layer participation of substrate-vacuum faces:
/// t * sum 1/2 eps0 [eps_layer E_par^2 + (eps_sub^2 / eps_layer) E_perp,sub^2] dA / U.
/// Throws EmptySurfaceSet.
double sa_interface_participation(const FieldSolution& solution,
                                  std::span<const SurfaceFace> faces, double thickness_m,
                                  double eps_layer, double u_tot);

inline constexpr std::string_view kSaConvention = "substrate-side E_perp (D continuity)";

struct ParticipationReport {
    std::map<RegionId, double> p;
    /// Absolute error estimate per region from a coarser solve; absent when
    /// no estimate was made.
    std::map<RegionId, double> abs_error_est;
    double u_tot = 0.0;
    double bulk_sum = 0.0;
    /// Interface regions whose face set was empty or class disabled.
    std::vector<RegionId> empty_regions;
    nlohmann::json metadata;

    double operator[](RegionId r) const { return p.at(r); }
};

/// Every region of kAllRegions. Interfaces that are disabled or have no
/// faces are reported as 0 and listed in empty_regions.
ParticipationReport full_report(const FieldSolution& solution, const SurfaceSet& surfaces);
ParticipationReport full_report(const FieldSolution& solution);

/// Fills abs_error_est with |fine - coarse| per region.
void attach_error_estimate(ParticipationReport& fine, const ParticipationReport& coarse);

/// CSV `region,p,abs_error_est`.
void write_participation_csv(std::ostream& out, const ParticipationReport& report);
/// Text block laid out like the usual published participation table.
void write_participation_table(std::ostream& out, const ParticipationReport& report);
nlohmann::json to_json(const ParticipationReport& report);
/// Inverse of to_json. Throws ConfigError.
ParticipationReport report_from_json(const nlohmann::json& j);

}  // namespace flipmon
