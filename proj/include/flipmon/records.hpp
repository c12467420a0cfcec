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

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace flipmon {

/// One measured qubit. Frequencies in GHz, eta and chi in MHz, times in us.
struct MeasuredQubitRecord {
    std::string label;
    std::optional<double> f_r_ghz;
    std::optional<double> f_q_ghz;
    std::optional<double> eta_mhz;
    std::optional<double> chi_mhz;
    std::optional<double> t1_us;
    std::optional<double> t2s_us;
    std::optional<double> t2e_us;
};

inline constexpr const char* kRecordHeader =
    "qubit,f_r_GHz,f_q_GHz,eta_MHz,chi_MHz,T1_us,T2s_us,T2e_us";

/// Parses the record CSV. Blank and "---" cells are missing values.
/// Throws ConfigError naming the 1-based data row for malformed rows,
/// non-positive values, or eta above f_q.
std::vector<MeasuredQubitRecord> read_records(std::istream& in);
/// Throws IoError if the file cannot be opened.
std::vector<MeasuredQubitRecord> load_records(const std::filesystem::path& path);

/// Formats an optional value with %.10g, empty when absent.
std::string format_optional(const std::optional<double>& v);

/// The record as CSV cells in kRecordHeader order.
std::string record_cells(const MeasuredQubitRecord& r);

}  // namespace flipmon
