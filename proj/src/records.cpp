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

#include "flipmon/records.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flipmon/error.hpp"

namespace flipmon {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::optional<double> parse_cell(const std::string& cell, std::size_t row, const char* column) {
    if (cell.empty() || cell == "---") return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ConfigError("row " + std::to_string(row) + ": column " + column + " is not a number ('" +
                          cell + "')");
    }
    if (!(v > 0.0) && std::string(column) != "chi_MHz") {
        throw ConfigError("row " + std::to_string(row) + ": column " + column + " must be positive");
    }
    return v;
}

}  // namespace

std::vector<MeasuredQubitRecord> read_records(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("record file is empty");
    const auto header = split(trim(line));
    const auto expected = split(kRecordHeader);
    if (header != expected) {
        throw ConfigError(std::string("record header must be '") + kRecordHeader + "'");
    }
    std::vector<MeasuredQubitRecord> out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split(trim(line));
        if (cells.size() != expected.size()) {
            throw ConfigError("row " + std::to_string(row) + ": expected " +
                              std::to_string(expected.size()) + " cells, found " +
                              std::to_string(cells.size()));
        }
        MeasuredQubitRecord r;
        r.label = cells[0];
        if (r.label.empty()) throw ConfigError("row " + std::to_string(row) + ": missing qubit label");
        r.f_r_ghz = parse_cell(cells[1], row, "f_r_GHz");
        r.f_q_ghz = parse_cell(cells[2], row, "f_q_GHz");
        r.eta_mhz = parse_cell(cells[3], row, "eta_MHz");
        r.chi_mhz = parse_cell(cells[4], row, "chi_MHz");
        r.t1_us = parse_cell(cells[5], row, "T1_us");
        r.t2s_us = parse_cell(cells[6], row, "T2s_us");
        r.t2e_us = parse_cell(cells[7], row, "T2e_us");
        if (r.eta_mhz && r.f_q_ghz && *r.eta_mhz * 1e-3 >= *r.f_q_ghz) {
            throw ConfigError("row " + std::to_string(row) + " (" + r.label +
                              "): anharmonicity exceeds the qubit frequency");
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<MeasuredQubitRecord> load_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open record file " + path.string());
    return read_records(in);
}

std::string format_optional(const std::optional<double>& v) {
    if (!v) return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

std::string record_cells(const MeasuredQubitRecord& r) {
    return r.label + ',' + format_optional(r.f_r_ghz) + ',' + format_optional(r.f_q_ghz) + ',' +
           format_optional(r.eta_mhz) + ',' + format_optional(r.chi_mhz) + ',' +
           format_optional(r.t1_us) + ',' + format_optional(r.t2s_us) + ',' +
           format_optional(r.t2e_us);
}

}  // namespace flipmon
