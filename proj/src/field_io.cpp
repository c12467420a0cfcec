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

#include "flipmon/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "flipmon/error.hpp"
#include "flipmon/units.hpp"

namespace flipmon {

namespace {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
    return std::filesystem::path(stem.string() + ext);
}

}  // namespace

void write_field_dump(const FieldSolution& s, const std::filesystem::path& stem) {
    const RectilinearGrid& g = *s.grid;
    nlohmann::json header;
    header["format"] = "float64-le";
    header["order"] = "x fastest, then y, then z";
    header["dims"] = {g.nodes(0), g.nodes(1), g.nodes(2)};
    for (int a = 0; a < 3; ++a) {
        std::vector<double> um;
        for (double x : g.lines(a)) um.push_back(m_to_um(x));
        header["lines_um"][std::string(1, "xyz"[a])] = um;
    }
    header["drive"] = s.drive.entries();
    header["residual"] = s.residual;
    header["iterations"] = s.iterations;
    header["data"] = with_ext(stem, ".bin").filename().string();

    std::ofstream h(with_ext(stem, ".json"));
    if (!h) throw IoError("cannot write " + with_ext(stem, ".json").string());
    h << header.dump(2) << '\n';
    std::ofstream b(with_ext(stem, ".bin"), std::ios::binary);
    if (!b) throw IoError("cannot write " + with_ext(stem, ".bin").string());
    b.write(reinterpret_cast<const char*>(s.potential.data()),
            static_cast<std::streamsize>(s.potential.size() * sizeof(double)));
    if (!b || !h) throw IoError("short write for field dump " + stem.string());
}

FieldDump read_field_dump(const std::filesystem::path& stem) {
    std::ifstream h(with_ext(stem, ".json"));
    if (!h) throw IoError("cannot open " + with_ext(stem, ".json").string());
    nlohmann::json header;
    try {
        h >> header;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad field dump header: " + std::string(e.what()));
    }
    FieldDump d;
    std::size_t n = 1;
    for (int a = 0; a < 3; ++a) {
        d.lines_um[a] = header.at("lines_um").at(std::string(1, "xyz"[a])).get<std::vector<double>>();
        n *= d.lines_um[a].size();
    }
    d.potential.resize(n);
    std::ifstream b(with_ext(stem, ".bin"), std::ios::binary);
    if (!b) throw IoError("cannot open " + with_ext(stem, ".bin").string());
    b.read(reinterpret_cast<char*>(d.potential.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (b.gcount() != static_cast<std::streamsize>(n * sizeof(double))) {
        throw IoError("field dump data is truncated");
    }
    return d;
}

void write_slice_csv(std::ostream& out, const FieldSlice& s) {
    const char names[] = "xyz";
    out << names[s.axis_u] << "_um," << names[s.axis_v] << "_um,E_V_per_m\n";
    char line[128];
    for (std::size_t iv = 0; iv < s.v_um.size(); ++iv) {
        for (std::size_t iu = 0; iu < s.u_um.size(); ++iu) {
            std::snprintf(line, sizeof line, "%.6f,%.6f,%.6e\n", s.u_um[iu], s.v_um[iv], s.at(iu, iv));
            out << line;
        }
    }
}

namespace {

// Viridis control points.
constexpr std::array<std::array<double, 3>, 9> kRamp{{{68, 1, 84},
                                                      {72, 40, 120},
                                                      {62, 73, 137},
                                                      {49, 104, 142},
                                                      {38, 130, 142},
                                                      {31, 158, 137},
                                                      {53, 183, 121},
                                                      {109, 205, 89},
                                                      {253, 231, 37}}};

std::string ramp_color(double t) {
    t = std::clamp(t, 0.0, 1.0) * (kRamp.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), kRamp.size() - 2);
    const double f = t - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(kRamp[i][0] + f * (kRamp[i + 1][0] - kRamp[i][0]))),
                  static_cast<int>(std::lround(kRamp[i][1] + f * (kRamp[i + 1][1] - kRamp[i][1]))),
                  static_cast<int>(std::lround(kRamp[i][2] + f * (kRamp[i + 1][2] - kRamp[i][2]))));
    return buf;
}

}  // namespace

void write_slice_svg(std::ostream& out, const FieldSlice& s) {
    constexpr int kLevels = 64;
    constexpr double kDecades = 4.0;
    const std::size_t nu = s.u_um.size();
    const std::size_t nv = s.v_um.size();
    const double vmax = *std::max_element(s.magnitude.begin(), s.magnitude.end());
    const double vmin = *std::min_element(s.magnitude.begin(), s.magnitude.end());
    const double top = vmax > 0.0 ? std::log10(vmax) : 0.0;

    auto level = [&](double e) {
        if (!(e > 0.0) || !(vmax > 0.0)) return 0;
        const double t = (std::log10(e) - (top - kDecades)) / kDecades;
        return std::clamp(static_cast<int>(t * (kLevels - 1) + 0.5), 0, kLevels - 1);
    };

    const int cell = std::max(1, static_cast<int>(600 / std::max(nu, nv)));
    const int width = static_cast<int>(nu) * cell;
    const int height = static_cast<int>(nv) * cell;
    const int margin = 40;
    const char names[] = "xyz";
    char buf[256];

    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "font-family=\"sans-serif\" font-size=\"12\">\n",
                  width + 2 * margin + 60, height + 2 * margin);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"20\">|E| on %c = %g um (log scale, %g decades)</text>\n",
                  margin, names[s.plane.axis], s.plane.position_um, kDecades);
    out << buf;
    out << "<g shape-rendering=\"crispEdges\">\n";
    for (std::size_t iv = 0; iv < nv; ++iv) {
        const int y = margin + height - static_cast<int>(iv + 1) * cell;
        std::size_t iu = 0;
        while (iu < nu) {
            const int lv = level(s.at(iu, iv));
            std::size_t run = iu + 1;
            while (run < nu && level(s.at(run, iv)) == lv) ++run;
            std::snprintf(buf, sizeof buf, "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\"/>\n",
                          margin + static_cast<int>(iu) * cell, y, static_cast<int>(run - iu) * cell, cell,
                          ramp_color(static_cast<double>(lv) / (kLevels - 1)).c_str());
            out << buf;
            iu = run;
        }
    }
    out << "</g>\n";
    for (int k = 0; k < 32; ++k) {
        const int y = margin + height - (k + 1) * height / 32;
        std::snprintf(buf, sizeof buf, "<rect x=\"%d\" y=\"%d\" width=\"16\" height=\"%d\" fill=\"%s\"/>\n",
                      margin + width + 12, y, height / 32 + 1, ramp_color(k / 31.0).c_str());
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\">max %.3e V/m</text>\n", margin,
                  margin + height + 16, vmax);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\">min %.3e V/m</text>\n", margin,
                  margin + height + 32, vmin);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\">%c: %g to %g um, %c: %g to %g um</text>\n",
                  margin + width / 2, margin + height + 16, names[s.axis_u], s.u_um.front(),
                  s.u_um.back(), names[s.axis_v], s.v_um.front(), s.v_um.back());
    out << buf;
    out << "</svg>\n";
}

}  // namespace flipmon
