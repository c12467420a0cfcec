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

#include "flipmon/geometry_io.hpp"

#include <fstream>
#include <sstream>

#include "flipmon/error.hpp"

namespace flipmon {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 6> kFaceNames{"-x", "+x", "-y", "+y", "-z", "+z"};

Box parse_box(const json& j, const std::string& what) {
    if (j.is_array()) {
        if (j.size() != 6) {
            throw GeometryError(what + ": box needs [x0,x1,y0,y1,z0,z1]");
        }
        return Box::from_extents(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                                 j[3].get<double>(), j[4].get<double>(), j[5].get<double>());
    }
    if (j.is_object()) {
        Box b;
        const char* axes[3] = {"x", "y", "z"};
        for (int a = 0; a < 3; ++a) {
            const json& r = j.at(axes[a]);
            if (!r.is_array() || r.size() != 2) {
                throw GeometryError(what + ": axis range must be [lo, hi]");
            }
            b.lo[a] = r[0].get<double>();
            b.hi[a] = r[1].get<double>();
        }
        return b;
    }
    throw GeometryError(what + ": box must be an array or an object");
}

json box_to_json(const Box& b) {
    return json::array({b.lo[0], b.hi[0], b.lo[1], b.hi[1], b.lo[2], b.hi[2]});
}

InterfaceClass parse_class(const std::string& s) {
    if (s == "MA") return InterfaceClass::MA;
    if (s == "MS" || s == "SM") return InterfaceClass::MS;
    if (s == "SA") return InterfaceClass::SA;
    throw GeometryError("unknown interface class '" + s + "'");
}

}  // namespace

DeviceGeometry geometry_from_json(const json& doc) {
    try {
        DeviceGeometry g;
        g.domain = parse_box(doc.at("domain"), "domain");
        for (const json& m : doc.value("materials", json::array())) {
            Material mat;
            mat.name = m.at("name").get<std::string>();
            mat.kind = parse_material_kind(m.at("kind").get<std::string>());
            mat.epsilon_r = m.value("epsilon_r", 1.0);
            g.materials.push_back(std::move(mat));
        }
        for (const json& n : doc.value("nets", json::array())) {
            g.nets.push_back(Net{n.at("name").get<std::string>(),
                                 parse_net_role(n.value("role", std::string("other")))});
        }
        for (const json& s : doc.value("solids", json::array())) {
            Solid solid;
            solid.name = s.value("name", std::string());
            solid.bounds = parse_box(s.at("box"), "solid '" + solid.name + "'");
            solid.material = s.at("material").get<std::string>();
            if (s.contains("net") && !s.at("net").is_null()) {
                solid.net = s.at("net").get<std::string>();
            }
            solid.label = s.value("label", std::string());
            g.solids.push_back(std::move(solid));
        }
        if (doc.contains("interface")) {
            const json& in = doc.at("interface");
            g.interface_spec.thickness_m =
                in.value("thickness_nm", defaults::interface_thickness_nm) * 1e-9;
            g.interface_spec.epsilon_layer = in.value("epsilon", defaults::interface_epsilon);
            if (!(g.interface_spec.thickness_m > 0.0)) {
                throw GeometryError("interface thickness must be positive");
            }
            if (!(g.interface_spec.epsilon_layer >= 1.0)) {
                throw GeometryError("interface epsilon must be >= 1");
            }
            if (in.contains("classes")) {
                const json& cls = in.at("classes");
                const char* sides[2] = {"top", "bottom"};
                for (int s = 0; s < 2; ++s) {
                    if (!cls.contains(sides[s])) continue;
                    g.interface_spec.enabled[s] = {false, false, false};
                    for (const json& c : cls.at(sides[s])) {
                        g.interface_spec.enabled[s][static_cast<int>(
                            parse_class(c.get<std::string>()))] = true;
                    }
                }
            }
        }
        if (doc.contains("boundary")) {
            const json& b = doc.at("boundary");
            if (b.is_string()) {
                g.outer_boundary = all_faces(parse_boundary_kind(b.get<std::string>()));
            } else {
                for (std::size_t f = 0; f < 6; ++f) {
                    if (b.contains(kFaceNames[f])) {
                        g.outer_boundary[f] =
                            parse_boundary_kind(b.at(kFaceNames[f]).get<std::string>());
                    }
                }
            }
        }
        if (doc.contains("chip_split_z_um") && !doc.at("chip_split_z_um").is_null()) {
            g.chip_split_z = doc.at("chip_split_z_um").get<double>();
        }
        return g;
    } catch (const json::exception& e) {
        throw GeometryError(std::string("malformed geometry document: ") + e.what());
    }
}

json geometry_to_json(const DeviceGeometry& g) {
    json doc;
    doc["domain"] = box_to_json(g.domain);
    doc["materials"] = json::array();
    for (const Material& m : g.materials) {
        doc["materials"].push_back(
            {{"name", m.name}, {"kind", to_string(m.kind)}, {"epsilon_r", m.epsilon_r}});
    }
    doc["nets"] = json::array();
    for (const Net& n : g.nets) {
        doc["nets"].push_back({{"name", n.name}, {"role", to_string(n.role)}});
    }
    doc["solids"] = json::array();
    for (const Solid& s : g.solids) {
        json js{{"name", s.name}, {"material", s.material}, {"box", box_to_json(s.bounds)}};
        if (s.net) js["net"] = *s.net;
        if (!s.label.empty()) js["label"] = s.label;
        doc["solids"].push_back(std::move(js));
    }
    json classes;
    const char* sides[2] = {"top", "bottom"};
    for (int s = 0; s < 2; ++s) {
        classes[sides[s]] = json::array();
        for (int c = 0; c < 3; ++c) {
            if (g.interface_spec.enabled[s][c]) {
                classes[sides[s]].push_back(to_string(static_cast<InterfaceClass>(c)));
            }
        }
    }
    doc["interface"] = {{"thickness_nm", g.interface_spec.thickness_m / 1e-9},
                        {"epsilon", g.interface_spec.epsilon_layer},
                        {"classes", classes}};
    json boundary;
    for (std::size_t f = 0; f < 6; ++f) {
        boundary[kFaceNames[f]] = to_string(g.outer_boundary[f]);
    }
    doc["boundary"] = boundary;
    if (g.chip_split_z) doc["chip_split_z_um"] = *g.chip_split_z;
    return doc;
}

DeviceGeometry load_geometry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open geometry file '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw GeometryError("geometry file '" + path.string() + "' is not valid JSON: " +
                            e.what());
    }
    return geometry_from_json(doc);
}

void save_geometry(const DeviceGeometry& geometry, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write geometry file '" + path.string() + "'");
    }
    out << geometry_to_json(geometry).dump(2) << '\n';
}

}  // namespace flipmon
