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


#include "flipmon/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <lapacke.h>
#include <nlohmann/json.hpp>
#include <openssl/crypto.h>
#include <openssl/evp.h>

#include "flipmon/analysis.hpp"
#include "flipmon/error.hpp"
#include "flipmon/field_io.hpp"
#include "flipmon/geometry_io.hpp"
#include "flipmon/loss.hpp"
#include "flipmon/records.hpp"
#include "flipmon/templates.hpp"
#include "flipmon/version.hpp"

namespace flipmon::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string s;
    s.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        s.push_back(hex[md[i] >> 4]);
        s.push_back(hex[md[i] & 0xf]);
    }
    return s;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const json::exception*>(&e)) return kExitConfig;
    return kExitNumerical;
}

namespace {

/// Failure of one fit row or sweep point, tagged with its exit code.
class CodedError : public std::runtime_error {
  public:
    CodedError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json_file(const fs::path& p) {
    try {
        return json::parse(read_file(p));
    } catch (const json::parse_error& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

void require_exists(const fs::path& p, const char* what) {
    if (!fs::is_regular_file(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::pair<std::string, double> parse_assignment(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected name=value, got '" + s + "'");
    const std::string value = s.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size() || value.empty() || !std::isfinite(v)) {
        throw ConfigError("bad value in '" + s + "'");
    }
    return {s.substr(0, eq), v};
}

struct RunConfig {
    std::optional<fs::path> geometry;
    std::string template_name;
    std::vector<std::pair<std::string, double>> params;
    MeshPolicy mesh;
    double mesh_scale = 1.0;
    SolverSettings solver;
    std::optional<double> interface_thickness_nm;
    std::optional<double> interface_epsilon;
    fs::path out_dir = "flipmon_out";
    std::size_t jobs = 1;
    bool deterministic = false;
    bool force = false;
    double c_j = defaults::junction_capacitance;

    MeshPolicy effective_mesh() const {
        MeshPolicy m = mesh;
        for (int a = 0; a < 3; ++a) {
            m.min_cell[a] *= mesh_scale;
            m.max_cell[a] *= mesh_scale;
        }
        return m;
    }

    AnalysisSettings analysis() const {
        AnalysisSettings s;
        s.mesh = effective_mesh();
        s.solver = solver;
        s.jobs = jobs;
        s.c_j = c_j;
        return s;
    }
};

Preconditioner parse_preconditioner(const std::string& s) {
    if (s == "z_line") return Preconditioner::z_line;
    if (s == "jacobi") return Preconditioner::jacobi;
    throw ConfigError("unknown preconditioner '" + s + "'");
}

const char* to_string(Preconditioner p) {
    return p == Preconditioner::z_line ? "z_line" : "jacobi";
}

void apply_config_file(RunConfig& c, const fs::path& path) {
    const json j = read_json_file(path);
    if (!j.is_object()) throw ConfigError(path.string() + ": run configuration must be an object");
    const fs::path base = path.parent_path();
    for (const auto& [key, v] : j.items()) {
        if (key == "geometry") {
            const fs::path g = v.get<std::string>();
            c.geometry = g.is_absolute() ? g : base / g;
        } else if (key == "template") {
            c.template_name = v.get<std::string>();
        } else if (key == "params") {
            for (const auto& [name, value] : v.items()) c.params.emplace_back(name, value.get<double>());
        } else if (key == "mesh") {
            c.mesh = mesh_policy_from_json(v, c.mesh);
        } else if (key == "mesh_scale") {
            c.mesh_scale = v.get<double>();
        } else if (key == "solver") {
            c.solver.tolerance = v.value("tolerance", c.solver.tolerance);
            c.solver.max_iterations = v.value("max_iterations", c.solver.max_iterations);
            if (v.contains("preconditioner")) {
                c.solver.preconditioner = parse_preconditioner(v.at("preconditioner").get<std::string>());
            }
        } else if (key == "interface") {
            if (v.contains("thickness_nm")) c.interface_thickness_nm = v.at("thickness_nm").get<double>();
            if (v.contains("epsilon")) c.interface_epsilon = v.at("epsilon").get<double>();
        } else if (key == "out") {
            c.out_dir = v.get<std::string>();
        } else if (key == "jobs") {
            c.jobs = v.get<std::size_t>();
        } else if (key == "deterministic") {
            c.deterministic = v.get<bool>();
        } else if (key == "c_j_F") {
            c.c_j = v.get<double>();
        } else {
            throw ConfigError(path.string() + ": unknown key '" + key + "'");
        }
    }
}

json settings_json(const RunConfig& c) {
    json j;
    j["mesh"] = to_json(c.effective_mesh());
    j["mesh_scale"] = c.mesh_scale;
    j["solver"] = {{"tolerance", c.solver.tolerance},
                   {"max_iterations", c.solver.max_iterations},
                   {"preconditioner", to_string(c.solver.preconditioner)}};
    j["jobs"] = c.jobs;
    j["c_j_F"] = c.c_j;
    j["deterministic"] = c.deterministic;
    if (c.interface_thickness_nm) j["interface"]["thickness_nm"] = *c.interface_thickness_nm;
    if (c.interface_epsilon) j["interface"]["epsilon"] = *c.interface_epsilon;
    return j;
}

// Geometry sources ---------------------------------------------------------

DeviceGeometry template_geometry(const std::string& name,
                                 const std::vector<std::pair<std::string, double>>& params) {
    if (name == "flipmon") {
        FlipmonParams p;
        for (const auto& [k, v] : params) set_param(p, k, v);
        return flipmon_template(p);
    }
    if (name == "planar") {
        PlanarParams p;
        for (const auto& [k, v] : params) set_param(p, k, v);
        return planar_transmon_template(p);
    }
    if (name == "plates") {
        double side = 200.0, gap = defaults::vacuum_gap_um;
        for (const auto& [k, v] : params) {
            if (k == "side") {
                side = v;
            } else if (k == "gap" || k == "gap_d") {
                gap = v;
            } else {
                throw ConfigError("unknown plates parameter '" + k + "'");
            }
        }
        return parallel_plate_template(side, gap);
    }
    throw ConfigError("unknown template '" + name + "' (flipmon, planar, plates)");
}

class GeometrySource {
  public:
    explicit GeometrySource(const RunConfig& c) : config_(c) {
        if (c.geometry && !c.template_name.empty()) {
            throw ConfigError("--geometry and --template are mutually exclusive");
        }
        if (!c.geometry && c.template_name.empty()) {
            throw ConfigError("no geometry: pass --geometry FILE or --template NAME");
        }
        if (c.geometry && !c.params.empty()) throw ConfigError("--param applies to templates only");
        if (c.geometry) text_ = read_file(*c.geometry);
    }

    bool is_template() const { return !config_.template_name.empty(); }

    ValidatedGeometry make() const { return make_with({}); }

    /// Template geometry with one more parameter override on top.
    ValidatedGeometry make_with(std::optional<std::pair<std::string, double>> extra) const {
        DeviceGeometry g;
        if (is_template()) {
            auto params = config_.params;
            if (extra) params.push_back(*extra);
            g = template_geometry(config_.template_name, params);
        } else {
            if (extra) throw ConfigError("sweeps need a template geometry");
            json doc;
            try {
                doc = json::parse(text_);
            } catch (const json::parse_error& e) {
                throw GeometryError(config_.geometry->string() + ": " + e.what());
            }
            g = geometry_from_json(doc);
        }
        if (config_.interface_thickness_nm) {
            if (!(*config_.interface_thickness_nm > 0.0)) throw ConfigError("interface thickness must be positive");
            g.interface_spec.thickness_m = *config_.interface_thickness_nm * 1e-9;
        }
        if (config_.interface_epsilon) {
            if (!(*config_.interface_epsilon >= 1.0)) throw ConfigError("interface epsilon must be >= 1");
            g.interface_spec.epsilon_layer = *config_.interface_epsilon;
        }
        return validate(std::move(g));
    }

    json describe(const ValidatedGeometry& g) const {
        json j;
        if (is_template()) {
            j["template"] = config_.template_name;
            json p = json::object();
            for (const auto& [k, v] : config_.params) p[k] = v;
            j["params"] = p;
        } else {
            j["path"] = config_.geometry->string();
            j["sha256"] = sha256_hex(text_);
        }
        j["document"] = geometry_to_json(g.raw());
        return j;
    }

  private:
    const RunConfig& config_;
    std::string text_;
};

// Output files -------------------------------------------------------------

class OutputDir {
  public:
    OutputDir(fs::path dir, bool force) : dir_(std::move(dir)), force_(force) {}

    /// Registers every file a run will write; refuses existing files
    /// unless forced.
    void plan(const std::vector<std::string>& names) {
        for (const auto& n : names) {
            if (!force_ && fs::exists(dir_ / n)) {
                throw ConfigError("refusing to overwrite " + (dir_ / n).string() + " (use --force)");
            }
        }
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory " + dir_.string());
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + (dir_ / name).string());
        f << content;
        f.close();
        if (!f) throw IoError("short write for " + (dir_ / name).string());
        checksums_[name] = sha256_hex(content);
    }

    /// Hashes a file written by someone else.
    void record(const std::string& name) { checksums_[name] = sha256_hex(read_file(dir_ / name)); }

    fs::path path(const std::string& name) const { return dir_ / name; }
    const std::map<std::string, std::string>& checksums() const { return checksums_; }

  private:
    fs::path dir_;
    bool force_;
    std::map<std::string, std::string> checksums_;
};

json versions() {
    lapack_int major = 0, minor = 0, patch = 0;
    LAPACK_ilaver(&major, &minor, &patch);
    char lapack[32];
    std::snprintf(lapack, sizeof lapack, "%d.%d.%d", static_cast<int>(major), static_cast<int>(minor),
                  static_cast<int>(patch));
    char nl[32];
    std::snprintf(nl, sizeof nl, "%d.%d.%d", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                  NLOHMANN_JSON_VERSION_PATCH);
    return {{"flipmon", kVersion},
            {"compiler", __VERSION__},
            {"cxx_standard", __cplusplus},
            {"lapack", lapack},
            {"nlohmann_json", nl},
            {"cli11", CLI11_VERSION},
            {"openssl", OpenSSL_version(OPENSSL_VERSION)}};
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string plane_tag(const std::string& plane) {
    std::string tag;
    for (char ch : plane) {
        if (ch != '=' && ch != ' ') tag.push_back(ch);
    }
    return tag;
}

std::string slice_csv(const FieldSlice& s) {
    std::ostringstream o;
    write_slice_csv(o, s);
    return o.str();
}

std::string slice_svg(const FieldSlice& s) {
    std::ostringstream o;
    write_slice_svg(o, s);
    return o.str();
}

std::string capacitance_csv(const CapacitanceMatrix& c) {
    std::ostringstream o;
    o << "net";
    for (const auto& n : c.nets()) o << ',' << n;
    o << '\n';
    for (std::size_t i = 0; i < c.size(); ++i) {
        o << c.nets()[i];
        for (std::size_t j = 0; j < c.size(); ++j) o << ',' << fmt("%.9e", c(i, j));
        o << '\n';
    }
    return o.str();
}

json capacitance_json(const CapacitanceAnalysis& a) {
    const CapacitanceMatrix& c = a.result.matrix;
    json m = json::array();
    for (std::size_t i = 0; i < c.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < c.size(); ++j) row.push_back(c(i, j));
        m.push_back(row);
    }
    json j = {{"nets", c.nets()}, {"matrix_F", m}, {"asymmetry", c.asymmetry()}};
    if (a.pads) {
        j["pads"] = {a.pads->first, a.pads->second};
        j["C_sigma_F"] = a.c_sigma;
        j["EC_MHz"] = a.ec_ghz * 1e3;
    }
    return j;
}

std::vector<double> expand_range(const std::vector<double>& r) {
    if (r.size() != 3) throw ConfigError("--range takes min,max,steps");
    const double steps = r[2];
    if (!(steps >= 2.0) || steps != std::floor(steps)) throw ConfigError("a sweep needs at least two points");
    const auto n = static_cast<std::size_t>(steps);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = r[0] + (r[1] - r[0]) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

// Runs f(i) for i in [0, n) on up to `jobs` threads. The failure of the
// lowest index wins so errors do not depend on scheduling.
void parallel_rows(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& f) {
    std::atomic<std::size_t> next{0};
    std::mutex m;
    std::optional<std::size_t> failed_at;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!failed_at || i < *failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

// Verbs ----------------------------------------------------------------------

struct VerbOptions {
    std::vector<std::string> planes;
    std::size_t samples = 200;
    bool dump_field = false;
    bool error_estimate = false;

    std::string vary;
    std::vector<double> values;
    std::vector<double> range;
    double ej_ghz = 14.6;
    bool sweep_participation = false;

    std::string records;
    std::optional<double> p;
    double gamma0 = 0.0;

    std::string tangents;
    std::string participation;
    std::optional<double> f01;
};

struct Run {
    std::string verb;
    const RunConfig& config;
    const VerbOptions& opt;
    OutputDir& outdir;
    std::ostream& out;
    json manifest;
};

void add_input(Run& r, const std::string& role, const fs::path& p) {
    r.manifest["inputs"].push_back({{"role", role}, {"path", p.string()}, {"sha256", sha256_hex(read_file(p))}});
}

void cmd_cap(Run& r) {
    r.outdir.plan({"capacitance.csv", "capacitance.json", "manifest.json"});
    GeometrySource src(r.config);
    const ValidatedGeometry g = src.make();
    r.manifest["geometry"] = src.describe(g);
    const CapacitanceAnalysis a = analyze_capacitance(g, r.config.analysis());
    r.outdir.write("capacitance.csv", capacitance_csv(a.result.matrix));
    const json summary = capacitance_json(a);
    r.outdir.write("capacitance.json", summary.dump(2) + "\n");
    r.manifest["results"] = summary;
    r.out << capacitance_csv(a.result.matrix);
    r.out << "asymmetry before averaging: " << fmt("%.3g", a.result.matrix.asymmetry()) << '\n';
    if (a.pads) {
        r.out << "C_sigma = " << fmt("%.6g", a.c_sigma * 1e15) << " fF\n";
        r.out << "E_C/h = " << fmt("%.6g", a.ec_ghz * 1e3) << " MHz\n";
    }
}

std::vector<std::string> slice_names(const VerbOptions& opt) {
    std::vector<std::string> names;
    for (const auto& p : opt.planes) {
        names.push_back("slice_" + plane_tag(p) + ".csv");
        names.push_back("slice_" + plane_tag(p) + ".svg");
    }
    return names;
}

void write_slices(Run& r, const FieldSolution& solution) {
    for (const auto& p : r.opt.planes) {
        PlaneSpec spec = parse_plane(p);
        spec.samples_u = spec.samples_v = r.opt.samples;
        const FieldSlice s = field_slice(solution, spec);
        r.outdir.write("slice_" + plane_tag(p) + ".csv", slice_csv(s));
        r.outdir.write("slice_" + plane_tag(p) + ".svg", slice_svg(s));
        r.out << "wrote slice " << p << '\n';
    }
}

void check_planes(const VerbOptions& opt) {
    for (const auto& p : opt.planes) parse_plane(p);
    if (opt.samples < 2) throw ConfigError("--samples must be at least 2");
}

void cmd_participation(Run& r) {
    check_planes(r.opt);
    std::vector<std::string> names{"participation.csv", "participation.txt", "participation.json",
                                   "manifest.json"};
    for (auto& n : slice_names(r.opt)) names.push_back(n);
    if (r.opt.dump_field) {
        names.push_back("field.json");
        names.push_back("field.bin");
    }
    r.outdir.plan(names);
    GeometrySource src(r.config);
    const ValidatedGeometry g = src.make();
    r.manifest["geometry"] = src.describe(g);
    const ParticipationAnalysis a = analyze_participation(g, r.config.analysis(), r.opt.error_estimate);

    std::ostringstream csv, table;
    write_participation_csv(csv, a.report);
    write_participation_table(table, a.report);
    json j = to_json(a.report);
    j["drive_V"] = a.drive.entries();
    j["capacitance"] = capacitance_json(a.cap);
    r.outdir.write("participation.csv", csv.str());
    r.outdir.write("participation.txt", table.str());
    r.outdir.write("participation.json", j.dump(2) + "\n");
    r.out << table.str();
    write_slices(r, a.solution);
    if (r.opt.dump_field) {
        write_field_dump(a.solution, r.outdir.path("field"));
        r.outdir.record("field.json");
        r.outdir.record("field.bin");
    }
    r.manifest["results"] = {{"bulk_sum", a.report.bulk_sum}, {"u_tot_J", a.report.u_tot}};
}

void cmd_slice(Run& r) {
    if (r.opt.planes.empty()) throw ConfigError("slice needs at least one --plane");
    check_planes(r.opt);
    auto names = slice_names(r.opt);
    names.push_back("manifest.json");
    r.outdir.plan(names);
    GeometrySource src(r.config);
    const ValidatedGeometry g = src.make();
    r.manifest["geometry"] = src.describe(g);
    const ParticipationAnalysis a = analyze_participation(g, r.config.analysis());
    write_slices(r, a.solution);
}

void cmd_sweep(Run& r) {
    if (r.opt.vary.empty()) throw ConfigError("sweep needs --vary NAME");
    if (!r.opt.values.empty() && !r.opt.range.empty()) throw ConfigError("--values and --range are exclusive");
    const std::vector<double> values = r.opt.range.empty() ? r.opt.values : expand_range(r.opt.range);
    if (values.size() < 2) throw ConfigError("a sweep needs at least two points");
    r.outdir.plan({"sweep.csv", "sweep_summary.json", "manifest.json"});
    GeometrySource src(r.config);
    if (!src.is_template()) throw ConfigError("sweeps need a template geometry");
    // Fail early on bad names or out-of-range values.
    for (double v : values) src.make_with(std::make_pair(r.opt.vary, v));
    r.manifest["geometry"] = src.describe(src.make());
    r.manifest["sweep"] = {{"parameter", r.opt.vary}, {"values", values}, {"ej_GHz", r.opt.ej_ghz}};

    const auto pts = run_sweep(
        values, [&](double v) { return src.make_with(std::make_pair(r.opt.vary, v)); },
        r.config.analysis(), r.opt.ej_ghz, r.opt.sweep_participation);
    const SweepSummary s = summarize_sweep(pts);

    std::ostringstream csv;
    csv << r.opt.vary << ",C_sigma_fF,EC_MHz,p_Vacuum,eta_MHz\n";
    for (const auto& p : pts) {
        csv << fmt("%.10g", p.value) << ',' << fmt("%.10g", p.c_sigma * 1e15) << ','
            << fmt("%.10g", p.ec_ghz * 1e3) << ','
            << (std::isnan(p.p_vacuum) ? std::string() : fmt("%.10g", p.p_vacuum)) << ','
            << fmt("%.10g", p.eta_ghz * 1e3) << '\n';
    }
    constexpr double kReferenceSpread = 0.03;
    const json summary = {{"parameter", r.opt.vary},
                          {"points", pts.size()},
                          {"ec_ratio_last_over_first", s.ec_ratio},
                          {"ideal_plate_ratio", s.plate_ratio},
                          {"ec_strictly_increasing", s.strictly_increasing},
                          {"ec_spread_full_range", s.ec_spread},
                          {"ec_spread_central_half", s.ec_spread_half},
                          {"reference_spread", kReferenceSpread}};
    r.outdir.write("sweep.csv", csv.str());
    r.outdir.write("sweep_summary.json", summary.dump(2) + "\n");
    r.manifest["results"] = summary;
    r.out << csv.str();
    r.out << "E_C(last)/E_C(first)        " << fmt("%.4f", s.ec_ratio) << '\n';
    r.out << "ideal parallel-plate ratio  " << fmt("%.4f", s.plate_ratio) << '\n';
    r.out << "E_C strictly increasing     " << (s.strictly_increasing ? "yes" : "no") << '\n';
    r.out << "E_C spread, full range      " << fmt("%.2f", 100.0 * s.ec_spread) << " %\n";
    r.out << "E_C spread, central half    "
          << (std::isnan(s.ec_spread_half) ? std::string("n/a") : fmt("%.2f", 100.0 * s.ec_spread_half) + " %")
          << '\n';
    r.out << "reference spread            < " << fmt("%.0f", 100.0 * kReferenceSpread) << " %\n";
}

std::string opt_cell(bool present, double v) { return present ? fmt("%.10g", v) : std::string(); }

void cmd_fit(Run& r) {
    if (r.opt.records.empty()) throw ConfigError("fit needs --records FILE");
    if (r.opt.p && !(*r.opt.p > 0.0)) throw ConfigError("--p must be positive");
    if (r.opt.gamma0 < 0.0) throw ConfigError("--gamma0 must be non-negative");
    r.outdir.plan({"fit.csv", "manifest.json"});
    add_input(r, "records", r.opt.records);
    const auto records = load_records(r.opt.records);

    std::vector<std::string> rows(records.size());
    parallel_rows(records.size(), r.config.jobs, [&](std::size_t i) {
        const MeasuredQubitRecord& q = records[i];
        try {
            std::string cells = record_cells(q);
            const bool can_fit = q.f_q_ghz && q.eta_mhz;
            EjEcFit f;
            if (can_fit) f = fit_ej_ec(*q.f_q_ghz, *q.eta_mhz * 1e-3);
            cells += ',' + opt_cell(can_fit, f.ej_ghz) + ',' + opt_cell(can_fit, f.ec_ghz * 1e3) + ',' +
                     opt_cell(can_fit, f.ej_ghz / f.ec_ghz);
            const bool can_g = q.f_q_ghz && q.f_r_ghz && q.eta_mhz && q.chi_mhz;
            Coupling c;
            if (can_g) c = g_from_chi(q);
            cells += ',' + opt_cell(can_g, c.g_mhz) + ',' + opt_cell(can_g, c.g_alt_mhz);
            const bool can_tan = r.opt.p && q.t1_us && q.f_q_ghz;
            double tan = 0.0;
            if (can_tan) tan = extract_tangent(*q.t1_us * 1e-6, *q.f_q_ghz, *r.opt.p, r.opt.gamma0);
            cells += ',' + opt_cell(can_tan, tan);
            rows[i] = cells;
        } catch (const std::exception& e) {
            throw CodedError(exit_code_for(e), "row " + std::to_string(i + 1) + " (" + q.label + "): " + e.what());
        }
    });
    std::ostringstream csv;
    csv << kRecordHeader << ",EJ_GHz,EC_MHz,EJ_over_EC,g_MHz,g_alt_MHz,tan_delta_upper\n";
    for (const auto& row : rows) csv << row << '\n';
    r.outdir.write("fit.csv", csv.str());
    r.manifest["fit"] = {{"p", r.opt.p ? json(*r.opt.p) : json(nullptr)}, {"gamma0_per_s", r.opt.gamma0}};
    r.manifest["results"] = {{"rows", rows.size()}};
    r.out << csv.str();
}

void cmd_lossbudget(Run& r) {
    if (r.opt.tangents.empty()) throw ConfigError("lossbudget needs --tangents FILE");
    if (!r.opt.f01) throw ConfigError("lossbudget needs --f01 GHZ");
    r.outdir.plan({"budget.csv", "manifest.json"});
    add_input(r, "tangents", r.opt.tangents);
    const LossTangentTable tangents = load_tangents(r.opt.tangents);
    ParticipationReport report;
    if (!r.opt.participation.empty()) {
        add_input(r, "participation", r.opt.participation);
        json j = read_json_file(r.opt.participation);
        report = report_from_json(j);
    } else {
        GeometrySource src(r.config);
        const ValidatedGeometry g = src.make();
        r.manifest["geometry"] = src.describe(g);
        report = analyze_participation(g, r.config.analysis()).report;
    }
    const LossBudget b = predict_t1(report, tangents, *r.opt.f01);
    std::ostringstream csv;
    write_budget_csv(csv, b);
    r.outdir.write("budget.csv", csv.str());
    r.manifest["results"] = {{"inv_Q", b.inv_q},
                             {"T1_us", b.unbounded ? json(nullptr) : json(b.t1_s * 1e6)},
                             {"unbounded", b.unbounded}};
    r.out << csv.str();
    if (b.unbounded) {
        r.out << "T1 unbounded: no loss channel\n";
    } else {
        r.out << "Q = " << fmt("%.4g", 1.0 / b.inv_q) << ", T1 = " << fmt("%.4g", b.t1_s * 1e6) << " us\n";
    }
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flip-chip transmon electrostatics, participation and loss toolkit", "flipmon"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, geometry_path, template_name, out_dir, preconditioner;
    std::vector<std::string> param_text;
    std::size_t jobs = 0;
    double mesh_scale = 0.0, tolerance = 0.0, thickness = 0.0, eps_layer = 0.0, c_j = 0.0;
    bool deterministic = false, force = false;
    auto* o_config = app.add_option("--config", config_path, "JSON run configuration");
    auto* o_geometry = app.add_option("--geometry", geometry_path, "Geometry JSON file");
    auto* o_template = app.add_option("--template", template_name, "Built-in geometry: flipmon, planar, plates");
    app.add_option("--param", param_text, "Template parameter override name=value (repeatable)");
    auto* o_out = app.add_option("--out", out_dir, "Output directory");
    auto* o_jobs = app.add_option("--jobs", jobs, "Concurrent solves, sweep points or fit rows");
    auto* o_det = app.add_flag("--deterministic", deterministic, "Omit timestamps and timings from the manifest");
    app.add_flag("--force", force, "Overwrite existing outputs");
    auto* o_scale = app.add_option("--mesh-scale", mesh_scale, "Multiply every mesh cell bound");
    auto* o_tol = app.add_option("--tolerance", tolerance, "Solver relative residual");
    auto* o_pre = app.add_option("--preconditioner", preconditioner, "z_line or jacobi");
    auto* o_thick = app.add_option("--interface-thickness-nm", thickness, "Interface layer thickness");
    auto* o_eps = app.add_option("--interface-epsilon", eps_layer, "Interface layer permittivity");
    auto* o_cj = app.add_option("--cj", c_j, "Junction capacitance in farads");

    VerbOptions opt;
    app.add_subcommand("cap", "Maxwell capacitance matrix, C_sigma and E_C");
    auto* part = app.add_subcommand("participation", "Energy participation report of the qubit mode");
    part->add_option("--slice", opt.planes, "Field slice plane such as y=0 (repeatable)");
    part->add_option("--samples", opt.samples, "Slice samples per axis");
    part->add_flag("--dump-field", opt.dump_field, "Write the potential to field.json / field.bin");
    part->add_flag("--error-estimate", opt.error_estimate, "Attach a coarse-mesh error estimate");
    auto* sweep = app.add_subcommand("sweep", "Template parameter sweep of C_sigma, E_C and eta");
    sweep->add_option("--vary", opt.vary, "Template parameter to sweep")->required();
    sweep->add_option("--values", opt.values, "Comma-separated values")->delimiter(',');
    sweep->add_option("--range", opt.range, "min,max,steps")->delimiter(',');
    sweep->add_option("--ej-ghz", opt.ej_ghz, "E_J/h used for the predicted eta");
    sweep->add_flag("--with-participation", opt.sweep_participation, "Also compute p(Vacuum)");
    auto* fit = app.add_subcommand("fit", "Fit E_J, E_C, g and loss bounds to measured qubits");
    fit->add_option("--records", opt.records, "Measured qubit CSV")->required();
    fit->add_option("--p", opt.p, "Participation for the loss tangent upper bound");
    fit->add_option("--gamma0", opt.gamma0, "Background relaxation rate, 1/s");
    auto* loss = app.add_subcommand("lossbudget", "T1 budget from participations and loss tangents");
    loss->add_option("--tangents", opt.tangents, "Loss tangent JSON")->required();
    loss->add_option("--participation", opt.participation, "participation.json of an earlier run");
    loss->add_option("--f01", opt.f01, "Qubit frequency in GHz")->required();
    auto* slice = app.add_subcommand("slice", "|E| slices of the qubit-mode field as CSV and SVG");
    slice->add_option("--plane", opt.planes, "Plane such as y=0 (repeatable)")->required();
    slice->add_option("--samples", opt.samples, "Samples per axis");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    RunConfig config;
    if (*o_config) {
        require_exists(config_path, "configuration");
        apply_config_file(config, config_path);
    }
    if (*o_geometry) {
        config.geometry = geometry_path;
        config.template_name.clear();
    }
    if (*o_template) {
        config.template_name = template_name;
        if (!*o_geometry) config.geometry.reset();
    }
    for (const auto& p : param_text) config.params.push_back(parse_assignment(p));
    if (*o_out) config.out_dir = out_dir;
    if (*o_jobs) config.jobs = jobs;
    if (*o_det) config.deterministic = deterministic;
    config.force = force;
    if (*o_scale) config.mesh_scale = mesh_scale;
    if (*o_tol) config.solver.tolerance = tolerance;
    if (*o_pre) config.solver.preconditioner = parse_preconditioner(preconditioner);
    if (*o_thick) config.interface_thickness_nm = thickness;
    if (*o_eps) config.interface_epsilon = eps_layer;
    if (*o_cj) config.c_j = c_j;

    if (config.jobs < 1) throw ConfigError("--jobs must be at least 1");
    if (!(config.mesh_scale > 0.0)) throw ConfigError("--mesh-scale must be positive");
    if (!(config.solver.tolerance > 0.0 && config.solver.tolerance < 1.0)) {
        throw ConfigError("solver tolerance must lie in (0, 1)");
    }
    if (!(config.c_j >= 0.0)) throw ConfigError("junction capacitance must be non-negative");
    if (config.geometry) require_exists(*config.geometry, "geometry file");
    if (!opt.records.empty()) require_exists(opt.records, "records file");
    if (!opt.tangents.empty()) require_exists(opt.tangents, "tangent file");
    if (!opt.participation.empty()) require_exists(opt.participation, "participation file");

    const auto start = std::chrono::steady_clock::now();
    OutputDir outdir(config.out_dir, config.force);
    std::string verb = app.get_subcommands().front()->get_name();
    Run run{verb, config, opt, outdir, out, json::object()};
    run.manifest["tool"] = "flipmon";
    run.manifest["command"] = verb;
    run.manifest["arguments"] = args;
    run.manifest["defaults"] = defaults::as_json();
    run.manifest["settings"] = settings_json(config);
    run.manifest["inputs"] = json::array();
    run.manifest["versions"] = versions();
    if (!config.deterministic) run.manifest["started_utc"] = utc_now();

    if (verb == "cap") {
        cmd_cap(run);
    } else if (verb == "participation") {
        cmd_participation(run);
    } else if (verb == "sweep") {
        cmd_sweep(run);
    } else if (verb == "fit") {
        cmd_fit(run);
    } else if (verb == "lossbudget") {
        cmd_lossbudget(run);
    } else {
        cmd_slice(run);
    }

    if (!config.deterministic) {
        run.manifest["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    run.manifest["outputs"] = outdir.checksums();
    outdir.write("manifest.json", run.manifest.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return execute(args, out, err);
    } catch (const CodedError& e) {
        err << "error: " << e.what() << '\n';
        return e.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace flipmon::cli
