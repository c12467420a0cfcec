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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipmon/cli.hpp"
#include "flipmon/error.hpp"

namespace flipmon::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("flipmon_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int call(std::vector<std::string> args) {
        out_.str({});
        err_.str({});
        return run(args, out_, err_);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    fs::path dir_;
    std::ostringstream out_, err_;
};

TEST_F(CliTest, PlateCapacitance) {
    ASSERT_EQ(call({"--template", "plates", "--out", path("o"), "cap"}), kExitOk) << err_.str();
    EXPECT_NE(out_.str().find("C_sigma = 70.83"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir_ / "o" / "capacitance.json"));
    EXPECT_NEAR(j.at("C_sigma_F").get<double>(), 7.0834e-14, 1e-17);
    const auto m = nlohmann::json::parse(slurp(dir_ / "o" / "manifest.json"));
    for (const char* key : {"tool", "command", "arguments", "defaults", "settings", "inputs", "versions",
                            "geometry", "results", "outputs", "started_utc", "wall_seconds"}) {
        EXPECT_TRUE(m.contains(key)) << key;
    }
    EXPECT_EQ(m.at("outputs").at("capacitance.csv").get<std::string>(),
              sha256_hex(slurp(dir_ / "o" / "capacitance.csv")));
}

TEST_F(CliTest, DeterministicRunsAreByteIdentical) {
    const std::vector<std::string> common{"--template", "planar", "--mesh-scale", "3", "--deterministic"};
    auto args = common;
    args.insert(args.end(), {"--jobs", "2", "--out", path("a"), "participation"});
    ASSERT_EQ(call(args), kExitOk) << err_.str();
    args = common;
    args.insert(args.end(), {"--jobs", "1", "--out", path("b"), "participation"});
    ASSERT_EQ(call(args), kExitOk) << err_.str();
    for (const char* f : {"participation.csv", "participation.json", "capacitance.csv"}) {
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    }
    const auto m = nlohmann::json::parse(slurp(dir_ / "a" / "manifest.json"));
    EXPECT_FALSE(m.contains("started_utc"));
    EXPECT_FALSE(m.contains("wall_seconds"));
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(call({"--geometry", path("missing.json"), "--out", path("o"), "cap"}), kExitConfig);
    EXPECT_EQ(call({"--template", "nonsense", "--out", path("o"), "cap"}), kExitConfig);
    EXPECT_EQ(call({"--template", "plates", "--out", path("o"), "sweep", "--vary", "gap", "--values", "5"}),
              kExitConfig);
    EXPECT_EQ(call({"--template", "plates", "--out", path("o"), "sweep", "--vary", "nope", "--values", "1,2"}),
              kExitConfig);

    ASSERT_EQ(call({"--template", "plates", "--out", path("o"), "cap"}), kExitOk);
    EXPECT_EQ(call({"--template", "plates", "--out", path("o"), "cap"}), kExitConfig);
    EXPECT_NE(err_.str().find("--force"), std::string::npos);
    EXPECT_EQ(call({"--template", "plates", "--out", path("o"), "--force", "cap"}), kExitOk);

    write("bad.json", R"({"template": "plates", "bogus": 1})");
    EXPECT_EQ(call({"--config", path("bad.json"), "--out", path("c"), "cap"}), kExitConfig);
    write("broken.json", "{ not json");
    EXPECT_EQ(call({"--config", path("broken.json"), "--out", path("c"), "cap"}), kExitConfig);

    write("slow.json", R"({"template": "planar", "mesh_scale": 3, "solver": {"max_iterations": 1}})");
    EXPECT_EQ(call({"--config", path("slow.json"), "--out", path("d"), "cap"}), kExitNumerical);

    write("file", "x");
    EXPECT_EQ(call({"--template", "plates", "--out", path("file"), "cap"}), kExitIo);
}

TEST_F(CliTest, ExceptionMapping) {
    EXPECT_EQ(exit_code_for(ConfigError("x")), kExitConfig);
    EXPECT_EQ(exit_code_for(NoConvergence(10, 1e-3)), kExitNumerical);
    EXPECT_EQ(exit_code_for(IoError("x")), kExitIo);
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CliTest, FitSampleTable) {
    ASSERT_EQ(call({"--out", path("f"), "fit", "--records", std::string(FLIPMON_DATA_DIR) + "/flipmon_samples.csv",
                    "--p", "5.39e-5"}),
              kExitOk)
        << err_.str();
    std::istringstream csv(slurp(dir_ / "f" / "fit.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_NE(line.find("EJ_over_EC"), std::string::npos);
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        ASSERT_EQ(cells.size(), 14u) << line;
        const double ratio = std::stod(cells[10]);
        EXPECT_GT(ratio, 40.0);
        EXPECT_LT(ratio, 100.0);
        if (rows == 1) EXPECT_TRUE(cells[11].empty());  // no dispersive shift recorded
    }
    EXPECT_EQ(rows, 12u);
}

TEST_F(CliTest, FitRowErrorsNameTheRow) {
    write("r.csv", "qubit,f_r_GHz,f_q_GHz,eta_MHz,chi_MHz,T1_us,T2s_us,T2e_us\nA,7,4.8,220,,,,\nB,7,0.1,90,,,,\n");
    EXPECT_EQ(call({"--out", path("f"), "fit", "--records", path("r.csv")}), kExitNumerical);
    EXPECT_NE(err_.str().find("row 2 (B)"), std::string::npos) << err_.str();
}

TEST_F(CliTest, LossBudgetZeroTangents) {
    ASSERT_EQ(call({"--template", "plates", "--out", path("p"), "participation"}), kExitOk) << err_.str();
    write("t.json", R"({"tan_delta": {"Vacuum": 0, "MA_b": 0}})");
    ASSERT_EQ(call({"--out", path("l"), "lossbudget", "--tangents", path("t.json"), "--participation",
                    path("p/participation.json"), "--f01", "4.8"}),
              kExitOk)
        << err_.str();
    EXPECT_NE(out_.str().find("unbounded"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "l" / "budget.csv"));
}

TEST_F(CliTest, ParticipationSliceWritesSvg) {
    ASSERT_EQ(call({"--template", "plates", "--out", path("s"), "participation", "--slice", "y=0", "--samples",
                    "30", "--dump-field"}),
              kExitOk)
        << err_.str();
    for (const char* f : {"slice_y0.csv", "slice_y0.svg", "field.json", "field.bin", "participation.txt"}) {
        EXPECT_TRUE(fs::exists(dir_ / "s" / f)) << f;
    }
}

TEST_F(CliTest, PlateSweep) {
    ASSERT_EQ(call({"--template", "plates", "--out", path("w"), "--jobs", "2", "sweep", "--vary", "gap", "--range",
                    "4.6,5.4,5"}),
              kExitOk)
        << err_.str();
    const auto s = nlohmann::json::parse(slurp(dir_ / "w" / "sweep_summary.json"));
    EXPECT_TRUE(s.dump().find("1.17") != std::string::npos) << s.dump();
    std::istringstream csv(slurp(dir_ / "w" / "sweep.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "gap,C_sigma_fF,EC_MHz,p_Vacuum,eta_MHz");
}

}  // namespace
}  // namespace flipmon::cli
