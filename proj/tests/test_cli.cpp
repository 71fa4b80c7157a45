// SPDX-License-Identifier: Apache-2.0
//
// Drives the installed CLI binary (path in EPKIT_CLI) through its documented
// surface: flags, CSV/JSON shapes, exit codes, and reproducibility.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "epkit/gaussian.hpp"
#include "epkit/modem.hpp"

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

std::string cli_path() {
    const char* p = std::getenv("EPKIT_CLI");
    return p ? p : "epkit";
}

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

// data rows: everything after the header line, split into comma fields
std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream ss(text);
    std::string line;
    bool in_data = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!in_data) {  // column header
            in_data = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string strip_timestamp(const std::string& text) {
    std::istringstream ss(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(ss, line))
        if (line.rfind("# timestamp:", 0) != 0) out << line << '\n';
    return out.str();
}

TEST(CliEp, QamSweepRowsAndValues) {
    const auto r = run("ep --mod qam:M=4 --snr-db 0:20:1");
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 21u);
    double at10 = 0.0;
    for (const auto& row : rows)
        if (row[0] == 10.0) at10 = row[1];
    EXPECT_NEAR(at10 / epkit::q_function(std::sqrt(10.0)), 1.0, 1e-12);
}

TEST(CliEp, SingleRowRange) {
    const auto r = run("ep --mod grid:n=2,d=1,a=2 --snr-db 0:0:1");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(csv_rows(r.out).size(), 1u);
}

TEST(CliEp, BadModulationIsUsageError) {
    EXPECT_EQ(run("ep --mod wave:Z=1 --snr-db 0:1:1").exit_code, 2);
    EXPECT_EQ(run("ep --mod qam:M=8 --snr-db 0:1:1").exit_code, 2);
    EXPECT_EQ(run("ep --mod qam:M=4 --snr-db nonsense").exit_code, 2);
}

TEST(CliAvgEp, RayleighQpskMatchesClosedForm) {
    const auto r = run("avg-ep --mod qam:M=4 --fading nakagami:m=1 --snr-db 10:10:0");
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 1u);
    // QPSK BEP(gamma) = Q(sqrt(gamma)), so gbar = 10 averages like BPSK at 5
    EXPECT_NEAR(rows[0][1] / epkit::rayleigh_bpsk_avg(5.0), 1.0, 1e-9);
}

TEST(CliAvgEp, FadingNoneMatchesEp) {
    const auto a = run("avg-ep --mod psk:M=8 --fading none --snr-db 0:12:3");
    const auto b = run("ep --mod psk:M=8 --snr-db 0:12:3");
    ASSERT_EQ(a.exit_code, 0);
    ASSERT_EQ(b.exit_code, 0);
    const auto ra = csv_rows(a.out), rb = csv_rows(b.out);
    ASSERT_EQ(ra.size(), rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(ra[i][1], rb[i][1]);
}

TEST(CliAvgEp, MrcTailSlopeIsMinusTwoPerDecade) {
    const auto r = run("avg-ep --mod qam:M=16 --fading mrc:n=2 --snr-db 40:50:10");
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 2u);
    const double slope = std::log10(rows[1][1] / rows[0][1]);  // per decade
    EXPECT_NEAR(slope, -2.0, 0.04);
}

TEST(CliBounds, SandwichHoldsOnEmittedRowsInsideRoi) {
    const auto r = run("bounds --mod qam:M=16 --fading mrc:n=2 --roi 1e-3:1e-1");
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = csv_rows(r.out);
    EXPECT_GT(rows.size(), 10u);
    for (const auto& row : rows) {
        const double exact = row[1], ub = row[2], lub = row[3], llb = row[4];
        if (exact < 1e-3 || exact > 1e-1) continue;  // outside the ROI
        EXPECT_GE(lub - exact, -1e-9);
        EXPECT_GE(exact - llb, -1e-9);
        EXPECT_GE(ub - lub, -1e-9);
    }
}

TEST(CliBounds, JsonSetAndOverrides) {
    // BPSK under the e^{2t} SNR bookkeeping has the true asymptote 1/(4 gbar)
    const std::string json_file = "/tmp/epkit_test_lb.json";
    const auto r = run("bounds --mod psk:M=2 --fading nakagami:m=1 --roi 1e-3:1e-1 "
                       "--K 0.25 --D 1 --json " + json_file);
    ASSERT_EQ(r.exit_code, 0);
    std::ifstream jf(json_file);
    ASSERT_TRUE(jf.good());
    std::stringstream buf;
    buf << jf.rdbuf();
    const std::string text = buf.str();
    EXPECT_NE(text.find("\"K\": 0.25"), std::string::npos);
    EXPECT_NE(text.find("\"D\": 1.0"), std::string::npos);
    for (const char* key : {"pe_min", "pe_max", "gamma_m", "gamma_M", "delta_m_db",
                            "delta_M_db"})
        EXPECT_NE(text.find(key), std::string::npos) << key;
    std::remove(json_file.c_str());
}

TEST(CliBounds, ExitCodes) {
    EXPECT_EQ(run("bounds --mod qam:M=16 --fading none --roi 1e-3:1e-1").exit_code, 4);
    EXPECT_EQ(run("bounds --mod qam:M=16 --fading mrc:n=2 --roi 1e-3:0.6").exit_code, 2);
}

TEST(CliVerify, CleanRunThenNegativeControl) {
    const auto clean = run("verify --d-max 4 --h-steps 50 --exact-d-max 10");
    EXPECT_EQ(clean.exit_code, 0);
    EXPECT_NE(clean.out.find("\"total_violations\": 0"), std::string::npos);
    const auto neg =
        run("verify --d-max 4 --h-steps 50 --exact-d-max 10 --negative-control");
    EXPECT_EQ(neg.exit_code, 1);
    EXPECT_EQ(neg.out.find("\"total_violations\": 0"), std::string::npos);
    EXPECT_EQ(run("verify --d-max 1").exit_code, 2);
}

TEST(CliSe, ScenarioExtremesAndShape) {
    const std::string path = "/tmp/epkit_test_scenario.json";
    {
        std::ofstream f(path);
        f << R"({"sizes":[4,16],"target_bep":1e-2,"mode":"exact",
                 "fading":"nakagami:m=1","diversity":1,
                 "shadowing":{"median_db":100.0,"sigma_db":4.0}})";
    }
    const auto r = run("se --scenario " + path);
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("\"thresholds_db\""), std::string::npos);
    EXPECT_NE(r.out.find("\"eo\""), std::string::npos);
    // median far above all thresholds: eta -> log2(16) = 4
    const auto pos = r.out.find("\"eta\":");
    ASSERT_NE(pos, std::string::npos);
    const double eta = std::stod(r.out.substr(pos + 6));
    EXPECT_NEAR(eta, 4.0, 1e-6);
    std::remove(path.c_str());
}

TEST(CliOutage, MedianIsHalf) {
    const auto r = run("outage --required-db 15 --median-db 15 --sigma-db 8");
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0][1], 0.5);
}

TEST(CliMc, SeededRunsAreByteIdentical) {
    const std::string args = "mc --mod grid:n=4,d=2,a=2 --snr-db 0:6:3 "
                             "--samples 200000 --seed 77";
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(strip_timestamp(a.out), strip_timestamp(b.out));
    const auto c = run("mc --mod grid:n=4,d=2,a=2 --snr-db 0:6:3 "
                       "--samples 200000 --seed 78");
    EXPECT_NE(strip_timestamp(a.out), strip_timestamp(c.out));
}

TEST(CliMc, BepMetricAndGrayDump) {
    const auto r = run("mc --mod qam:M=16 --snr-db 10:10:0 --samples 100000 "
                       "--seed 5 --metric bep --dump-gray");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("# gray_axis_labels: 0 1 3 2"), std::string::npos);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0][1], 0.058992725267914388, 4.0 * rows[0][2]);
    EXPECT_EQ(run("mc --mod psk:M=8 --snr-db 0:0:1 --metric bep").exit_code, 2);
}

TEST(CliManifest, PresentOnEveryOutput) {
    for (const std::string args :
         {std::string("ep --mod qam:M=4 --snr-db 0:1:1"),
          std::string("outage --required-db 1 --median-db 0 --sigma-db 4")}) {
        const auto r = run(args);
        ASSERT_EQ(r.exit_code, 0);
        EXPECT_EQ(r.out.rfind("# command:", 0), 0u);
        EXPECT_NE(r.out.find("# parameters:"), std::string::npos);
        EXPECT_NE(r.out.find("# tool_version:"), std::string::npos);
        EXPECT_NE(r.out.find("# timestamp:"), std::string::npos);
    }
}

}  // namespace
