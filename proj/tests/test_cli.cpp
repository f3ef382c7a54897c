#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bim/specfun.hpp"
#include "doctest.h"

namespace {

std::string binary() {
    const char* env = std::getenv("BIMAG_BIN");
    return env ? env : "./bimag";
}

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    RunResult r;
    const std::string cmd = binary() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// parse CSV (skipping # comments), returning columns by header name
std::vector<std::vector<double>> parse_csv(const std::string& text, int expect_cols) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        REQUIRE(static_cast<int>(row.size()) == expect_cols);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("profile at lambda = 0 emits u identically 1") {
    auto r = run("profile --lambda 0 --t-min 0.01 --t-max 10 --points 100");
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out, 4);
    REQUIRE(rows.size() == 100);
    for (const auto& row : rows) {
        CHECK(std::abs(row[1] - 1.0) < 1e-9);
        CHECK(std::isfinite(row[2]));
        CHECK(std::isfinite(row[3]));
    }
}

TEST_CASE("profile at lambda = 5 has an interior maximum") {
    auto r = run("profile --lambda 5 --t-min 0.01 --t-max 10 --points 200");
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out, 4);
    std::size_t imax = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][2] > rows[imax][2]) imax = i;
    }
    CHECK(imax > 0);
    CHECK(imax + 1 < rows.size());
}

TEST_CASE("metastable profile approaches -sigma0") {
    auto r = run("profile --lambda 0.5 --branch metastable --t-min 1 --t-max 12 --points 60");
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out, 4);
    CHECK(std::abs(rows.back()[2] + 1.0) < 0.01);
}

TEST_CASE("phi subcommand prints the matching-point value") {
    auto r = run("phi --r 14");
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out, 3);
    REQUIRE(rows.size() == 1);
    const double ref = 2.0 / M_PI * bim::specfun::bessel_k(0, 14.0);
    CHECK(std::abs(rows[0][1] - ref) < 1e-12 * ref);
    CHECK(rows[0][2] < 0.0);
}

TEST_CASE("ff subcommand prints the hierarchy and flags slow convergence") {
    auto r = run("ff --t 2 --lambda 1 --kmax 3");
    REQUIRE(r.code == 0);
    double f[3] = {0, 0, 0};
    std::istringstream in(r.out);
    std::string line;
    while (std::getline(in, line)) {
        int k;
        double v;
        if (std::sscanf(line.c_str(), "f_%d = %lf", &k, &v) == 2 && k >= 1 && k <= 3) {
            f[k - 1] = v;
        }
    }
    CHECK(f[0] < 0.0);
    CHECK(std::abs(f[2]) < std::abs(f[1]));
    CHECK(std::abs(f[1]) < std::abs(f[0]));
    CHECK(r.out.find("trunc_bound") != std::string::npos);

    auto warn = run("ff --t 0.3 --lambda 1 --kmax 3");
    REQUIRE(warn.code == 0);
    CHECK(warn.out.find("warning") != std::string::npos);
}

TEST_CASE("identical flags produce byte-identical output files") {
    const std::string f1 = "/tmp/bimag_test_a.csv", f2 = "/tmp/bimag_test_b.csv";
    auto r1 = run("profile --lambda 1.5 --t-min 0.02 --t-max 8 --points 50 --output " + f1);
    auto r2 = run("profile --lambda 1.5 --t-min 0.02 --t-max 8 --points 50 --output " + f2);
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    const std::string a = slurp(f1), b = slurp(f2);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.find("sigma_ratio") != std::string::npos);
    CHECK(a.find('\r') == std::string::npos);  // LF only
    std::remove(f1.c_str());
    std::remove(f2.c_str());
}

TEST_CASE("json format nests the manifest") {
    auto r = run("profile --lambda 0.5 --t-min 0.1 --t-max 5 --points 10 --format json");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"manifest\"") != std::string::npos);
    CHECK(r.out.find("\"columns\"") != std::string::npos);
    CHECK(r.out.find("\"sigma_abs\"") != std::string::npos);
}

TEST_CASE("the mass flag rescales the absolute column only") {
    auto r1 = run("profile --lambda 1 --t-min 0.1 --t-max 5 --points 20");
    auto r2 = run("profile --lambda 1 --t-min 0.1 --t-max 5 --points 20 --mass 256");
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    auto a = parse_csv(r1.out, 4), b = parse_csv(r2.out, 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i][2] == b[i][2]);                                   // ratio unchanged
        CHECK(std::abs(b[i][3] / a[i][3] - 2.0) < 1e-12);            // 256^{1/8} = 2
    }
}

TEST_CASE("high-temperature branch profile") {
    auto r = run("profile --branch highT --t-min 0.5 --t-max 10 --points 40");
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out, 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i][1] == 0.0);  // u undefined in the disordered phase
        CHECK(rows[i][2] > 0.0);
        if (i > 0) CHECK(rows[i][2] < rows[i - 1][2]);
    }
}

TEST_CASE("verify --quick runs the suite and skips the oracle comparison") {
    auto r = run("verify --quick");
    CHECK(r.code == 0);
    CHECK(r.out.find("[skip]") != std::string::npos);
    CHECK(r.out.find("all criteria passed") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("phi --r 100").code == 2);  // beyond the table range
    CHECK(run("profile --lambda -3").code == 2);
    CHECK(run("profile --lambda 1 --t-min 5 --t-max 1").code == 2);
    CHECK(run("profile --lambda 0.5 --branch nosuch").code == 2);
    CHECK(run("profile --lambda 2 --branch metastable --t-min 1 --t-max 10").code == 2);
    CHECK(run("profile --lambda 1 --t-max 20").code == 2);  // beyond r_max
    CHECK(run("nosuchcommand").code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("config file values are overridden by flags") {
    const std::string cfg = "/tmp/bimag_test.cfg";
    {
        std::ofstream out(cfg);
        out << "lambda=2.0\npoints=30\nt-min=0.1\nt-max=4\n";
    }
    auto base = run("profile --config " + cfg);
    REQUIRE(base.code == 0);
    CHECK(parse_csv(base.out, 4).size() == 30);
    auto over = run("profile --config " + cfg + " --points 12");
    REQUIRE(over.code == 0);
    CHECK(parse_csv(over.out, 4).size() == 12);
    std::remove(cfg.c_str());
}
