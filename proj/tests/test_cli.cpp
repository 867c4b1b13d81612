#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

struct RunResult {
    int code = -1;
    std::string out; // stdout and stderr merged
};

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("FLOQUET1D_BIN");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;)
        r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string profile(const std::string& name) {
    const char* dir = std::getenv("FLOQUET1D_PROFILES");
    return std::string(dir ? dir : "profiles") + "/" + name + ".json";
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

// csv rows after the comment block and the column-name line
std::vector<std::string> data_rows(const std::string& text) {
    std::vector<std::string> out;
    bool seen_columns = false;
    for (const auto& l : lines_of(text)) {
        if (l.empty() || l[0] == '#')
            continue;
        if (!seen_columns) {
            seen_columns = true;
            continue;
        }
        out.push_back(l);
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

TEST_CASE("delta-map output is byte-identical across worker counts") {
    const std::string base =
        "delta-map --profile " + profile("smooth_poly") + " --omega 0:6:41 --k 0:2:3";
    const RunResult serial = run_cli(base + " --jobs 1");
    const RunResult parallel = run_cli(base + " --jobs 4");
    CHECK(serial.code == 0);
    CHECK(parallel.code == 0);
    CHECK(serial.out == parallel.out);

    const auto rows = data_rows(serial.out);
    REQUIRE(rows.size() == 41 * 3);
    bool saw_passband = false, saw_stopband = false;
    for (const auto& r : rows) {
        const auto f = split_csv(r);
        REQUIRE(f.size() == 8);
        saw_passband = saw_passband || f[3] == "passband";
        saw_stopband = saw_stopband || f[3] == "stopband";
        CHECK(f[7].empty()); // no error cells on this grid
    }
    CHECK(saw_passband);
    CHECK(saw_stopband);
}

TEST_CASE("jsonl format opens with a header record") {
    const RunResult r = run_cli("delta-map --profile " + profile("smooth_poly") +
                                " --omega 1:2:3 --format jsonl");
    CHECK(r.code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() >= 4);
    CHECK(ls[0].rfind("{\"record\":\"header\"", 0) == 0);
    CHECK(ls[0].find("\"config_hash\":") != std::string::npos);
    CHECK(ls[0].find("\"tool\":\"floquet1d\"") != std::string::npos);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        CHECK(ls[i].rfind("{\"omega\":", 0) == 0);
        CHECK(ls[i].back() == '}');
    }
}

TEST_CASE("config mistakes exit with code 2") {
    CHECK(run_cli("delta-map --omega 1:2:3").code == 2); // no profile
    CHECK(run_cli("delta-map --profile /nonexistent_profile.json").code == 2);
    CHECK(run_cli("delta-map --profile " + profile("smooth_poly") + " --omega 1:2").code == 2);
    CHECK(run_cli("delta-map --profile " + profile("smooth_poly") + " --tol -1").code == 2);
    CHECK(run_cli("delta-map --profile " + profile("smooth_poly") + " --format xml").code == 2);
    CHECK(run_cli("no-such-subcommand").code == 2);
    // band needs K inside [0, pi] per cell
    CHECK(run_cli("band --profile " + profile("smooth_poly") + " --K 0:4:5").code == 2);
}

TEST_CASE("band emits monotone branches plus edge and gap records") {
    const RunResult r = run_cli("band --profile " + profile("smooth_poly") +
                                " --K 0:3.141592653589793:5 --branches 2");
    CHECK(r.code == 0);
    std::size_t branch_rows = 0, edge_rows = 0, gap_summaries = 0;
    for (const auto& row : data_rows(r.out)) {
        const auto f = split_csv(row);
        if (f[0] == "branch") {
            ++branch_rows;
            CHECK(f[5] == "true"); // monotone in K along each branch
        } else if (f[0] == "edge") {
            ++edge_rows;
        } else if (f[0] == "gap_summary") {
            ++gap_summaries;
        }
    }
    CHECK(branch_rows == 2 * 5);
    CHECK(edge_rows >= 2);
    CHECK(gap_summaries >= 1);
}

TEST_CASE("green refuses a spectral point and fills the grid otherwise") {
    // Delta(omega^2 = 4, k = 0) = cos K at K = 2.251352831965399
    const RunResult bad = run_cli("green --profile " + profile("smooth_poly") +
                                  " --omega 2 --k 0 --K 2.251352831965399 --grid 5");
    CHECK(bad.code == 2);
    CHECK(bad.out.find("spectrum") != std::string::npos);

    const RunResult ok = run_cli("green --profile " + profile("smooth_poly") +
                                 " --omega 2 --k 0 --K 1.0 --grid 5");
    CHECK(ok.code == 0);
    CHECK(data_rows(ok.out).size() == 5 * 5);
}

TEST_CASE("wkb sweep marks non-supersonic points as error rows and exits 3") {
    const RunResult r = run_cli("wkb-compare --profile " + profile("smooth_poly") +
                                " --omega 1:10:10 --k 2");
    CHECK(r.code == 3);
    std::size_t error_rows = 0, good_rows = 0;
    for (const auto& row : data_rows(r.out)) {
        const auto f = split_csv(row);
        REQUIRE(f.size() == 6);
        if (!f[5].empty()) {
            ++error_rows;
            CHECK(f[2].empty()); // no exact value on failed points
        } else {
            ++good_rows;
        }
    }
    CHECK(error_rows >= 1);
    CHECK(good_rows >= 1);

    // more than one impedance jump rules out the approximation entirely
    CHECK(run_cli("wkb-compare --profile " + profile("bilayer_contrast") + " --omega 10:12:3")
              .code == 2);
}

TEST_CASE("zws-scan reports a confirmed crossing on the degenerate line") {
    const RunResult r = run_cli("zws-scan --profile " + profile("uniform_speed") +
                                " --omega 5:7:2 --k 0:1:3");
    CHECK(r.code == 0);
    const double pi = std::acos(-1.0);
    bool confirmed_on_line = false;
    for (const auto& row : data_rows(r.out)) {
        const auto f = split_csv(row);
        if (f.size() < 7 || f[6] != "true")
            continue;
        const double w = std::stod(f[0]), k = std::stod(f[1]);
        // every crossing of this profile sits on omega^2 = 4 pi^2 + k^2
        if (std::abs(w * w - 4.0 * pi * pi - k * k) < 1e-5 * w * w)
            confirmed_on_line = true;
    }
    CHECK(confirmed_on_line);
}

TEST_CASE("physical units rescale frequencies by the period") {
    const std::string p = profile("bilayer_lowcontrast"); // period 2
    const RunResult phys =
        run_cli("delta-map --profile " + p + " --omega 1 --k 0 --physical");
    const RunResult nond = run_cli("delta-map --profile " + p + " --omega 2 --k 0");
    CHECK(phys.code == 0);
    CHECK(nond.code == 0);
    const auto fp = split_csv(data_rows(phys.out).at(0));
    const auto fn = split_csv(data_rows(nond.out).at(0));
    CHECK(std::stod(fp[0]) == doctest::Approx(1.0));
    CHECK(std::stod(fn[0]) == doctest::Approx(2.0));
    // same nondimensional point, so the Lyapunov value agrees
    CHECK(std::stod(fp[2]) == doctest::Approx(std::stod(fn[2])).epsilon(1e-12));
}

TEST_CASE("verify exits 0 on a passing profile and 1 when residuals exceed tolerance") {
    const RunResult good = run_cli("verify --profile " + profile("homogeneous"));
    CHECK(good.code == 0);
    std::size_t checks = 0;
    for (const auto& row : data_rows(good.out)) {
        const auto f = split_csv(row);
        REQUIRE(f.size() == 5);
        CHECK(f[4] == "true");
        ++checks;
    }
    CHECK(checks >= 10);

    // a sloppy propagator tolerance pushes invariant residuals past their
    // fixed thresholds
    const RunResult bad = run_cli("verify --profile " + profile("smooth_poly") +
                                  " --tol 1e-3 --scheme midpoint");
    CHECK(bad.code == 1);
    CHECK(bad.out.find(",false") != std::string::npos);
}
