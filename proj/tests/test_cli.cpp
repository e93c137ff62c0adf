// End-to-end checks of the command-line tool. The binary path arrives as the
// first command-line argument (wired up by ctest).
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <doctest.h>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

extern std::string g_cli_path;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe))
        r.out.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WEXITSTATUS(status);
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (std::getline(is, tok, sep)) out.push_back(tok);
    return out;
}

}  // namespace

TEST_CASE("cli binary path provided") { REQUIRE(!g_cli_path.empty()); }

TEST_CASE("exact subcommand emits the table") {
    const RunResult r = run("exact --schedule kind=constant,c=0.5 --n-max 20");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("# cointurn") == 0);
    CHECK(r.out.find("kind=constant") != std::string::npos);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 21);  // header row + 20 data rows
    CHECK(lines[0] == "n,p_n,a_n,v_n,Z,var_exact,ratio");
    // constant 1/2: a_n = 1, v_n = n, var = n, Z(n) = n
    const auto row = split(lines[10]);
    REQUIRE(row.size() == 7);
    CHECK(row[0] == "10");
    CHECK(std::stod(row[1]) == 0.5);
    CHECK(std::stod(row[2]) == 1.0);
    CHECK(std::stod(row[3]) == 10.0);
    CHECK(row[4] == "10");
    CHECK(std::stod(row[5]) == 10.0);
}

TEST_CASE("exact table shows the heating variance trend") {
    const RunResult r =
        run("exact --schedule kind=harmonic_heating,c=1 --n-min 40 --n-max 400 "
            "--step 360");
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 3);
    const double v40 = std::stod(split(lines[1])[3]);
    const double v400 = std::stod(split(lines[2])[3]);
    const double r40 = v40 / std::log(40.0);
    const double r400 = v400 / std::log(400.0);
    CHECK(r400 < r40);  // v_m / ln m settles toward c = 1
    CHECK(r400 > 0.8);
    CHECK(r400 < 1.4);
}

TEST_CASE("simulate endpoints are deterministic and complete") {
    const std::string args =
        "simulate --schedule kind=critical_cooling,c=1 --n 200 --trials 25 --seed 99";
    const RunResult a = run(args);
    const RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    const auto lines = data_lines(a.out);
    REQUIRE(lines.size() == 26);
    CHECK(lines[0] == "trial,S_n,Y_n");

    // a never-turning walk pinned to +1 marches straight up
    const RunResult up = run(
        "simulate --schedule kind=custom_table,tail=constant:0 --n 50 --trials 2 "
        "--seed 1 --y1 1");
    for (const auto& line : data_lines(up.out))
        if (line[0] != 't') CHECK(split(line)[1] == "50");
}

TEST_CASE("simulate path mode is 1-Lipschitz in t") {
    const RunResult r = run(
        "simulate --schedule kind=critical_cooling,c=1 --n 500 --trials 5 --seed 7 "
        "--mode cooling --grid 0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1");
    CHECK(r.exit_code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 56);
    double prev_t = 0.0, prev_v = 0.0;
    std::string prev_trial = "-";
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i]);
        REQUIRE(f.size() == 3);
        const double t = std::stod(f[1]), v = std::stod(f[2]);
        if (f[0] == prev_trial)
            CHECK(std::fabs(v - prev_v) <= std::fabs(t - prev_t) + 1e-9);
        prev_trial = f[0];
        prev_t = t;
        prev_v = v;
    }
}

TEST_CASE("zigzag subcommand") {
    const RunResult r = run("zigzag --c 2 --T 1 --eps 0.01 --trials 400 --seed 5");
    CHECK(r.exit_code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 401);
    CHECK(lines[0] == "trial,endpoint,zeros,atoms");
    double mean_atoms = 0.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i]);
        CHECK(std::fabs(std::stod(f[1])) <= 1.0 + 1e-12);
        mean_atoms += std::stod(f[3]);
    }
    mean_atoms /= 400.0;
    CHECK(mean_atoms > 0.75 * 2.0 * std::log(100.0));
    CHECK(mean_atoms < 1.25 * 2.0 * std::log(100.0));

    const RunResult grid =
        run("zigzag --c 1 --T 1 --eps 0.01 --trials 3 --seed 5 --grid 0.25,0.5,1");
    const auto glines = data_lines(grid.out);
    REQUIRE(glines.size() == 10);
    for (std::size_t i = 1; i < glines.size(); ++i) {
        const auto f = split(glines[i]);
        CHECK(std::fabs(std::stod(f[2])) <= std::stod(f[1]) + 1e-12);
    }

    const RunResult again =
        run("zigzag --c 1 --T 1 --eps 0.01 --trials 3 --seed 5 --grid 0.25,0.5,1");
    CHECK(again.out == grid.out);
}

TEST_CASE("verify subcommand exit codes and determinism") {
    // criterion 14 reruns a stochastic pipeline, so byte equality here
    // exercises the seeded sampling as well as the serialization
    const RunResult ok = run("verify --only 2,14 --out cli_report_a.json");
    CHECK(ok.exit_code == 0);
    const RunResult ok2 = run("verify --only 2,14 --out cli_report_b.json");
    CHECK(ok2.exit_code == 0);
    CHECK(slurp("cli_report_a.json") == slurp("cli_report_b.json"));
    CHECK(slurp("cli_report_a.json").find("\"all_passed\": true") != std::string::npos);
    std::remove("cli_report_a.json");
    std::remove("cli_report_b.json");

    // criterion 13 contains a check that is red by construction at desk
    // scale, so the exit code contract reports failure
    const RunResult bad = run("verify --only 13 --out cli_report_c.json");
    CHECK(bad.exit_code == 1);
    CHECK(slurp("cli_report_c.json").find("\"all_passed\": false") !=
          std::string::npos);
    std::remove("cli_report_c.json");
}

TEST_CASE("scan subcommand") {
    {
        std::ofstream f("cli_scan_input.txt");
        f << "kind=constant,c=0.3\n";
        f << "kind=power_cooling,a=1,gamma=0.5\n";
        f << "kind=custom_table,values=0.25;0.125;0.0625,tail=constant:0\n";
    }
    const RunResult r = run("scan --schedules cli_scan_input.txt --horizon 2000");
    CHECK(r.exit_code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[1].find("mixing,bounded-band") != std::string::npos);
    CHECK(lines[2].find("mixing,subcritical-cooling") != std::string::npos);
    CHECK(lines[3].find("non-mixing,lower-supercritical") != std::string::npos);
    std::remove("cli_scan_input.txt");
}

TEST_CASE("relative outputs land in COINTURN_OUTDIR") {
    REQUIRE(std::system("mkdir -p cli_outdir_test") == 0);
    const std::string cmd = "COINTURN_OUTDIR=cli_outdir_test " + g_cli_path +
                            " exact --schedule kind=constant,c=0.5 --n-max 3 "
                            "--out table.csv 2>/dev/null";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(slurp("cli_outdir_test/table.csv").find("n,p_n") != std::string::npos);
    std::remove("cli_outdir_test/table.csv");
    std::remove("cli_outdir_test");
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("exact --schedule kind=bogus --n-max 5").exit_code == 2);
    CHECK(run("exact --no-such-flag").exit_code == 2);
    CHECK(run("simulate --schedule kind=constant,c=0.3,oops=1 --n 5 --trials 1")
              .exit_code == 2);
}
