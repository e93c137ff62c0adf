#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cointurn/exact.hpp"
#include "cointurn/rng.hpp"
#include "cointurn/simulate.hpp"
#include "cointurn/stats.hpp"
#include "cointurn/verify.hpp"
#include "cointurn/version.hpp"
#include "cointurn/zigzag.hpp"

namespace {

using namespace cointurn;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Relative output paths land in $COINTURN_OUTDIR when it is set.
std::string resolve_out(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("COINTURN_OUTDIR");
    if (!dir || !*dir) return path;
    std::string base(dir);
    if (base.back() != '/') base += '/';
    return base + path;
}

struct Output {
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file.open(resolve_out(path));
            if (!file) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file.is_open() ? file : std::cout; }
    std::ofstream file;
};

void write_header(std::ostream& os, const std::string& config, std::uint64_t seed) {
    os << "# cointurn " << kVersion << "\n";
    os << "# config: " << config << "\n";
    os << "# masterSeed: " << seed << "\n";
}

// "0.1,0.5,1" -> grid values
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::string tok;
    std::istringstream is(text);
    while (std::getline(is, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

std::string read_schedule_arg(const std::string& arg) {
    if (!arg.empty() && arg.front() == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw std::invalid_argument("cannot open schedule file: " + arg.substr(1));
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return arg;
}

int run_exact(const std::string& schedule_arg, std::uint64_t n_min, std::uint64_t n_max,
              std::uint64_t step, double tol, const std::string& out_path) {
    const Schedule s = schedule_from_config(read_schedule_arg(schedule_arg));
    Output out(out_path);
    std::ostream& os = out.stream();
    std::ostringstream cfg;
    cfg << s.describe() << ",n_min=" << n_min << ",n_max=" << n_max << ",step=" << step
        << ",tol=" << fmt(tol);
    write_header(os, cfg.str(), 0);
    os << "n,p_n,a_n,v_n,Z,var_exact,ratio\n";

    ExactCache cache(s, tol);
    VarianceRecursion rec(s);
    for (std::uint64_t n = n_min; n <= n_max; n += step) {
        while (rec.n() < n) rec.advance();
        std::string a = "nan", v = "nan", z = "nan", ratio = "nan";
        try {
            const double an = cache.a(n);
            const double vn = cache.v(n);
            a = fmt(an);
            v = fmt(vn);
            ratio = fmt(an * an / vn);
        } catch (const CoefficientsDiverge&) {
        }
        try {
            z = std::to_string(cache.time_change(static_cast<double>(n)));
        } catch (const std::exception&) {
        }
        os << n << ',' << fmt(s.prob(n)) << ',' << a << ',' << v << ',' << z << ','
           << fmt(rec.variance()) << ',' << ratio << "\n";
    }
    return 0;
}

int run_simulate(const std::string& schedule_arg, std::uint64_t n, std::uint64_t trials,
                 std::uint64_t seed, const std::string& grid_text,
                 const std::string& mode_text, std::optional<std::uint64_t> scale,
                 std::optional<int> y1, const std::string& out_path) {
    const Schedule s = schedule_from_config(read_schedule_arg(schedule_arg));
    Output out(out_path);
    std::ostream& os = out.stream();
    std::ostringstream cfg;
    cfg << s.describe() << ",n=" << n << ",trials=" << trials << ",mode=" << mode_text;
    if (!grid_text.empty()) cfg << ",grid=" << grid_text;
    if (scale) cfg << ",scale=" << *scale;
    if (y1) cfg << ",y1=" << *y1;
    write_header(os, cfg.str(), seed);

    if (grid_text.empty()) {
        os << "trial,S_n,Y_n\n";
        const auto ends = sample_endpoints(s, n, trials, seed, y1);
        for (std::uint64_t i = 0; i < ends.size(); ++i)
            os << i << ',' << ends[i].s << ',' << static_cast<int>(ends[i].y) << "\n";
        return 0;
    }

    const std::vector<double> grid = parse_grid(grid_text);
    const RescaleMode mode =
        (mode_text == "diffusive") ? RescaleMode::diffusive : RescaleMode::cooling;
    ExactCache cache(s);
    os << "trial,t,value\n";
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const WalkPath w = sample_walk(s, n, derive_seed(seed, trial), y1);
        const RescaledPath path = rescaled_path(w, s, mode, grid, scale, &cache);
        for (const auto& [t, value] : path.samples)
            os << trial << ',' << fmt(t) << ',' << fmt(value) << "\n";
    }
    return 0;
}

int run_zigzag(double c, double T, double eps, std::uint64_t trials, std::uint64_t seed,
               const std::string& grid_text, const std::string& out_path) {
    Output out(out_path);
    std::ostream& os = out.stream();
    std::ostringstream cfg;
    cfg << "c=" << fmt(c) << ",T=" << fmt(T) << ",eps=" << fmt(eps)
        << ",trials=" << trials;
    if (!grid_text.empty()) cfg << ",grid=" << grid_text;
    write_header(os, cfg.str(), seed);

    if (grid_text.empty()) {
        os << "trial,endpoint,zeros,atoms\n";
        for (std::uint64_t trial = 0; trial < trials; ++trial) {
            const ZigzagPath z = sample_zigzag(c, T, eps, derive_seed(seed, trial));
            os << trial << ',' << fmt(z.value(T)) << ',' << z.zero_crossings(eps, T)
               << ',' << z.points().atoms.size() << "\n";
        }
        return 0;
    }
    const std::vector<double> grid = parse_grid(grid_text);
    os << "trial,t,value\n";
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const ZigzagPath z = sample_zigzag(c, T, eps, derive_seed(seed, trial));
        for (double t : grid) os << trial << ',' << fmt(t) << ',' << fmt(z.value(t)) << "\n";
    }
    return 0;
}

int run_verify(std::uint64_t seed, const std::string& only_text,
               const std::string& out_path) {
    std::vector<int> only;
    if (!only_text.empty()) {
        std::string tok;
        std::istringstream is(only_text);
        while (std::getline(is, tok, ','))
            if (!tok.empty()) only.push_back(std::stoi(tok));
    }
    const VerifyReport report = run_verification(seed, only);
    for (const CriterionResult& cr : report.criteria) {
        std::fprintf(stderr, "criterion %2d %s (%.2fs): %s\n", cr.number,
                     cr.passed ? "PASS" : "FAIL", cr.runtime_seconds, cr.name.c_str());
        for (const CheckResult& ck : cr.checks) {
            if (ck.passed) continue;
            if (ck.relation == "in")
                std::fprintf(stderr,
                             "    check %-8s measured %.6g, needs in [%.6g, %.6g]\n",
                             ck.id.c_str(), ck.measured, ck.threshold, ck.threshold_hi);
            else
                std::fprintf(stderr, "    check %-8s measured %.6g, needs %s %.6g\n",
                             ck.id.c_str(), ck.measured, ck.relation.c_str(),
                             ck.threshold);
        }
    }
    Output out(out_path);
    out.stream() << report_to_json(report);
    return report.all_passed ? 0 : 1;
}

int run_scan(const std::string& schedules_path, std::uint64_t horizon,
             const std::string& out_path) {
    std::ifstream in(schedules_path);
    if (!in)
        throw std::invalid_argument("cannot open schedules file: " + schedules_path);
    Output out(out_path);
    std::ostream& os = out.stream();
    write_header(os, "schedules=" + schedules_path + ",horizon=" + std::to_string(horizon),
                 0);
    os << "config,mixing,regime,sum_p,sum_q,sum_min_pq,turn_rate_at_horizon\n";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const Schedule s = schedule_from_config(line);
        const RegimeVerdict v = classify(s, horizon);
        os << '"' << s.describe() << "\"," << to_string(v.mixing) << ','
           << to_string(v.regime) << ',' << fmt(v.diagnostics.sum_p) << ','
           << fmt(v.diagnostics.sum_q) << ',' << fmt(v.diagnostics.sum_min_pq) << ','
           << fmt(v.diagnostics.turn_rate_at_horizon) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cointurn: simulation and exact analytics for turning-probability walks"};
    app.require_subcommand(1);

    std::string schedule_arg, out_path, grid_text, mode_text = "cooling", only_text;
    std::string schedules_path;
    std::uint64_t n = 1000, n_min = 1, n_max = 100, step = 1, trials = 1;
    std::uint64_t seed = kDefaultMasterSeed, horizon = 100000;
    double tol = 1e-6, c = 1.0, T = 1.0, eps = 1e-4;
    std::optional<std::uint64_t> scale;
    std::optional<int> y1;

    CLI::App* cmd_exact = app.add_subcommand("exact", "closed-form tables as CSV");
    cmd_exact->add_option("--schedule", schedule_arg, "schedule config (or @file)")
        ->required();
    cmd_exact->add_option("--n-min", n_min);
    cmd_exact->add_option("--n-max", n_max)->required();
    cmd_exact->add_option("--step", step);
    cmd_exact->add_option("--tol", tol);
    cmd_exact->add_option("--out", out_path);

    CLI::App* cmd_sim = app.add_subcommand("simulate", "seeded walk ensembles as CSV");
    cmd_sim->add_option("--schedule", schedule_arg)->required();
    cmd_sim->add_option("--n", n)->required();
    cmd_sim->add_option("--trials", trials)->required();
    cmd_sim->add_option("--seed", seed);
    cmd_sim->add_option("--grid", grid_text, "t values; omit for endpoint mode");
    cmd_sim->add_option("--mode", mode_text)->check(CLI::IsMember({"cooling", "diffusive"}));
    cmd_sim->add_option("--scale", scale);
    cmd_sim->add_option("--y1", y1)->check(CLI::IsMember({-1, 1}));
    cmd_sim->add_option("--out", out_path);

    CLI::App* cmd_zig = app.add_subcommand("zigzag", "continuum path sampler as CSV");
    cmd_zig->add_option("--c", c)->required();
    cmd_zig->add_option("--T", T);
    cmd_zig->add_option("--eps", eps);
    cmd_zig->add_option("--trials", trials)->required();
    cmd_zig->add_option("--seed", seed);
    cmd_zig->add_option("--grid", grid_text);
    cmd_zig->add_option("--out", out_path);

    CLI::App* cmd_verify = app.add_subcommand("verify", "run the verification suite");
    cmd_verify->add_option("--seed", seed);
    cmd_verify->add_option("--only", only_text, "comma-separated criterion numbers");
    cmd_verify->add_option("--out", out_path, "JSON report path (default stdout)");

    CLI::App* cmd_scan = app.add_subcommand("scan", "regime verdicts for a schedule list");
    cmd_scan->add_option("--schedules", schedules_path, "file with one config per line")
        ->required();
    cmd_scan->add_option("--horizon", horizon);
    cmd_scan->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_exact->parsed())
            return run_exact(schedule_arg, n_min, n_max, step, tol, out_path);
        if (cmd_sim->parsed())
            return run_simulate(schedule_arg, n, trials, seed, grid_text, mode_text,
                                scale, y1, out_path);
        if (cmd_zig->parsed())
            return run_zigzag(c, T, eps, trials, seed, grid_text, out_path);
        if (cmd_verify->parsed()) return run_verify(seed, only_text, out_path);
        if (cmd_scan->parsed()) return run_scan(schedules_path, horizon, out_path);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
