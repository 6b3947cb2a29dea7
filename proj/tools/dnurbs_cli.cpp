// Command-line driver: simulate, sweep, bench, verify.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dnurbs/simulation.hpp"
#include "dnurbs/verify.hpp"

using namespace dnurbs;
using namespace dnurbs::sim;

namespace {

struct CommonOptions {
    std::string config;
    std::string preset;
    int steps = 0;
    double dt = 0.0;
    double track_u = -1.0;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "key = value configuration file");
    cmd->add_option("--preset", o.preset, "built-in configuration")->check(CLI::IsMember({"wire"}));
    cmd->add_option("--steps", o.steps, "number of time steps")->check(CLI::PositiveNumber);
    cmd->add_option("--dt", o.dt, "time step in seconds")->check(CLI::PositiveNumber);
    cmd->add_option("--track-u", o.track_u, "curve parameter of the tracked point");
    cmd->add_option("--out", o.out, "output path");
}

SimConfig resolve_config(const CommonOptions& o) {
    // A config file alone starts from scratch; with --preset it overrides the preset.
    SimConfig cfg = (!o.config.empty() && o.preset.empty()) ? SimConfig{} : SimConfig::wire_preset();
    if (!o.config.empty()) cfg = load_config(o.config, cfg);
    if (o.steps > 0) cfg.steps = o.steps;
    if (o.dt > 0.0) cfg.dt = o.dt;
    if (o.track_u >= 0.0) cfg.track_u = o.track_u;
    return cfg;
}

std::vector<int> parse_counts(const std::string& spec) {
    std::vector<int> out;
    if (spec.find(':') != std::string::npos) {
        int a = 0, b = 0, s = 0;
        if (std::sscanf(spec.c_str(), "%d:%d:%d", &a, &b, &s) != 3 || s <= 0) {
            throw ConfigError("counts range must be first:last:step");
        }
        for (int m = a; m <= b; m += s) out.push_back(m);
        return out;
    }
    std::string t = spec;
    for (char& c : t) if (c == ',') c = ' ';
    std::istringstream in(t);
    for (int v; in >> v;) out.push_back(v);
    return out;
}

int cmd_simulate(const CommonOptions& o, const std::string& state_out) {
    SimConfig cfg = resolve_config(o);
    if (!o.out.empty()) cfg.trace_path = o.out;
    if (!state_out.empty()) cfg.state_path = state_out;

    std::ofstream trace_file;
    std::ostream* trace = &std::cout;
    if (!cfg.trace_path.empty()) {
        trace_file.open(cfg.trace_path);
        if (!trace_file) throw ConfigError("cannot write trace '" + cfg.trace_path + "'");
        trace = &trace_file;
    }
    const SimulationResult r = run_simulation(cfg, trace);
    if (!cfg.state_path.empty()) {
        std::ofstream s(cfg.state_path);
        write_state_dump(s, GeneralizedState(r.final_p));
    }
    std::cerr << "steps=" << cfg.steps << " t_end=" << r.trace.back().t << " peak_amplitude=" << peak_amplitude(r.trace)
              << " max_constraint_residual=" << r.max_constraint_residual << '\n';
    return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& param, const std::vector<double>& values) {
    const SimConfig base = resolve_config(o);
    const auto entries = run_sensitivity_sweep(base, parse_sweep_param(param), values);
    std::ofstream file;
    std::ostream* summary = &std::cout;
    if (!o.out.empty()) {
        std::filesystem::create_directories(o.out);
        for (const auto& e : entries) {
            std::ostringstream name;
            name << param << '_' << e.value << ".csv";
            std::ofstream t(std::filesystem::path(o.out) / name.str());
            write_trace_header(t);
            for (const auto& rec : e.result.trace) write_trace_row(t, rec);
        }
        file.open(std::filesystem::path(o.out) / "summary.csv");
        summary = &file;
    }
    *summary << "param,value,peak_amplitude\n";
    for (const auto& e : entries) *summary << param << ',' << e.value << ',' << e.peak << '\n';
    return 0;
}

int cmd_bench(const BenchConfig& bc, const std::string& out) {
    const auto rows = run_complexity_benchmark(bc, &std::cerr);
    if (out.empty()) {
        write_rate_table(std::cout, rows);
    } else {
        std::ofstream f(out);
        write_rate_table(f, rows);
    }
    return 0;
}

int cmd_verify(std::uint64_t seed) {
    bool ok = true;
    for (const auto& c : run_invariant_suite(seed)) {
        std::printf("[%s] %-42s %.3e (<= %.1e)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.threshold);
        ok = ok && c.pass;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic NURBS curve simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opts;
    std::string state_out;
    auto* simulate = app.add_subcommand("simulate", "run one simulation and write its trace");
    add_common(simulate, sim_opts);
    simulate->add_option("--state-out", state_out, "final control points and weights");

    CommonOptions sweep_opts;
    std::string param;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "vary alpha or beta and report peak amplitudes");
    add_common(sweep, sweep_opts);
    sweep->add_option("--param", param, "alpha or beta")->required()->check(CLI::IsMember({"alpha", "beta"}));
    sweep->add_option("--values", values, "parameter values")->delimiter(',');

    BenchConfig bench_cfg;
    std::string counts = "20:140:5";
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "runtime vs complexity rate study");
    bench->add_option("--order", bench_cfg.order, "spline order k")->check(CLI::Range(2, 10));
    bench->add_option("--quadrature", bench_cfg.quadrature_points, "Gauss points per element")
        ->check(CLI::PositiveNumber);
    bench->add_option("--counts", counts, "control counts, first:last:step or a list");
    bench->add_option("--iterations", bench_cfg.iterations, "time steps per configuration")
        ->check(CLI::PositiveNumber);
    bench->add_option("--repeats", bench_cfg.repeats, "best-of repeats")->check(CLI::PositiveNumber);
    bench->add_option("--out", bench_out, "rate table CSV");

    std::uint64_t seed = 7;
    auto* verify = app.add_subcommand("verify", "run the numerical invariant suite");
    verify->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(sim_opts, state_out);
        if (*sweep) return cmd_sweep(sweep_opts, param, values);
        if (*bench) {
            bench_cfg.control_counts = parse_counts(counts);
            return cmd_bench(bench_cfg, bench_out);
        }
        if (*verify) return cmd_verify(seed);
    } catch (const SimulationAborted& e) {
        std::cerr << "simulation aborted at step " << e.step() << ": " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
