#include "dnurbs/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dnurbs::sim {

namespace {

using Clock = std::chrono::steady_clock;

std::string format_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

StepContext make_context(const SimConfig& cfg, const KnotVector& kv, const GeneralizedState& s0) {
    return StepContext{kv,
                       cfg.params,
                       QuadratureRule::gauss_legendre(cfg.quadrature_size()),
                       gravity_density(cfg.params),
                       cfg.dt,
                       cfg.policy,
                       s0.p_w()};
}

}  // namespace

void write_trace_header(std::ostream& out) { out << kTraceHeader << '\n'; }

void write_trace_row(std::ostream& out, const TraceRecord& r) {
    out << r.step << ',' << format_double(r.t, 17) << ',' << format_double(r.point.x(), 17) << ','
        << format_double(r.point.y(), 17) << ',' << format_double(r.point.z(), 17) << ','
        << format_double(r.amplitude, 17) << ',' << r.cg_iters << ',' << format_double(r.wall_time, 9) << '\n';
}

void write_state_dump(std::ostream& out, const GeneralizedState& state) {
    out << "# x y z w\n";
    for (int i = 0; i < state.num_controls(); ++i) {
        const Vec3 p = state.point(i);
        out << format_double(p.x(), 17) << ' ' << format_double(p.y(), 17) << ' ' << format_double(p.z(), 17)
            << ' ' << format_double(state.weight(i), 17) << '\n';
    }
}

GeneralizedState read_state_dump(std::istream& in) {
    std::vector<double> vals;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ls(line);
        for (double v; ls >> v;) vals.push_back(v);
    }
    return GeneralizedState(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
}

SimulationResult run_simulation(const SimConfig& config, std::ostream* trace_out) {
    config.validate();
    const KnotVector kv = config.knot_vector();
    const GeneralizedState s0 = config.initial_state();
    const ConstraintSpec spec = config.constraint_spec();
    const ReductionMap reduction = build_reduction(spec);
    const Eigen::MatrixXd A = spec.A();
    const Eigen::VectorXd d = spec.d();
    const StepContext ctx = make_context(config, kv, s0);
    const Eigen::VectorXd w0 = s0.p_w();

    SimulationResult result;
    auto observe = [&](const Eigen::VectorXd& p) {
        if (A.rows() > 0) {
            result.max_constraint_residual =
                std::max(result.max_constraint_residual, (A * p + d).cwiseAbs().maxCoeff());
        }
        for (Eigen::Index i = 0; i < w0.size(); ++i) {
            result.max_weight_deviation = std::max(result.max_weight_deviation, std::abs(p[4 * i + 3] - w0[i]));
        }
    };

    SimState sim = initialize(s0, config.initial_velocity(), config.dt);
    const double y0 = eval_curve(s0, kv, config.track_u).y();
    result.trace.reserve(static_cast<std::size_t>(config.steps) + 1);
    result.trace.push_back({0, 0.0, eval_curve(s0, kv, config.track_u), 0.0, 0, 0.0});
    observe(sim.p_curr);
    if (trace_out) {
        write_trace_header(*trace_out);
        write_trace_row(*trace_out, result.trace.back());
    }

    for (int i = 1; i <= config.steps; ++i) {
        const auto start = Clock::now();
        StepOutcome outcome;
        try {
            outcome = step(sim, ctx, reduction, config.solver);
        } catch (const Error& e) {
            if (trace_out) trace_out->flush();
            throw SimulationAborted("step " + std::to_string(i) + ": " + e.what(), i);
        }
        const double wall = std::chrono::duration<double>(Clock::now() - start).count();
        sim = std::move(outcome.state);

        const Vec3 c = eval_curve(GeneralizedState(sim.p_curr), kv, config.track_u);
        result.trace.push_back({sim.step, sim.t, c, c.y() - y0, outcome.cg_iterations, wall});
        observe(sim.p_curr);
        if (trace_out) write_trace_row(*trace_out, result.trace.back());
    }
    if (trace_out) trace_out->flush();
    result.final_p = sim.p_curr;
    return result;
}

double peak_amplitude(const std::vector<TraceRecord>& trace) {
    double peak = 0.0;
    for (const auto& r : trace) peak = std::max(peak, std::abs(r.amplitude));
    return peak;
}

std::vector<double> amplitude_peaks(const std::vector<TraceRecord>& trace) {
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
        const double a = std::abs(trace[i].amplitude);
        if (a > std::abs(trace[i - 1].amplitude) && a >= std::abs(trace[i + 1].amplitude)) peaks.push_back(a);
    }
    return peaks;
}

SweepParam parse_sweep_param(const std::string& name) {
    if (name == "alpha") return SweepParam::alpha;
    if (name == "beta") return SweepParam::beta;
    throw ConfigError("sweep parameter must be alpha or beta, got '" + name + "'");
}

std::vector<SweepEntry> run_sensitivity_sweep(const SimConfig& base, SweepParam param,
                                              const std::vector<double>& values) {
    std::vector<SweepEntry> out;
    out.reserve(values.size());
    for (double v : values) {
        SimConfig cfg = base;
        (param == SweepParam::alpha ? cfg.params.alpha : cfg.params.beta) = v;
        SweepEntry entry;
        entry.value = v;
        entry.result = run_simulation(cfg);
        entry.peak = peak_amplitude(entry.result.trace);
        out.push_back(std::move(entry));
    }
    return out;
}

double complexity_measure(int iterations, int n_elements, int quadrature_points, int n_controls, int order) {
    return static_cast<double>(iterations) * n_elements * quadrature_points * n_controls * order;
}

void compute_rates(std::vector<RateRow>& rows) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (j + 1 < rows.size()) {
            rows[j].P = (rows[j + 1].T - rows[j].T) / rows[j].T;
            rows[j].P_hat = (rows[j + 1].C - rows[j].C) / rows[j].C;
        } else {
            rows[j].P = nan;
            rows[j].P_hat = nan;
        }
    }
}

namespace {

// Wall time of `iterations` steps on the prepared wire, setup excluded.
double time_steps(const SimConfig& cfg, int iterations) {
    const KnotVector kv = cfg.knot_vector();
    const GeneralizedState s0 = cfg.initial_state();
    const ReductionMap reduction = build_reduction(cfg.constraint_spec());
    const StepContext ctx = make_context(cfg, kv, s0);
    SimState sim = initialize(s0, cfg.initial_velocity(), cfg.dt);
    const auto start = Clock::now();
    for (int i = 0; i < iterations; ++i) sim = step(sim, ctx, reduction, cfg.solver).state;
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<RateRow> run_complexity_benchmark(const BenchConfig& cfg, std::ostream* log) {
    if (cfg.iterations < 1) throw ConfigError("benchmark iterations must be >= 1");
    if (cfg.repeats < 1) throw ConfigError("benchmark repeats must be >= 1");
    if (!std::is_sorted(cfg.control_counts.begin(), cfg.control_counts.end())) {
        throw ConfigError("benchmark control counts must be nondecreasing");
    }
    std::vector<RateRow> rows;
    int j = 1;
    for (int m : cfg.control_counts) {
        SimConfig wire = straight_wire(m, cfg.order);
        wire.quadrature_points = cfg.quadrature_points;
        wire.steps = cfg.iterations;
        wire.validate();

        RateRow row;
        row.j = j++;
        row.n_controls = m;
        row.n_elements = partition_elements(wire.knot_vector()).size();
        row.iterations = cfg.iterations;
        for (;;) {
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < cfg.repeats; ++r) best = std::min(best, time_steps(wire, row.iterations));
            row.T = best;
            if (row.T >= cfg.min_time || row.iterations > (1 << 24)) break;
            if (log) {
                *log << "warning: " << m << " controls ran " << row.iterations << " iterations in " << row.T
                     << " s (below " << cfg.min_time << " s); doubling iterations\n";
            }
            row.iterations *= 2;
        }
        row.C = complexity_measure(row.iterations, row.n_elements, cfg.quadrature_points, m, cfg.order);
        rows.push_back(row);
    }
    compute_rates(rows);
    return rows;
}

void write_rate_table(std::ostream& out, const std::vector<RateRow>& rows) {
    out << "j,n_controls,T,C,P,P_hat\n";
    for (const auto& r : rows) {
        out << r.j << ',' << r.n_controls << ',' << format_double(r.T, 9) << ',' << format_double(r.C, 17) << ',';
        if (!std::isnan(r.P)) out << format_double(r.P, 9);
        out << ',';
        if (!std::isnan(r.P_hat)) out << format_double(r.P_hat, 9);
        out << '\n';
    }
}

}  // namespace dnurbs::sim
