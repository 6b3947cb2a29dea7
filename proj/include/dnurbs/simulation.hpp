#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dnurbs/errors.hpp"
#include "dnurbs/sim_config.hpp"

namespace dnurbs::sim {

struct TraceRecord {
    int step = 0;
    double t = 0.0;
    Vec3 point = Vec3::Zero();
    double amplitude = 0.0;  ///< y(track_u, t) - y(track_u, 0)
    int cg_iters = 0;
    double wall_time = 0.0;  ///< seconds spent in this step
};

inline constexpr const char* kTraceHeader = "step,t,x,y,z,amplitude,cg_iters,wall_time";

void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TraceRecord& r);

/// One control per line, "x y z w" at full double precision.
void write_state_dump(std::ostream& out, const GeneralizedState& state);
GeneralizedState read_state_dump(std::istream& in);

struct SimulationResult {
    std::vector<TraceRecord> trace;
    Eigen::VectorXd final_p;
    double max_constraint_residual = 0.0;  ///< max over steps of |A p + d|_inf
    double max_weight_deviation = 0.0;     ///< max over steps and controls of |w_i - w_i(0)|
};

/// Engine failure during a run; the trace up to the failing step has
/// already been written.
class SimulationAborted : public Error {
public:
    SimulationAborted(const std::string& what, int step) : Error(what), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

/// Run initialize + step loop. Rows are streamed to `trace_out` when given
/// (the CLI points it at the config's trace file).
SimulationResult run_simulation(const SimConfig& config, std::ostream* trace_out = nullptr);

/// Largest |amplitude| along a trace.
double peak_amplitude(const std::vector<TraceRecord>& trace);

/// Local maxima of |amplitude| in trace order.
std::vector<double> amplitude_peaks(const std::vector<TraceRecord>& trace);

enum class SweepParam { alpha, beta };
SweepParam parse_sweep_param(const std::string& name);

struct SweepEntry {
    double value = 0.0;
    SimulationResult result;
    double peak = 0.0;
};

/// One run per value with `param` overridden; results in value order.
std::vector<SweepEntry> run_sensitivity_sweep(const SimConfig& base, SweepParam param,
                                              const std::vector<double>& values);

struct BenchConfig {
    int order = 4;
    int quadrature_points = 5;
    std::vector<int> control_counts;
    int iterations = 360;
    int repeats = 1;          ///< best-of repeats per configuration
    double min_time = 0.01;   ///< seconds; shorter runs are retried with doubled iterations
};

struct RateRow {
    int j = 0;
    int n_controls = 0;
    int n_elements = 0;
    int iterations = 0;
    double T = 0.0;  ///< seconds
    double C = 0.0;  ///< iterations * n_e * n_g * n * k
    double P = 0.0;      ///< (T_{j+1} - T_j) / T_j, NaN for the last row
    double P_hat = 0.0;  ///< (C_{j+1} - C_j) / C_j, NaN for the last row
};

/// C = iterations * n_e * n_g * n * k.
double complexity_measure(int iterations, int n_elements, int quadrature_points, int n_controls, int order);

/// Fill P and P_hat from T and C.
void compute_rates(std::vector<RateRow>& rows);

/// Times `iterations` steps of a straight pinned wire for each control count.
/// Counts must be nondecreasing. Warnings go to `log` when given.
std::vector<RateRow> run_complexity_benchmark(const BenchConfig& cfg, std::ostream* log = nullptr);

void write_rate_table(std::ostream& out, const std::vector<RateRow>& rows);

}  // namespace dnurbs::sim
