#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thermo/bath.hpp"
#include "thermo/detector.hpp"
#include "thermo/grid.hpp"
#include "thermo/strategy.hpp"

namespace thermo {

// Monte-Carlo experiment configuration shared by the ensemble drivers.
struct McConfig {
    BathModel bath{};
    double t_min = 0.1;
    double t_max = 10.0;
    std::size_t grid_nodes = 200;
    GridSpacing spacing = GridSpacing::log_uniform;
    StrategyMode strategy = StrategyMode::non_adaptive;
    std::size_t n_trajectories = 1000;
    double tau_max = 100.0;
    double update_interval = 0.0;          // adaptive retune cadence; 0 = tau_max / 100
    double gap = 0.0;                      // initial gap; 0 = non-adaptive optimum for the prior
    std::vector<double> sample_times;      // empty = 30 log-spaced per decade over 3 decades
    std::vector<double> true_temperatures; // bias sweep abscissae; empty = 35 log-spaced
    double t_true = 1.0;                   // fixed true temperature for the Gaussianity check
    std::optional<DetectorConfig> detector; // present = infer through the noisy register
    std::uint64_t master_seed = 1;
    std::size_t n_threads = 0;             // 0 = THERMO_THREADS env or hardware count

    void validate() const; // throws validation_error naming the offending field
};

// One sample time of the error-vs-time curve.
struct McCurvePoint {
    double tau = 0.0;
    double mean_dr = 0.0;      // ensemble mean presumed relative error (announced estimate)
    double stderr_dr = 0.0;
    double crb_nonadaptive = 0.0; // prior-averaged bound at the non-adaptive optimal gap
    double crb_adaptive = 0.0;    // prior-averaged bound with the gap tracking T
    double mean_true_err = 0.0;   // ensemble mean of ((estimate - T*)/T*)^2
    std::size_t n_failed = 0;
};

// One true temperature of the bias sweep.
struct BiasRow {
    double t_true = 0.0;
    double mean_ratio = 0.0; // mean of estimate / T*
    double std_ratio = 0.0;
    double true_rel_err = 0.0;        // mean((estimate - T*)^2) / T*^2
    double presumed_over_true = 0.0;  // mean presumed error / true_rel_err
    std::size_t n_failed = 0;
};

struct McResult {
    std::vector<McCurvePoint> curve;
    std::vector<BiasRow> bias;
    // Per-trajectory values at the final sample time (NaN for failed slots);
    // index = trajectory index, so paired comparisons across runs line up.
    std::vector<double> final_costs;
    std::vector<double> final_true_errs;
    double gap_used = 0.0;   // initial gap actually applied
    double x_star = 0.0;     // adaptive gap/estimate ratio in use
    std::size_t n_failed = 0;
    bool valid = true;       // false when more than 1% of trajectories failed
};

// Ensemble error-vs-time curve: per trajectory, draw T* from the flat prior,
// simulate under the strategy (through the detector register when configured),
// and evaluate the presumed relative error of the announced estimate at each
// sample time; attaches the prior-averaged bounds for both strategies.
// Per-trajectory failures (posterior underflow, filter underflow/instability)
// are excluded and counted, never fatal.
McResult run_error_curve(const McConfig& cfg);

// Fixed-true-temperature sweep: ensemble statistics of estimate/T*, the true
// relative error, and the presumed/true ratio at tau_max, for each entry of
// true_temperatures. Ideal or noisy path, both strategies.
McResult run_bias_sweep(const McConfig& cfg);

// Long-time posterior Gaussianity check at t_true.
struct BvmReport {
    double variance_ratio = 0.0; // ensemble mean of posterior variance x Fisher(T*)
    double mean_offset_sd = 0.0; // ensemble mean of (posterior mean - T*) / posterior sd
    double fisher_value = 0.0;   // Fisher information at (gap, t_true, tau_max)
    std::size_t n_runs = 0;
    std::size_t n_failed = 0;
    bool pre_asymptotic = false; // tau x total rate < 200: values reported, no assertion intended
};
BvmReport run_bvm_check(const McConfig& cfg);

// Curve CSV, header "tau,mean_DR,stderr_DR,crb_nonadaptive,crb_adaptive,n_failed".
void write_results_csv(std::ostream& out, const McResult& result);
void write_results_csv_file(const std::string& path, const McResult& result);

// Bias CSV, header "T_true,mean_ratio,std_ratio,true_rel_err,presumed_over_true".
void write_bias_csv(std::ostream& out, const McResult& result);
void write_bias_csv_file(const std::string& path, const McResult& result);

// Numerically stable ordered reduction used for all ensemble aggregation
// (pairwise split; independent of thread scheduling because inputs are
// slot-indexed before summation).
double pairwise_sum(const double* x, std::size_t n);

// Worker count resolution: explicit value, else THERMO_THREADS, else hardware.
std::size_t resolve_thread_count(std::size_t requested);

} // namespace thermo
