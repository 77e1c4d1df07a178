#pragma once

#include <vector>

#include "thermo/crb.hpp"
#include "thermo/estimators.hpp"
#include "thermo/posterior.hpp"
#include "thermo/trajectory.hpp"

namespace thermo {

enum class StrategyMode { non_adaptive, adaptive };

// Piecewise-constant gap schedule: segment i spans [t_start[i], t_start[i+1]).
struct StrategySchedule {
    StrategyMode mode = StrategyMode::non_adaptive;
    std::vector<std::pair<double, double>> segments; // (t_start, omega)

    double gap_at(double t) const;
};

struct GapOptimum {
    double omega_star = 0.0;
    double bound_value = 0.0; // minimum of tau * (Bayesian CRB), i.e. the bound coefficient
    bool converged = false;
};

// Minimizes the long-time Bayesian CRB over the gap (log-scaled bounded Brent).
// bound_value is the coefficient of 1/tau.
GapOptimum optimize_gap_nonadaptive(const BathModel& model, const TemperatureGrid& grid);

struct AdaptiveRatio {
    double x_star = 0.0; // optimal omega/T ratio
    double c_star = 0.0; // max of the dimensionless information rate g(x)
};

// Maximizes g(x) = T^2 F / (rate tau [T]) over x = omega/T.
AdaptiveRatio optimal_adaptive_ratio(const BathModel& model);

// Greedy adaptive rule: gap = x_star * estimate, floored at x_star * t_floor.
double adaptive_gap(double x_star, double t_estimate, double t_floor = 0.0);

struct StrategyRunResult {
    Trajectory trajectory;       // probe trajectory over [0, tau] under the realized schedule
    StrategySchedule schedule;   // realized gap segments
    Posterior posterior;         // final posterior
    std::vector<std::pair<double, double>> estimate_trace; // (t, relative-cost estimate)
};

// Per-gap node tables for fast repeated posterior updates on one grid.
struct NodeRateTable {
    double omega = 0.0;
    std::vector<double> gamma_in, gamma_out, ln_gamma_in, ln_gamma_out, ln_p0_thermal, ln_p1_thermal;
};
NodeRateTable build_rate_table(const BathModel& model, double omega, const TemperatureGrid& grid);

// estimate_relative and its presumed cost from unnormalized log-weights in one pass.
struct EstimateAndCost {
    double estimate = 0.0;
    double cost = 0.0;
};
EstimateAndCost relative_estimate_and_cost(const TemperatureGrid& grid,
                                           const std::vector<double>& log_weights);

// Incremental simulation + inference engine behind run_strategy. The harness
// drives it to arbitrary sample times; gap retunes happen automatically at the
// adaptive cadence. RNG consumption is chunk-boundary independent: each dwell
// draws one exponential, and a gap change rescales the pending dwell by the
// rate ratio (exact by memorylessness), so a non-adaptive run is bit-identical
// to sample_trajectory on the same stream.
class StrategyDriver {
public:
    StrategyDriver(const BathModel& model, const TemperatureGrid& grid, double t_true,
                   double tau, StrategyMode mode, double update_interval,
                   double initial_omega, double x_star, rng::Stream& stream);

    void advance_to(double t); // t nondecreasing, <= tau
    double time() const { return t_now_; }
    const std::vector<double>& log_weights() const { return log_weights_; }
    Posterior posterior() const; // normalized snapshot
    Trajectory trajectory() const;
    const StrategySchedule& schedule() const { return schedule_; }
    const std::vector<std::pair<double, double>>& estimate_trace() const { return trace_; }
    double current_gap() const { return table_.omega; }

private:
    void simulate_chunk(double t_stop); // advance probe + posterior to t_stop at the current gap
    void retune_gap();

    const BathModel model_;
    const TemperatureGrid grid_;
    double t_true_, tau_;
    StrategyMode mode_;
    double update_interval_, x_star_;
    rng::Stream& stream_;

    NodeRateTable table_;
    TransitionRates true_rates_;
    std::vector<double> log_weights_;
    Trajectory traj_;
    StrategySchedule schedule_;
    std::vector<std::pair<double, double>> trace_;
    double t_now_ = 0.0;
    double next_update_ = 0.0;
    double pending_jump_ = 0.0;
    int state_ = 0;
    bool first_chunk_ = true;
};

// Simulates the probe at true temperature t_true under the chosen strategy and
// carries the Bayesian posterior along. Gap updates happen every update_interval
// (adaptive mode); the probe state is continuous across segment boundaries, and
// segment likelihoods condition on the known entry state (thermal p(n0|T) factor
// on the first segment only).
StrategyRunResult run_strategy(const BathModel& model, const TemperatureGrid& grid,
                               double t_true, double tau, StrategyMode mode,
                               double update_interval, rng::Stream& stream);

} // namespace thermo
