#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermo/bath.hpp"
#include "thermo/grid.hpp"
#include "thermo/posterior.hpp"
#include "thermo/rng.hpp"
#include "thermo/strategy.hpp"
#include "thermo/trajectory.hpp"

namespace thermo {

// Finite-bandwidth Gaussian readout of the probe occupation. The register D
// follows  dD = gamma (n(t) - D) dt + (gamma / (2 sqrt(lambda))) dW  with
// D(0) = n(0): it fluctuates around 0 while the probe is in the ground state
// and around 1 while excited.
struct DetectorConfig {
    double lambda = 1.0; // measurement strength
    double gamma = 1.0;  // bandwidth
    double dt = 1e-3;    // register sampling step

    DetectorConfig() = default;
    // Validates positivity and the stability guards gamma*dt <= 0.05 and
    // lambda*dt <= 0.05 (first-order filters degrade beyond that).
    DetectorConfig(double lambda_, double gamma_, double dt_);
};

// Register samples D_k at times k*dt, k = 0..steps(); samples.size() = steps()+1.
struct DetectorRecord {
    DetectorConfig config;
    std::vector<double> samples;

    std::size_t steps() const { return samples.empty() ? 0 : samples.size() - 1; }
    double time_at(std::size_t i) const { return config.dt * static_cast<double>(i); }
    double duration() const { return time_at(steps()); }
};

// Euler-Maruyama integration of the register equation over [0, horizon]; the
// occupation n(t) is read from the trajectory at the left endpoint of each step.
// The record carries ceil(horizon/dt) steps, so it may overshoot the horizon by
// less than one step.
DetectorRecord sample_record(const Trajectory& traj, const DetectorConfig& cfg,
                             rng::Stream& stream);

// Log Gaussian weights of one register increment conditioned on the probe state
// held fixed over the step:
//   lw_n = -(2 lambda / (gamma^2 dt)) * (D - m_n)^2,
//   m_0 = D_prev e^{-gamma dt},  m_1 = m_0 + gamma dt.
// The common normalization prefactor sqrt(2 lambda / (pi gamma^2 dt)) is
// omitted: it is state- and temperature-independent and cancels when the
// posterior is normalized.
struct MeasurementLogWeights {
    double ground = 0.0;
    double excited = 0.0;
};
MeasurementLogWeights measurement_log_weights(double d, double d_prev, const DetectorConfig& cfg);

// Per-node constants for the filters at fixed (omega, dt): the exact two-state
// propagator entries over one step, the steady state, and the relaxation factor.
struct FilterTable {
    double omega = 0.0;
    double dt = 0.0;
    std::vector<double> k00, k01, k10, k11; // exact one-step transition matrix
    std::vector<double> pinf;               // steady-state excited occupation
    std::vector<double> decay;              // e^{-(gamma_in+gamma_out) dt}
};
FilterTable build_filter_table(const BathModel& model, double omega, const TemperatureGrid& grid,
                               double dt);

// All temperature nodes of the joint filter lost their mass.
class filter_underflow : public std::runtime_error {
public:
    explicit filter_underflow(std::size_t step)
        : std::runtime_error("joint filter underflow: every temperature node at zero mass "
                             "(step " + std::to_string(step) + ")"),
          step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// Joint distribution over (probe state, temperature node), held as unnormalized
// (p0, p1) pairs per node plus a per-node log scale that absorbs the running
// magnitude (flushed every few steps), i.e. log-space bookkeeping. A node whose
// total weight underflows to zero is frozen at log-zero mass.
class FilterState {
public:
    FilterState(const TemperatureGrid& grid, const FilterTable& table); // thermal occupation per node

    std::size_t size() const { return p0_.size(); }

    // One register increment: exact one-step propagator, then measurement weights.
    void step(const FilterTable& table, const MeasurementLogWeights& w);

    // Per-node log evidence: log(p0 + p1) + accumulated log scale.
    std::vector<double> log_node_weights() const;

    // Conditioned excited-state probability at node i.
    double excited_given_node(std::size_t i) const;

    bool node_dead(std::size_t i) const;
    bool all_dead() const { return all_dead_; }
    std::uint64_t steps_taken() const { return step_count_; }

private:
    void flush_scales();

    std::vector<double> p0_, p1_, log_scale_;
    std::uint64_t step_count_ = 0;
    bool all_dead_ = false;
};

// Temperature posterior from the exact discrete joint filter, flat prior over
// the grid box, thermal initial occupation at each node's own temperature.
// Throws filter_underflow if every node dies.
Posterior noisy_posterior(const DetectorRecord& record, const BathModel& model, double omega,
                          const TemperatureGrid& grid);

// Same, with a piecewise-constant gap schedule; gap changes take effect at the
// first register step boundary at or after their start time.
Posterior noisy_posterior(const DetectorRecord& record, const BathModel& model,
                          const StrategySchedule& schedule, const TemperatureGrid& grid);

// The continuous-time filter went numerically unstable (NaN or negative
// posterior mass); carries the step index. Reduce dt to recover.
class ks_instability : public std::runtime_error {
public:
    ks_instability(std::size_t step, const std::string& detail)
        : std::runtime_error("conditioned filter instability at step " + std::to_string(step) +
                             ": " + detail),
          step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// First-order continuous-time joint filter. Per step and per node: exact
// relaxation of the conditioned occupation toward the node's steady state, then
// the innovation correction  (4 lambda / gamma) q1 (1 - q1) (dD - gamma (q1 - D') dt);
// node masses are multiplied by  1 + (4 lambda / gamma) (q1 - q1bar) (dD - gamma (q1bar - D') dt)
// with q1bar the mass-weighted grid mean, and renormalized every step (the
// multiplicative form keeps the masses a probability vector and supplies the
// second-order Ito correction of the log-weight on its own). Masses start
// proportional to the grid quadrature weights (flat prior over the box), the
// occupation starts thermal per node. Throws ks_instability on NaN or negative
// mass, naming the step.
Posterior ks_filter(const DetectorRecord& record, const BathModel& model, double omega,
                    const TemperatureGrid& grid);

// Innovations of the single-temperature conditioned filter run at the given
// parameters, divided by their model standard deviation gamma sqrt(dt)/(2 sqrt(lambda)).
// With the true parameters these are white with mean 0 and unit variance.
std::vector<double> standardized_innovations(const DetectorRecord& record, const BathModel& model,
                                             double omega, double temperature);

// Telegraph reconstruction: threshold the register at 1/2; jumps are placed at
// the sample boundaries where the thresholded value changes. The strong-
//-measurement (lambda >> gamma) reference path.
Trajectory threshold_reconstruct(const DetectorRecord& record);

// Record CSV, header "time,D".
void write_record_csv(std::ostream& out, const DetectorRecord& record);
void write_record_csv_file(const std::string& path, const DetectorRecord& record);

} // namespace thermo
