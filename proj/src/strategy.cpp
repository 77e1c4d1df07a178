#include "thermo/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermo/optimize.hpp"

namespace thermo {

double StrategySchedule::gap_at(double t) const {
    double omega = segments.empty() ? 0.0 : segments.front().second;
    for (const auto& [start, w] : segments) {
        if (start > t) break;
        omega = w;
    }
    return omega;
}

GapOptimum optimize_gap_nonadaptive(const BathModel& model, const TemperatureGrid& grid) {
    // tau scales out of the long-time bound; optimize the coefficient at tau = 1.
    const auto objective = [&](double log_omega) {
        return crb_integral(model, std::exp(log_omega), 1.0, grid);
    };
    const double lo = std::log(1e-3 * grid.t_min());
    const double hi = std::log(1e2 * grid.t_max());
    const MinimizeResult res = brent_minimize(objective, lo, hi, 1e-6);
    GapOptimum opt;
    opt.omega_star = std::exp(res.x);
    opt.bound_value = res.value;
    opt.converged = res.converged;
    return opt;
}

AdaptiveRatio optimal_adaptive_ratio(const BathModel& model) {
    const bool bosonic = model.kind == BathKind::bosonic;
    const auto neg_g = [bosonic](double x) {
        return bosonic ? -fisher_rate_bosonic(x) : -fisher_rate_fermionic(x);
    };
    const MinimizeResult res = brent_minimize(neg_g, 1e-3, 50.0, 1e-9);
    return AdaptiveRatio{res.x, -res.value};
}

double adaptive_gap(double x_star, double t_estimate, double t_floor) {
    return x_star * std::max(t_estimate, t_floor);
}

NodeRateTable build_rate_table(const BathModel& model, double omega, const TemperatureGrid& grid) {
    NodeRateTable t;
    t.omega = omega;
    const std::size_t n = grid.size();
    t.gamma_in.resize(n);
    t.gamma_out.resize(n);
    t.ln_gamma_in.resize(n);
    t.ln_gamma_out.resize(n);
    t.ln_p0_thermal.resize(n);
    t.ln_p1_thermal.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TransitionRates r = rates(model, omega, grid.node(i));
        t.gamma_in[i] = r.gamma_in;
        t.gamma_out[i] = r.gamma_out;
        t.ln_gamma_in[i] = std::log(r.gamma_in);
        t.ln_gamma_out[i] = std::log(r.gamma_out);
        const double p1 = r.thermal_excited();
        t.ln_p1_thermal[i] = std::log(p1);
        t.ln_p0_thermal[i] = std::log(1.0 - p1);
    }
    return t;
}

EstimateAndCost relative_estimate_and_cost(const TemperatureGrid& grid,
                                           const std::vector<double>& log_weights) {
    const double m = *std::max_element(log_weights.begin(), log_weights.end());
    double z = 0.0, inv1 = 0.0, inv2 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid.weight(i) * std::exp(log_weights[i] - m);
        const double t = grid.node(i);
        z += w;
        inv1 += w / t;
        inv2 += w / (t * t);
    }
    EstimateAndCost out;
    out.estimate = inv1 / inv2;
    // E[((est - T)/T)^2] = est^2 E[1/T^2] - 2 est E[1/T] + 1
    out.cost = (out.estimate * out.estimate * inv2 - 2.0 * out.estimate * inv1) / z + 1.0;
    return out;
}

StrategyDriver::StrategyDriver(const BathModel& model, const TemperatureGrid& grid, double t_true,
                               double tau, StrategyMode mode, double update_interval,
                               double initial_omega, double x_star, rng::Stream& stream)
    : model_(model), grid_(grid), t_true_(t_true), tau_(tau), mode_(mode),
      update_interval_(update_interval), x_star_(x_star), stream_(stream) {
    if (!(tau > 0.0)) throw validation_error("tau", "tau must be > 0");
    if (mode == StrategyMode::adaptive && !(update_interval > 0.0))
        throw validation_error("update_interval", "adaptive mode needs update_interval > 0");

    table_ = build_rate_table(model_, initial_omega, grid_);
    true_rates_ = rates(model_, initial_omega, t_true_);
    log_weights_.assign(grid_.size(), -std::log(grid_.t_max() - grid_.t_min()));

    traj_.horizon = tau_;
    traj_.n0 = stream_.bernoulli(true_rates_.thermal_excited()) ? 1 : 0;
    state_ = traj_.n0;
    pending_jump_ = stream_.exponential(state_ == 0 ? true_rates_.gamma_in : true_rates_.gamma_out);
    next_update_ = (mode_ == StrategyMode::adaptive) ? update_interval_
                                                     : std::numeric_limits<double>::infinity();
    schedule_.mode = mode_;
    schedule_.segments.emplace_back(0.0, initial_omega);
}

void StrategyDriver::simulate_chunk(double t_stop) {
    if (t_stop <= t_now_) return;
    SufficientStats stats;
    double prev = t_now_;
    while (pending_jump_ < t_stop) {
        if (state_ == 1) stats.tau1 += pending_jump_ - prev;
        traj_.events.push_back(
            {pending_jump_, state_ == 0 ? JumpDirection::up : JumpDirection::down});
        if (state_ == 0) ++stats.k; else ++stats.l;
        prev = pending_jump_;
        state_ = 1 - state_;
        pending_jump_ += stream_.exponential(state_ == 0 ? true_rates_.gamma_in
                                                         : true_rates_.gamma_out);
    }
    if (state_ == 1) stats.tau1 += t_stop - prev;
    const double duration = t_stop - t_now_;
    t_now_ = t_stop;

    const double k = static_cast<double>(stats.k);
    const double l = static_cast<double>(stats.l);
    const double t0 = duration - stats.tau1;
    double max_lw = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        double lw = log_weights_[i] + k * table_.ln_gamma_in[i] + l * table_.ln_gamma_out[i] -
                    table_.gamma_in[i] * t0 - table_.gamma_out[i] * stats.tau1;
        if (first_chunk_)
            lw += (traj_.n0 == 1) ? table_.ln_p1_thermal[i] : table_.ln_p0_thermal[i];
        log_weights_[i] = lw;
        max_lw = std::max(max_lw, lw);
    }
    first_chunk_ = false;
    if (!std::isfinite(max_lw)) throw posterior_underflow(stats, duration);
    for (double& lw : log_weights_) lw -= max_lw;
}

void StrategyDriver::retune_gap() {
    const EstimateAndCost ec = relative_estimate_and_cost(grid_, log_weights_);
    trace_.emplace_back(t_now_, ec.estimate);
    const double omega = adaptive_gap(x_star_, ec.estimate, grid_.t_min());
    if (omega != table_.omega) {
        const double rate_old = (state_ == 0) ? true_rates_.gamma_in : true_rates_.gamma_out;
        table_ = build_rate_table(model_, omega, grid_);
        true_rates_ = rates(model_, omega, t_true_);
        const double rate_new = (state_ == 0) ? true_rates_.gamma_in : true_rates_.gamma_out;
        // Residual dwell is exponential; rescale to the new rate (exact, no redraw).
        pending_jump_ = t_now_ + (pending_jump_ - t_now_) * (rate_old / rate_new);
    }
    schedule_.segments.emplace_back(t_now_, omega);
}

void StrategyDriver::advance_to(double t) {
    t = std::min(t, tau_);
    while (t_now_ < t) {
        if (next_update_ < t && next_update_ < tau_) {
            simulate_chunk(next_update_);
            retune_gap();
            next_update_ += update_interval_;
        } else {
            simulate_chunk(t);
        }
    }
}

Posterior StrategyDriver::posterior() const {
    Posterior post{grid_, log_weights_};
    normalize(post);
    return post;
}

Trajectory StrategyDriver::trajectory() const {
    Trajectory t = traj_;
    t.horizon = t_now_;
    return t;
}

StrategyRunResult run_strategy(const BathModel& model, const TemperatureGrid& grid,
                               double t_true, double tau, StrategyMode mode,
                               double update_interval, rng::Stream& stream) {
    const GapOptimum opt = optimize_gap_nonadaptive(model, grid);
    const AdaptiveRatio ratio = optimal_adaptive_ratio(model);
    StrategyDriver driver(model, grid, t_true, tau, mode, update_interval, opt.omega_star,
                          ratio.x_star, stream);
    driver.advance_to(tau);

    StrategyRunResult result{driver.trajectory(), driver.schedule(), driver.posterior(), {}};
    result.estimate_trace = driver.estimate_trace();
    const EstimateAndCost final_ec = relative_estimate_and_cost(grid, driver.log_weights());
    result.estimate_trace.emplace_back(tau, final_ec.estimate);
    return result;
}

} // namespace thermo
