#include "thermo/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "thermo/crb.hpp"
#include "thermo/csv.hpp"
#include "thermo/estimators.hpp"
#include "thermo/fisher.hpp"
#include "thermo/likelihood.hpp"

namespace thermo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> default_sample_times(double tau_max) {
    // 30 log-spaced times per decade over the last three decades of tau.
    constexpr int per_decade = 30, decades = 3;
    constexpr int n = per_decade * decades;
    std::vector<double> times(n + 1);
    for (int j = 0; j <= n; ++j)
        times[j] = tau_max * std::pow(10.0, static_cast<double>(j - n) / per_decade);
    times.back() = tau_max;
    return times;
}

std::vector<double> default_true_temperatures(double t_min, double t_max) {
    constexpr int n = 35;
    std::vector<double> temps(n);
    const double la = std::log(t_min), lb = std::log(t_max);
    for (int j = 0; j < n; ++j)
        temps[j] = std::exp(la + (lb - la) * static_cast<double>(j) / (n - 1));
    temps.front() = t_min;
    temps.back() = t_max;
    return temps;
}

// Runs body(i) for i in [0, n) on the resolved worker count; results must go
// into slot-indexed storage so the outcome is independent of scheduling.
template <class Body>
void parallel_for(std::size_t n, std::size_t n_threads, const Body& body) {
    n_threads = std::min(n_threads, n);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<double>& buf) {
    if (buf.empty()) return kNaN;
    return pairwise_sum(buf.data(), buf.size()) / static_cast<double>(buf.size());
}

// Standard error of the mean (0 for fewer than two values).
double stderr_of(const std::vector<double>& buf, double mean) {
    const std::size_t n = buf.size();
    if (n < 2) return 0.0;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (buf[i] - mean) * (buf[i] - mean);
    const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    return std::sqrt(var / static_cast<double>(n));
}

double sample_sd(const std::vector<double>& buf, double mean) {
    const std::size_t n = buf.size();
    if (n < 2) return 0.0;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (buf[i] - mean) * (buf[i] - mean);
    return std::sqrt(pairwise_sum(sq.data(), n) / static_cast<double>(n - 1));
}

// Probe simulation + joint register filter driven together, mirroring the
// ideal-path StrategyDriver: advance to arbitrary times, retune the gap from
// the current filter estimate at the adaptive cadence. Gap changes take effect
// at register step boundaries; the pending probe dwell is redrawn at the new
// rates there (exact: the exponential dwell is memoryless).
class NoisyDriver {
public:
    NoisyDriver(const BathModel& model, const TemperatureGrid& grid, double t_true, double tau,
                StrategyMode mode, double update_interval, double initial_omega, double x_star,
                const DetectorConfig& det, rng::Stream& stream)
        : model_(model), grid_(grid), det_(det), t_true_(t_true), tau_(tau), mode_(mode),
          update_interval_(update_interval), x_star_(x_star), stream_(stream),
          table_(build_filter_table(model, initial_omega, grid, det.dt)),
          filter_(grid, table_) {
        n_steps_total_ = static_cast<std::size_t>(std::ceil(tau / det.dt * (1.0 - 1e-12)));
        sigma_ = det.gamma / (2.0 * std::sqrt(det.lambda)) * std::sqrt(det.dt);
        true_rates_ = rates(model_, initial_omega, t_true_);
        probe_ = stream_.bernoulli(true_rates_.thermal_excited()) ? 1 : 0;
        d_ = static_cast<double>(probe_);
        t_next_jump_ = stream_.exponential(exit_rate());
        next_update_ = (mode_ == StrategyMode::adaptive)
                           ? update_interval_
                           : std::numeric_limits<double>::infinity();
    }

    double time() const { return det_.dt * static_cast<double>(step_); }

    void advance_to(double t) {
        t = std::min(t, tau_);
        while (step_ < n_steps_total_ && time() < t) step_once();
    }

    std::vector<double> log_node_weights() const { return filter_.log_node_weights(); }
    double current_gap() const { return table_.omega; }

private:
    double exit_rate() const {
        return probe_ == 0 ? true_rates_.gamma_in : true_rates_.gamma_out;
    }

    void step_once() {
        const double t_k = time();
        // Probe jumps strictly before the step boundary happened at the old rates.
        while (t_next_jump_ <= t_k) {
            probe_ = 1 - probe_;
            t_next_jump_ += stream_.exponential(exit_rate());
        }
        while (t_k >= next_update_ && next_update_ < tau_) {
            retune(t_k);
            next_update_ += update_interval_;
        }
        const double d_next =
            d_ + det_.gamma * (static_cast<double>(probe_) - d_) * det_.dt + sigma_ * stream_.normal();
        const auto w = measurement_log_weights(d_next, d_, det_);
        filter_.step(table_, w);
        if (filter_.all_dead()) throw filter_underflow(step_ + 1);
        d_ = d_next;
        ++step_;
    }

    void retune(double t_k) {
        const EstimateAndCost ec = relative_estimate_and_cost(grid_, filter_.log_node_weights());
        const double omega = adaptive_gap(x_star_, ec.estimate, grid_.t_min());
        if (omega != table_.omega) {
            table_ = build_filter_table(model_, omega, grid_, det_.dt);
            true_rates_ = rates(model_, omega, t_true_);
            t_next_jump_ = t_k + stream_.exponential(exit_rate());
        }
    }

    const BathModel model_;
    const TemperatureGrid& grid_;
    const DetectorConfig det_;
    double t_true_, tau_;
    StrategyMode mode_;
    double update_interval_, x_star_;
    rng::Stream& stream_;

    FilterTable table_;
    FilterState filter_;
    TransitionRates true_rates_;
    std::size_t n_steps_total_ = 0;
    std::size_t step_ = 0;
    double sigma_ = 0.0;
    double d_ = 0.0;
    int probe_ = 0;
    double t_next_jump_ = 0.0;
    double next_update_ = 0.0;
};

struct EnsembleDefaults {
    TemperatureGrid grid;
    double omega0 = 0.0;
    double omega_star = 0.0;
    double x_star = 0.0;
    double c_star = 0.0;
    double update_interval = 0.0;
};

EnsembleDefaults resolve_defaults(const McConfig& cfg) {
    TemperatureGrid grid(cfg.t_min, cfg.t_max, cfg.grid_nodes, cfg.spacing);
    const GapOptimum opt = optimize_gap_nonadaptive(cfg.bath, grid);
    const AdaptiveRatio ratio = optimal_adaptive_ratio(cfg.bath);
    EnsembleDefaults d{std::move(grid), 0.0, opt.omega_star, ratio.x_star, ratio.c_star, 0.0};
    d.omega0 = cfg.gap > 0.0 ? cfg.gap : opt.omega_star;
    d.update_interval = cfg.update_interval > 0.0 ? cfg.update_interval : cfg.tau_max / 100.0;
    return d;
}

} // namespace

void McConfig::validate() const {
    if (n_trajectories < 1)
        throw validation_error("n_trajectories", "n_trajectories must be >= 1");
    if (!(tau_max > 0.0)) throw validation_error("tau", "tau must be > 0");
    if (!(update_interval >= 0.0))
        throw validation_error("update_interval", "update_interval must be >= 0");
    if (!(gap >= 0.0)) throw validation_error("gap", "gap must be >= 0");
    if (!(t_true > 0.0)) throw validation_error("temperature", "temperature must be > 0");
    double prev = 0.0;
    for (double t : sample_times) {
        if (!(t > prev))
            throw validation_error("sample_times", "sample times must be positive and increasing");
        if (t > tau_max * (1.0 + 1e-12))
            throw validation_error("sample_times", "sample times must not exceed tau");
        prev = t;
    }
    for (double t : true_temperatures)
        if (!(t > 0.0))
            throw validation_error("true_temperatures", "true temperatures must be > 0");
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

std::size_t resolve_thread_count(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("THERMO_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

McResult run_error_curve(const McConfig& cfg) {
    cfg.validate();
    const EnsembleDefaults ctx = resolve_defaults(cfg);
    const std::vector<double> times =
        cfg.sample_times.empty() ? default_sample_times(cfg.tau_max) : cfg.sample_times;
    const std::size_t n_times = times.size();
    const std::size_t n_traj = cfg.n_trajectories;

    std::vector<double> costs(n_traj * n_times, kNaN);
    std::vector<double> true_errs(n_traj * n_times, kNaN);
    std::vector<char> failed(n_traj, 0);

    parallel_for(n_traj, resolve_thread_count(cfg.n_threads), [&](std::size_t i) {
        rng::Stream stream = rng::Stream::derive(cfg.master_seed, i);
        const double t_star = stream.uniform(cfg.t_min, cfg.t_max);
        auto store = [&](std::size_t j, const EstimateAndCost& ec) {
            costs[i * n_times + j] = ec.cost;
            const double rel = (ec.estimate - t_star) / t_star;
            true_errs[i * n_times + j] = rel * rel;
        };
        try {
            if (cfg.detector) {
                NoisyDriver driver(cfg.bath, ctx.grid, t_star, cfg.tau_max, cfg.strategy,
                                   ctx.update_interval, ctx.omega0, ctx.x_star, *cfg.detector,
                                   stream);
                for (std::size_t j = 0; j < n_times; ++j) {
                    driver.advance_to(times[j]);
                    store(j, relative_estimate_and_cost(ctx.grid, driver.log_node_weights()));
                }
            } else {
                StrategyDriver driver(cfg.bath, ctx.grid, t_star, cfg.tau_max, cfg.strategy,
                                      ctx.update_interval, ctx.omega0, ctx.x_star, stream);
                for (std::size_t j = 0; j < n_times; ++j) {
                    driver.advance_to(times[j]);
                    store(j, relative_estimate_and_cost(ctx.grid, driver.log_weights()));
                }
            }
        } catch (const posterior_underflow&) {
            failed[i] = 1;
        } catch (const filter_underflow&) {
            failed[i] = 1;
        } catch (const ks_instability&) {
            failed[i] = 1;
        }
    });

    McResult result;
    result.gap_used = ctx.omega0;
    result.x_star = ctx.x_star;
    for (std::size_t i = 0; i < n_traj; ++i)
        if (failed[i]) ++result.n_failed;
    result.valid =
        static_cast<double>(result.n_failed) <= 0.01 * static_cast<double>(n_traj);

    result.curve.resize(n_times);
    std::vector<double> buf, buf_true;
    buf.reserve(n_traj);
    buf_true.reserve(n_traj);
    for (std::size_t j = 0; j < n_times; ++j) {
        buf.clear();
        buf_true.clear();
        for (std::size_t i = 0; i < n_traj; ++i) {
            if (failed[i]) continue;
            buf.push_back(costs[i * n_times + j]);
            buf_true.push_back(true_errs[i * n_times + j]);
        }
        McCurvePoint& pt = result.curve[j];
        pt.tau = times[j];
        pt.mean_dr = mean_of(buf);
        pt.stderr_dr = stderr_of(buf, pt.mean_dr);
        pt.mean_true_err = mean_of(buf_true);
        pt.crb_nonadaptive =
            crb_integral(cfg.bath, ctx.omega_star, times[j], ctx.grid, CrbFisher::long_time);
        pt.crb_adaptive = crb_adaptive_integral(cfg.bath, times[j], ctx.grid, ctx.c_star);
        pt.n_failed = result.n_failed;
    }

    result.final_costs.resize(n_traj);
    result.final_true_errs.resize(n_traj);
    for (std::size_t i = 0; i < n_traj; ++i) {
        result.final_costs[i] = failed[i] ? kNaN : costs[i * n_times + (n_times - 1)];
        result.final_true_errs[i] = failed[i] ? kNaN : true_errs[i * n_times + (n_times - 1)];
    }
    return result;
}

McResult run_bias_sweep(const McConfig& cfg) {
    cfg.validate();
    const EnsembleDefaults ctx = resolve_defaults(cfg);
    const std::vector<double> temps = cfg.true_temperatures.empty()
                                          ? default_true_temperatures(cfg.t_min, cfg.t_max)
                                          : cfg.true_temperatures;
    const std::size_t n_temps = temps.size();
    const std::size_t n_traj = cfg.n_trajectories;
    const std::size_t total = n_temps * n_traj;

    std::vector<double> estimates(total, kNaN);
    std::vector<double> presumed(total, kNaN);
    std::vector<char> failed(total, 0);

    parallel_for(total, resolve_thread_count(cfg.n_threads), [&](std::size_t idx) {
        const std::size_t ti = idx / n_traj;
        rng::Stream stream = rng::Stream::derive(cfg.master_seed, idx);
        const double t_star = temps[ti];
        try {
            EstimateAndCost ec;
            if (cfg.detector) {
                NoisyDriver driver(cfg.bath, ctx.grid, t_star, cfg.tau_max, cfg.strategy,
                                   ctx.update_interval, ctx.omega0, ctx.x_star, *cfg.detector,
                                   stream);
                driver.advance_to(cfg.tau_max);
                ec = relative_estimate_and_cost(ctx.grid, driver.log_node_weights());
            } else {
                StrategyDriver driver(cfg.bath, ctx.grid, t_star, cfg.tau_max, cfg.strategy,
                                      ctx.update_interval, ctx.omega0, ctx.x_star, stream);
                driver.advance_to(cfg.tau_max);
                ec = relative_estimate_and_cost(ctx.grid, driver.log_weights());
            }
            estimates[idx] = ec.estimate;
            presumed[idx] = ec.cost;
        } catch (const posterior_underflow&) {
            failed[idx] = 1;
        } catch (const filter_underflow&) {
            failed[idx] = 1;
        } catch (const ks_instability&) {
            failed[idx] = 1;
        }
    });

    McResult result;
    result.gap_used = ctx.omega0;
    result.x_star = ctx.x_star;
    result.bias.resize(n_temps);
    std::vector<double> ratios, trues, costs;
    for (std::size_t ti = 0; ti < n_temps; ++ti) {
        ratios.clear();
        trues.clear();
        costs.clear();
        std::size_t n_failed_t = 0;
        for (std::size_t i = 0; i < n_traj; ++i) {
            const std::size_t idx = ti * n_traj + i;
            if (failed[idx]) {
                ++n_failed_t;
                continue;
            }
            const double rel = (estimates[idx] - temps[ti]) / temps[ti];
            ratios.push_back(estimates[idx] / temps[ti]);
            trues.push_back(rel * rel);
            costs.push_back(presumed[idx]);
        }
        BiasRow& row = result.bias[ti];
        row.t_true = temps[ti];
        row.mean_ratio = mean_of(ratios);
        row.std_ratio = sample_sd(ratios, row.mean_ratio);
        row.true_rel_err = mean_of(trues);
        row.presumed_over_true = mean_of(costs) / row.true_rel_err;
        row.n_failed = n_failed_t;
        result.n_failed += n_failed_t;
    }
    result.valid = static_cast<double>(result.n_failed) <= 0.01 * static_cast<double>(total);
    return result;
}

BvmReport run_bvm_check(const McConfig& cfg) {
    cfg.validate();
    const EnsembleDefaults ctx = resolve_defaults(cfg);
    const double omega = ctx.omega0;
    const double t_star = cfg.t_true;
    const std::size_t n_runs = cfg.n_trajectories;

    BvmReport report;
    report.n_runs = n_runs;
    report.fisher_value =
        fisher_finite_time(cfg.bath, omega, t_star, cfg.tau_max, 0.0, FisherInit::thermal_steady_state)
            .total();
    const TransitionRates r = rates(cfg.bath, omega, t_star);
    report.pre_asymptotic = cfg.tau_max * r.total() < 200.0;

    std::vector<double> ratios(n_runs, kNaN), offsets(n_runs, kNaN);
    std::vector<char> failed(n_runs, 0);
    parallel_for(n_runs, resolve_thread_count(cfg.n_threads), [&](std::size_t i) {
        rng::Stream stream = rng::Stream::derive(cfg.master_seed, i);
        try {
            const Trajectory traj = sample_trajectory(cfg.bath, omega, t_star, cfg.tau_max,
                                                      InitMode::thermal, stream);
            Posterior post = flat_prior(ctx.grid);
            bayes_update(post, cfg.bath, omega, traj, InitMode::thermal);
            const double mean = post.expect([](double t) { return t; });
            const double second = post.expect([](double t) { return t * t; });
            const double var = second - mean * mean;
            ratios[i] = var * report.fisher_value;
            offsets[i] = (mean - t_star) / std::sqrt(var);
        } catch (const posterior_underflow&) {
            failed[i] = 1;
        }
    });

    std::vector<double> buf_r, buf_o;
    for (std::size_t i = 0; i < n_runs; ++i) {
        if (failed[i]) {
            ++report.n_failed;
            continue;
        }
        buf_r.push_back(ratios[i]);
        buf_o.push_back(offsets[i]);
    }
    report.variance_ratio = mean_of(buf_r);
    report.mean_offset_sd = mean_of(buf_o);
    return report;
}

void write_results_csv(std::ostream& out, const McResult& result) {
    out << "tau,mean_DR,stderr_DR,crb_nonadaptive,crb_adaptive,n_failed\n";
    for (const McCurvePoint& pt : result.curve)
        out << csv::g17(pt.tau) << "," << csv::g17(pt.mean_dr) << "," << csv::g17(pt.stderr_dr)
            << "," << csv::g17(pt.crb_nonadaptive) << "," << csv::g17(pt.crb_adaptive) << ","
            << pt.n_failed << "\n";
}

void write_results_csv_file(const std::string& path, const McResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_results_csv(out, result);
}

void write_bias_csv(std::ostream& out, const McResult& result) {
    out << "T_true,mean_ratio,std_ratio,true_rel_err,presumed_over_true\n";
    for (const BiasRow& row : result.bias)
        out << csv::g17(row.t_true) << "," << csv::g17(row.mean_ratio) << ","
            << csv::g17(row.std_ratio) << "," << csv::g17(row.true_rel_err) << ","
            << csv::g17(row.presumed_over_true) << "\n";
}

void write_bias_csv_file(const std::string& path, const McResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_bias_csv(out, result);
}

} // namespace thermo
