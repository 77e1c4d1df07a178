// Acceptance gate: eleven end-to-end checks of the toolkit, one line each.
// Exit status 0 only if every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "thermo/crb.hpp"
#include "thermo/detector.hpp"
#include "thermo/estimators.hpp"
#include "thermo/fisher.hpp"
#include "thermo/harness.hpp"
#include "thermo/likelihood.hpp"
#include "thermo/posterior.hpp"
#include "thermo/strategy.hpp"
#include "thermo/trajectory.hpp"

namespace fs = std::filesystem;
using namespace thermo;

namespace {

const BathModel kBos(BathKind::bosonic, 1.0);
const BathModel kFerm(BathKind::fermionic, 1.0);

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return std::string(buf);
}

bool within(double value, double target, double tol) {
    return std::isfinite(value) && std::abs(value - target) <= tol;
}

// Analytic temperature derivative of the trajectory log-density (thermal entry).
double analytic_score(const BathModel& model, double omega, double temperature,
                      const Trajectory& traj) {
    const TransitionRates r = rates(model, omega, temperature);
    const SufficientStats s = sufficient_stats(traj);
    const double tau0 = traj.horizon - s.tau1;
    const double ds = r.dgamma_in_dT + r.dgamma_out_dT;
    const double init = traj.n0 == 1 ? r.dgamma_in_dT / r.gamma_in - ds / r.total()
                                     : r.dgamma_out_dT / r.gamma_out - ds / r.total();
    return init + static_cast<double>(s.k) * r.dgamma_in_dT / r.gamma_in +
           static_cast<double>(s.l) * r.dgamma_out_dT / r.gamma_out - r.dgamma_in_dT * tau0 -
           r.dgamma_out_dT * s.tau1;
}

double paired_z(const std::vector<double>& a, const std::vector<double>& b) {
    double mean = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isfinite(a[i]) && std::isfinite(b[i])) {
            mean += a[i] - b[i];
            ++n;
        }
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isfinite(a[i]) && std::isfinite(b[i])) {
            const double d = a[i] - b[i] - mean;
            var += d * d;
        }
    }
    var /= static_cast<double>(n - 1);
    return mean / std::sqrt(var / static_cast<double>(n));
}

double sup_density_gap(const Posterior& a, const Posterior& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.grid.size(); ++i)
        d = std::max(d, std::abs(a.density(i) - b.density(i)));
    return d;
}

// ---- 1, 2: optimal-gap summaries for both bath kinds ------------------------

bool check_optima(const BathModel& model, double w_ref, double coeff_ref, double coeff_tol,
                  double x_ref, double c_ref, double ad_ref, double ad_tol, std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const TemperatureGrid grid(0.1, 10.0, 400, GridSpacing::log_uniform);
    const GapOptimum opt = optimize_gap_nonadaptive(model, grid);
    const AdaptiveRatio ratio = optimal_adaptive_ratio(model);
    const double ad = crb_adaptive_integral(model, 1.0, grid, ratio.c_star);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    detail = fmt("omega*=%.6f coeff=%.6f x*=%.6f c*=%.6f adaptive=%.6f in %.3fs",
                 opt.omega_star, opt.bound_value, ratio.x_star, ratio.c_star, ad, seconds);
    return opt.converged && within(opt.omega_star, w_ref, 1e-3) &&
           within(opt.bound_value, coeff_ref, coeff_tol) && within(ratio.x_star, x_ref, 1e-3) &&
           within(ratio.c_star, c_ref, 1e-3) && within(ad, ad_ref, ad_tol) && seconds < 1.0;
}

bool crit_bosonic_optima(std::string& detail) {
    return check_optima(kBos, 0.4595, 0.4133, 1e-3, 2.4750, 1.5430, 0.3015, 1e-3, detail);
}

bool crit_fermionic_optima(std::string& detail) {
    return check_optima(kFerm, 1.5401, 132.79, 0.1, 2.6672, 0.3795, 2.6350, 5e-3, detail);
}

// ---- 3: closed form vs discrete recursion vs Monte-Carlo score variance -----

bool crit_fisher_triangle(std::string& detail) {
    struct Point {
        const BathModel* model;
        double omega, temperature;
        std::uint64_t seed;
    };
    const Point points[] = {{&kBos, 1.0, 1.0, 301}, {&kFerm, 1.5, 0.8, 302}};
    const double tau = 3.0;
    bool ok = true;
    detail.clear();

    for (const Point& p : points) {
        const TransitionRates r = rates(*p.model, p.omega, p.temperature);
        const double dt = 1e-4 / r.total();
        const long n_steps = std::lround(tau / dt);
        const double tau_used = dt * static_cast<double>(n_steps);

        const double closed =
            fisher_finite_time(*p.model, p.omega, p.temperature, tau_used, 0.0,
                               FisherInit::thermal_steady_state)
                .total();
        const double discrete = fisher_discrete(*p.model, p.omega, p.temperature, dt, n_steps,
                                                0.0, FisherInit::thermal_steady_state);
        const double rec_err = std::abs(discrete - closed) / closed;

        const std::size_t n_traj = 100000;
        long double sum = 0.0L, sum_sq = 0.0L;
        for (std::size_t i = 0; i < n_traj; ++i) {
            rng::Stream stream = rng::Stream::derive(p.seed, i);
            const Trajectory traj = sample_trajectory(*p.model, p.omega, p.temperature, tau_used,
                                                      InitMode::thermal, stream);
            const double s = analytic_score(*p.model, p.omega, p.temperature, traj);
            sum += s;
            sum_sq += static_cast<long double>(s) * s;
        }
        const double mean = static_cast<double>(sum) / static_cast<double>(n_traj);
        const double mc =
            static_cast<double>(sum_sq) / static_cast<double>(n_traj) - mean * mean;
        const double mc_err = std::abs(mc - closed) / closed;

        if (!detail.empty()) detail += "; ";
        detail += fmt("%s rec=%.2e mc=%.2e", p.model->kind == BathKind::bosonic ? "bos" : "ferm",
                      rec_err, mc_err);
        ok = ok && rec_err <= 1e-3 && mc_err <= 0.05;
    }
    return ok;
}

// ---- 4: maximum-likelihood closed form vs numeric argmax ---------------------

bool crit_ml_closed_form(std::string& detail) {
    const double omega = 1.0, tau = 20.0;
    double worst = 0.0;
    std::size_t done = 0, attempts = 0;
    while (done < 100 && attempts < 400) {
        rng::Stream stream = rng::Stream::derive(404, attempts++);
        const double t_true = stream.uniform(0.5, 3.0);
        const Trajectory traj =
            sample_trajectory(kBos, omega, t_true, tau, InitMode::thermal, stream);
        const SufficientStats s = sufficient_stats(traj);
        if (s.k == 0) continue; // frozen probe: the maximizer sits at T = 0
        ++done;

        const double ml = estimate_ml(traj, kBos, omega);
        const auto ll = [&](double log_t) {
            return log_likelihood_stats(s, traj.horizon, rates(kBos, omega, std::exp(log_t)), 0.0);
        };
        // Dense scan, then golden-section refinement of the bracketing interval.
        const double lo = std::log(0.05), hi = std::log(50.0);
        const int n_scan = 4000;
        int best = 0;
        double best_val = -1e308;
        for (int j = 0; j <= n_scan; ++j) {
            const double x = lo + (hi - lo) * j / n_scan;
            const double v = ll(x);
            if (v > best_val) {
                best_val = v;
                best = j;
            }
        }
        double a = lo + (hi - lo) * std::max(0, best - 1) / n_scan;
        double b = lo + (hi - lo) * std::min(n_scan, best + 1) / n_scan;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = ll(x1), f2 = ll(x2);
        while (b - a > 1e-12) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = ll(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = ll(x1);
            }
        }
        const double argmax = std::exp(0.5 * (a + b));
        worst = std::max(worst, std::abs(ml - argmax) / argmax);
    }
    detail = fmt("%zu trajectories, worst relative difference %.2e", done, worst);
    return done == 100 && worst <= 1e-6;
}

// ---- 5: announced estimates minimize their posterior costs -------------------

bool crit_estimator_optimality(std::string& detail) {
    const TemperatureGrid grid(0.1, 10.0, 300, GridSpacing::log_uniform);
    const TemperatureGrid scan_grid(0.1, 10.0, 400, GridSpacing::log_uniform);
    double worst = -1e308;
    for (std::size_t rep = 0; rep < 100; ++rep) {
        rng::Stream stream = rng::Stream::derive(505, rep);
        const BathModel& model = rep % 2 == 0 ? kBos : kFerm;
        const double t_true = stream.uniform(0.3, 5.0);
        const double tau = 2.0 + 0.3 * static_cast<double>(rep);
        const Trajectory traj =
            sample_trajectory(model, 0.8, t_true, tau, InitMode::thermal, stream);
        Posterior post = flat_prior(grid);
        bayes_update(post, model, 0.8, traj, InitMode::thermal);

        struct Case {
            double estimate;
            std::function<double(double)> cost;
        };
        const Case cases[] = {
            {estimate_relative(post), [&](double y) { return posterior_relative_cost(post, y); }},
            {estimate_mean(post), [&](double y) { return posterior_absolute_cost(post, y); }},
            {estimate_log(post), [&](double y) { return posterior_log_cost(post, y); }},
        };
        for (const Case& c : cases) {
            const double at_estimate = c.cost(c.estimate);
            double scan_min = 1e308;
            for (std::size_t j = 0; j < scan_grid.size(); ++j)
                scan_min = std::min(scan_min, c.cost(scan_grid.node(j)));
            worst = std::max(worst, at_estimate - scan_min);
        }
    }
    detail = fmt("worst excess cost over dense scan %.2e", worst);
    return worst <= 1e-8;
}

// ---- 6: ensemble near-saturation and the adaptive advantage ------------------

bool crit_ensemble_saturation(std::string& detail) {
    McConfig cfg;
    cfg.bath = kBos;
    cfg.grid_nodes = 200;
    cfg.n_trajectories = 1000;
    cfg.tau_max = 100.0;
    cfg.sample_times = {100.0};
    cfg.master_seed = 606;
    cfg.n_threads = 1;

    const McResult na = run_error_curve(cfg);
    McConfig ad_cfg = cfg;
    ad_cfg.strategy = StrategyMode::adaptive;
    const McResult ad = run_error_curve(ad_cfg);

    const double mean_na = na.curve.back().mean_dr;
    const double mean_ad = ad.curve.back().mean_dr;
    const double se_na = na.curve.back().stderr_dr;
    const double crb = na.curve.back().crb_nonadaptive;
    const double z = paired_z(na.final_costs, ad.final_costs);

    // The ensemble mean tracks the bound from below at finite time: the estimator
    // is pulled toward the prior box near its edges (it cannot announce values
    // outside the box), so the prior-averaged bound -- which assumes unbiasedness
    // everywhere -- can be undercut by the edge draws while every mid-box draw
    // saturates its own fixed-temperature bound. Both effects are checked: the
    // mean sits in a band around the bound and within two standard errors of it,
    // and the draws well inside the box saturate their pointwise bounds.
    const bool band_ok = mean_na >= 0.75 * crb && mean_na <= 1.25 * crb;
    const bool dominance_ok = mean_na >= crb - 2.0 * se_na;

    double cost_sum = 0.0, crb_sum = 0.0;
    std::size_t n_mid = 0;
    for (std::size_t i = 0; i < na.final_costs.size(); ++i) {
        rng::Stream s = rng::Stream::derive(cfg.master_seed, i);
        const double t_star = s.uniform(cfg.t_min, cfg.t_max); // the draw the run used
        if (t_star < 0.4 || t_star > 6.3 || !std::isfinite(na.final_costs[i])) continue;
        const TemperatureGrid point(t_star, t_star, 1, GridSpacing::log_uniform);
        cost_sum += na.final_costs[i];
        crb_sum += crb_integral(kBos, na.gap_used, cfg.tau_max, point, CrbFisher::long_time);
        ++n_mid;
    }
    const double mid_ratio = cost_sum / crb_sum;
    const bool mid_ok = n_mid >= 400 && mid_ratio >= 0.9 && mid_ratio <= 1.1;

    detail = fmt("nonadaptive=%.6f (%.3fx bound, >= bound-2se: %s), mid-box saturation "
                 "%.3f over %zu draws, adaptive=%.6f paired z=%.2f",
                 mean_na, mean_na / crb, dominance_ok ? "yes" : "NO", mid_ratio, n_mid, mean_ad,
                 z);
    return na.valid && ad.valid && na.n_failed == 0 && ad.n_failed == 0 && band_ok &&
           dominance_ok && mid_ok && mean_ad <= mean_na && z > 1.645;
}

// ---- 7: long-time posterior Gaussianity --------------------------------------

bool crit_posterior_gaussianity(std::string& detail) {
    McConfig cfg;
    cfg.bath = kBos;
    cfg.grid_nodes = 400;
    cfg.gap = 0.4595;
    cfg.t_true = 1.0;
    cfg.tau_max = 500.0;
    cfg.n_trajectories = 100;
    cfg.master_seed = 707;
    cfg.n_threads = 1;
    const BvmReport report = run_bvm_check(cfg);
    detail = fmt("variance x Fisher = %.4f (mean offset %.3f sd, %zu runs, %zu failed)",
                 report.variance_ratio, report.mean_offset_sd, report.n_runs, report.n_failed);
    return !report.pre_asymptotic && report.n_failed == 0 && report.variance_ratio >= 0.9 &&
           report.variance_ratio <= 1.1;
}

// ---- 8: register increment variance ------------------------------------------

bool crit_detector_variance(std::string& detail) {
    const DetectorConfig cfg(1.0, 1.0, 1e-3);
    rng::Stream stream(808);
    const Trajectory traj = sample_trajectory(kBos, 1.0, 1.0, 1000.0, InitMode::thermal, stream);
    const DetectorRecord rec = sample_record(traj, cfg, stream);
    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::size_t k = 0; k < rec.steps(); ++k) {
        const double dd = rec.samples[k + 1] - rec.samples[k];
        sum += dd;
        sum_sq += static_cast<long double>(dd) * dd;
    }
    const double n = static_cast<double>(rec.steps());
    const double mean = static_cast<double>(sum) / n;
    const double var = static_cast<double>(sum_sq) / n - mean * mean;
    const double expected = cfg.gamma * cfg.gamma * cfg.dt / (4.0 * cfg.lambda);
    const double rel = std::abs(var / cfg.dt - expected / cfg.dt) / (expected / cfg.dt);
    detail = fmt("Var/dt = %.5f vs %.5f (%.2f%% over %zu steps)", var / cfg.dt, expected / cfg.dt,
                 100.0 * rel, rec.steps());
    return rec.steps() == 1000000 && rel <= 0.02;
}

// ---- 9: discrete vs continuous filter, with step-size convergence ------------

bool crit_filter_cross_validation(std::string& detail) {
    const double omega = 0.4595, t_true = 1.0, tau = 5.0;
    const TemperatureGrid grid(0.1, 10.0, 120, GridSpacing::log_uniform);
    const std::uint64_t seeds[] = {901, 902, 903};

    // Agreement at the working step dt = 1e-3/gamma: the record is sampled at half
    // that step so both filters read a register consistent with a finer simulation.
    double worst_sup = 0.0;
    for (std::uint64_t seed : seeds) {
        rng::Stream stream(seed);
        const Trajectory traj =
            sample_trajectory(kBos, omega, t_true, tau, InitMode::thermal, stream);
        const DetectorRecord fine = sample_record(traj, DetectorConfig(5.0, 10.0, 5e-5), stream);
        DetectorRecord work;
        work.config = DetectorConfig(5.0, 10.0, 1e-4);
        for (std::size_t i = 0; i < fine.samples.size(); i += 2)
            work.samples.push_back(fine.samples[i]);
        worst_sup = std::max(worst_sup, sup_density_gap(noisy_posterior(work, kBos, omega, grid),
                                                        ks_filter(work, kBos, omega, grid)));
    }

    // Convergence order: against records sampled at h = 1.25e-5, the gap between
    // the two filters is dominated by the continuous scheme's own step error (the
    // matrix-exponential filter is near-exact at any step), so the gap must shrink
    // roughly linearly in dt. Individual seeds scatter strongly around the mean
    // order -- realisation-dependent cancellations move single-halving ratios well
    // outside [1,2] -- so the order is measured on the seed-pooled RMS gap across
    // three halvings, dt = 1e-4 down to dt = 1.25e-5.
    const double h = 1.25e-5;
    double rms_coarse = 0.0, rms_fine = 0.0;
    for (std::uint64_t seed : seeds) {
        rng::Stream stream(seed);
        const Trajectory traj =
            sample_trajectory(kBos, omega, t_true, tau, InitMode::thermal, stream);
        const DetectorRecord base = sample_record(traj, DetectorConfig(5.0, 10.0, h), stream);
        for (std::size_t stride : {8u, 1u}) {
            DetectorRecord rec;
            rec.config = DetectorConfig(5.0, 10.0, h * static_cast<double>(stride));
            for (std::size_t i = 0; i < base.samples.size(); i += stride)
                rec.samples.push_back(base.samples[i]);
            const double e = sup_density_gap(noisy_posterior(rec, kBos, omega, grid),
                                             ks_filter(rec, kBos, omega, grid));
            (stride == 8 ? rms_coarse : rms_fine) += e * e;
        }
    }
    const double order = std::log2(std::sqrt(rms_coarse / rms_fine)) / 3.0;
    detail = fmt("sup gap %.2e at dt=1e-4; pooled order %.2f per halving over dt 1e-4 -> 1.25e-5",
                 worst_sup, order);
    return worst_sup <= 1e-2 && order >= 0.4 && order <= 1.5;
}

// ---- 10: noisy-regime directions ---------------------------------------------

bool crit_noisy_directions(std::string& detail) {
    McConfig base;
    base.bath = kBos;
    base.grid_nodes = 80;
    base.n_trajectories = 60;
    base.tau_max = 100.0;
    base.sample_times = {100.0};
    base.master_seed = 1010;
    base.n_threads = 1;

    std::vector<McResult> runs;
    for (double lambda : {1.0, 5.0, 25.0}) {
        McConfig cfg = base;
        cfg.detector = DetectorConfig(lambda, 10.0, 5e-4);
        runs.push_back(run_error_curve(cfg));
    }
    const double m1 = runs[0].curve.back().mean_dr;
    const double m5 = runs[1].curve.back().mean_dr;
    const double m25 = runs[2].curve.back().mean_dr;
    const double z_strength = paired_z(runs[0].final_costs, runs[2].final_costs);

    const double crb = runs[2].curve.back().crb_nonadaptive;
    const double se25 = runs[2].curve.back().stderr_dr;
    const double z_gap = (m25 - crb) / se25;

    // Bias structure at the prior edges, at two measurement strengths. A cold draw
    // at the box floor rarely shows a transition within the horizon, and since the
    // estimate cannot leave the box the starved posterior spreads upward: the floor
    // ratio sits well above one and -- because starvation is a property of the
    // trajectory, not of the register -- is insensitive to the strength. Near the
    // ceiling the truncation acts the other way and weakens as the measurement
    // sharpens. Where the bias dominates, the announced posterior error understates
    // the realised error (presumed/true well below one at the floor).
    McConfig bias_cfg = base;
    bias_cfg.n_trajectories = 50;
    bias_cfg.sample_times.clear();
    bias_cfg.true_temperatures = {0.1, 9.5};
    McConfig weak = bias_cfg, strong = bias_cfg;
    weak.detector = DetectorConfig(25.0, 10.0, 4e-4);
    strong.detector = DetectorConfig(100.0, 10.0, 4e-4);
    const McResult bw = run_bias_sweep(weak);
    const McResult bs = run_bias_sweep(strong);
    const BiasRow &cold_w = bw.bias[0], &hot_w = bw.bias[1];
    const BiasRow &cold_s = bs.bias[0], &hot_s = bs.bias[1];
    const double root_n = std::sqrt(50.0);
    const double z_cold = (cold_w.mean_ratio - 1.0) / (cold_w.std_ratio / root_n);
    const double z_hot = (1.0 - hot_w.mean_ratio) / (hot_w.std_ratio / root_n);

    detail = fmt("means %.4f/%.4f/%.4f (z=%.1f), CRB gap z=%.1f; floor ratio %.3f/%.3f "
                 "(z=%.1f), ceiling |bias| %.3f->%.3f (z=%.1f), floor presumed/true %.2f/%.2f",
                 m1, m5, m25, z_strength, z_gap, cold_w.mean_ratio, cold_s.mean_ratio, z_cold,
                 std::abs(1.0 - hot_w.mean_ratio), std::abs(1.0 - hot_s.mean_ratio), z_hot,
                 cold_w.presumed_over_true, cold_s.presumed_over_true);
    bool ok = runs[0].n_failed == 0 && runs[1].n_failed == 0 && runs[2].n_failed == 0;
    ok = ok && m1 > m5 && m5 > m25 && z_strength > 1.645; // error decreases with strength
    ok = ok && z_gap > 1.645;                             // ideal bound not saturated
    ok = ok && bw.n_failed == 0 && bs.n_failed == 0;
    ok = ok && cold_w.mean_ratio > 1.1 && cold_s.mean_ratio > 1.1 && z_cold > 3.0;
    ok = ok && std::abs(cold_w.mean_ratio - cold_s.mean_ratio) < 0.05; // strength-insensitive
    ok = ok && z_hot > 2.0 &&
         std::abs(1.0 - hot_s.mean_ratio) < std::abs(1.0 - hot_w.mean_ratio);
    ok = ok && cold_w.presumed_over_true < 0.8 && cold_s.presumed_over_true < 0.8;
    return ok;
}

// ---- 11: byte-identical reruns of every stochastic subcommand ----------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool crit_seeded_reruns(std::string& detail) {
    const fs::path root =
        fs::temp_directory_path() / ("thermo_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(root);

    struct Case {
        const char* name;
        std::string args;
        std::vector<const char*> files;
    };
    const Case cases[] = {
        {"simulate", "simulate --gap 1 --temperature 1 --tau 5 --seed 101", {"trajectory.csv"}},
        {"montecarlo",
         "montecarlo --n 4 --tau 2 --nodes 60 --seed 102 --threads 1", {"results.csv"}},
        {"montecarlo-noisy",
         "montecarlo --n 2 --tau 1 --nodes 40 --noisy --seed 103 --threads 1", {"results.csv"}},
        {"noisy",
         "noisy --tau 1 --gap 0.46 --temperature 1 --nodes 60 --seed 104",
         {"record.csv", "posterior.csv"}},
        {"bias-sweep",
         "bias-sweep --n 3 --tau 2 --nodes 60 --true-temperature 0.5 --true-temperature 2 "
         "--seed 105 --threads 1",
         {"bias.csv"}},
    };

    bool ok = true;
    detail.clear();
    for (const Case& c : cases) {
        bool case_ok = true;
        fs::path dirs[2];
        for (int run = 0; run < 2; ++run) {
            dirs[run] = root / (std::string(c.name) + "_" + std::to_string(run));
            const std::string cmd = std::string("\"") + THERMOCTL_PATH + "\" " + c.args +
                                    " --out \"" + dirs[run].string() + "\" >\"" +
                                    (dirs[run].string() + ".stdout") + "\" 2>/dev/null";
            const int rc = std::system(cmd.c_str());
            case_ok = case_ok && rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
        }
        for (const char* f : c.files) {
            const std::string body0 = slurp(dirs[0] / f);
            case_ok = case_ok && !body0.empty() && body0 == slurp(dirs[1] / f);
        }
        if (!detail.empty()) detail += " ";
        detail += fmt("%s=%s", c.name, case_ok ? "ok" : "MISMATCH");
        ok = ok && case_ok;
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    return ok;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        bool (*run)(std::string&);
    };
    const Criterion criteria[] = {
        {"bosonic-prior-optima", crit_bosonic_optima},
        {"fermionic-prior-optima", crit_fermionic_optima},
        {"fisher-triangle", crit_fisher_triangle},
        {"ml-closed-form-vs-argmax", crit_ml_closed_form},
        {"estimator-cost-optimality", crit_estimator_optimality},
        {"ensemble-near-saturation-and-adaptive-gain", crit_ensemble_saturation},
        {"posterior-gaussianity", crit_posterior_gaussianity},
        {"detector-increment-variance", crit_detector_variance},
        {"filter-cross-validation", crit_filter_cross_validation},
        {"noisy-regime-directions", crit_noisy_directions},
        {"seeded-rerun-byte-identity", crit_seeded_reruns},
    };

    bool all_ok = true;
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = fmt("exception: %s", e.what());
        }
        std::printf("[%2zu/11] %s %s (%s)\n", i + 1, ok ? "PASS" : "FAIL", criteria[i].name,
                    detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
