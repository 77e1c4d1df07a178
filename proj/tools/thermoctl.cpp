// Command-line front end: every subcommand is a thin adapter around the library
// (parameter resolution, file I/O, JSON summary). No numerics live here.
//
// Exit codes: 0 success, 2 parameter/validation problem (message names the
// offending field), 1 runtime failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "thermo/bath.hpp"
#include "thermo/config.hpp"
#include "thermo/crb.hpp"
#include "thermo/csv.hpp"
#include "thermo/detector.hpp"
#include "thermo/estimators.hpp"
#include "thermo/fisher.hpp"
#include "thermo/grid.hpp"
#include "thermo/harness.hpp"
#include "thermo/posterior.hpp"
#include "thermo/strategy.hpp"
#include "thermo/trajectory.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Resolution order for every parameter: command-line flag > config file > default.
template <class T>
T resolve(const CLI::Option* opt, const T& flag_value, const std::optional<T>& config_value,
          const T& fallback) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (config_value) return *config_value;
    return fallback;
}

thermo::BathKind bath_kind_from(const std::string& name) {
    if (name == "bosonic") return thermo::BathKind::bosonic;
    if (name == "fermionic") return thermo::BathKind::fermionic;
    throw thermo::validation_error("bath", "bath kind must be 'bosonic' or 'fermionic'");
}

const char* kind_name(const thermo::BathModel& model) {
    return model.kind == thermo::BathKind::bosonic ? "bosonic" : "fermionic";
}

thermo::StrategyMode strategy_from(const std::string& name) {
    if (name == "nonadaptive" || name == "non-adaptive") return thermo::StrategyMode::non_adaptive;
    if (name == "adaptive") return thermo::StrategyMode::adaptive;
    throw thermo::validation_error("strategy", "strategy must be 'nonadaptive' or 'adaptive'");
}

const char* strategy_name(thermo::StrategyMode mode) {
    return mode == thermo::StrategyMode::adaptive ? "adaptive" : "nonadaptive";
}

thermo::GridSpacing spacing_from(const std::string& name) {
    if (name == "log") return thermo::GridSpacing::log_uniform;
    if (name == "linear" || name == "uniform") return thermo::GridSpacing::uniform;
    throw thermo::validation_error("spacing", "spacing must be 'log' or 'linear'");
}

thermo::InitMode init_from(const std::string& name) {
    if (name == "thermal") return thermo::InitMode::thermal;
    if (name == "ground") return thermo::InitMode::fixed_ground;
    if (name == "excited") return thermo::InitMode::fixed_excited;
    throw thermo::validation_error("init", "init must be 'thermal', 'ground', or 'excited'");
}

void emit(const ordered_json& summary) { std::cout << summary.dump(2) << "\n"; }

// ---- reusable flag bundles -------------------------------------------------

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    CLI::Option* config_opt = nullptr;
    CLI::Option* out_opt = nullptr;

    void attach(CLI::App* sub) {
        config_opt = sub->add_option("--config", config_path,
                                     "JSON config file; explicit flags override its values");
        out_opt = sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    }
    thermo::RunConfig load() const {
        return config_opt->count() > 0 ? thermo::parse_run_config_file(config_path)
                                       : thermo::RunConfig{};
    }
    std::string path_for(const char* name) const {
        fs::create_directories(out_dir);
        return (fs::path(out_dir) / name).string();
    }
};

struct BathFlags {
    std::string kind = "bosonic";
    double coupling = 1.0;
    CLI::Option* kind_opt = nullptr;
    CLI::Option* coupling_opt = nullptr;

    void attach(CLI::App* sub) {
        kind_opt = sub->add_option("--bath", kind, "bath kind: bosonic|fermionic")
                       ->capture_default_str();
        coupling_opt =
            sub->add_option("--coupling", coupling, "bath coupling strength")->capture_default_str();
    }
    thermo::BathModel resolve_model(const thermo::RunConfig& cfg) const {
        const std::string k = resolve(kind_opt, kind, cfg.bath_kind, std::string("bosonic"));
        const double c = resolve(coupling_opt, coupling, cfg.coupling, 1.0);
        return thermo::BathModel(bath_kind_from(k), c);
    }
};

struct PriorFlags {
    double tmin = 0.1;
    double tmax = 10.0;
    std::uint64_t nodes = 200;
    std::string spacing = "log";
    CLI::Option *tmin_opt = nullptr, *tmax_opt = nullptr, *nodes_opt = nullptr,
                *spacing_opt = nullptr;

    void attach(CLI::App* sub, std::uint64_t default_nodes = 200) {
        nodes = default_nodes;
        tmin_opt = sub->add_option("--tmin", tmin, "prior lower edge")->capture_default_str();
        tmax_opt = sub->add_option("--tmax", tmax, "prior upper edge")->capture_default_str();
        nodes_opt =
            sub->add_option("--nodes", nodes, "temperature grid nodes")->capture_default_str();
        spacing_opt =
            sub->add_option("--spacing", spacing, "grid spacing: log|linear")->capture_default_str();
    }
    double resolve_tmin(const thermo::RunConfig& cfg) const {
        return resolve(tmin_opt, tmin, cfg.t_min, 0.1);
    }
    double resolve_tmax(const thermo::RunConfig& cfg) const {
        return resolve(tmax_opt, tmax, cfg.t_max, 10.0);
    }
    std::size_t resolve_nodes(const thermo::RunConfig& cfg) const {
        return static_cast<std::size_t>(resolve(nodes_opt, nodes, cfg.nodes,
                                                static_cast<std::uint64_t>(nodes)));
    }
    thermo::GridSpacing resolve_spacing(const thermo::RunConfig& cfg) const {
        return spacing_from(resolve(spacing_opt, spacing, cfg.spacing, std::string("log")));
    }
    thermo::TemperatureGrid resolve_grid(const thermo::RunConfig& cfg) const {
        return thermo::TemperatureGrid(resolve_tmin(cfg), resolve_tmax(cfg), resolve_nodes(cfg),
                                       resolve_spacing(cfg));
    }
};

struct SeedFlag {
    std::uint64_t seed = 0;
    CLI::Option* opt = nullptr;

    void attach(CLI::App* sub) {
        opt = sub->add_option("--seed", seed, "RNG seed (required: runs are reproducible, never ambient)");
    }
    std::uint64_t require(const thermo::RunConfig& cfg) const {
        if (opt->count() > 0) return seed;
        if (cfg.seed) return *cfg.seed;
        throw thermo::validation_error("seed", "seed is required for stochastic subcommands "
                                               "(pass --seed or set run.seed in the config)");
    }
};

struct DetectorFlags {
    double lambda = 5.0;
    double gamma = 10.0;
    double dt = 0.0; // 0 = 1e-3 / gamma
    CLI::Option *lambda_opt = nullptr, *gamma_opt = nullptr, *dt_opt = nullptr;

    void attach(CLI::App* sub) {
        lambda_opt =
            sub->add_option("--lambda", lambda, "measurement strength")->capture_default_str();
        gamma_opt = sub->add_option("--gamma", gamma, "detector bandwidth")->capture_default_str();
        dt_opt = sub->add_option("--dt", dt, "register step (default 1e-3/gamma)");
    }
    thermo::DetectorConfig resolve_config(const thermo::RunConfig& cfg) const {
        const double g = resolve(gamma_opt, gamma, cfg.gamma, 10.0);
        const double l = resolve(lambda_opt, lambda, cfg.lambda, 5.0);
        const double step = resolve(dt_opt, dt, cfg.dt, 1e-3 / g);
        return thermo::DetectorConfig(l, g, step);
    }
};

// ---- subcommands -----------------------------------------------------------

struct SimulateCmd {
    CommonFlags common;
    BathFlags bath;
    SeedFlag seed;
    double gap = 1.0, temperature = 1.0, tau = 10.0;
    std::string init = "thermal";
    CLI::Option *gap_opt = nullptr, *temp_opt = nullptr, *tau_opt = nullptr, *init_opt = nullptr;

    void attach(CLI::App* sub) {
        bath.attach(sub);
        gap_opt = sub->add_option("--gap", gap, "probe energy gap")->capture_default_str();
        temp_opt = sub->add_option("--temperature", temperature, "true bath temperature")
                       ->capture_default_str();
        tau_opt = sub->add_option("--tau", tau, "observation time")->capture_default_str();
        init_opt = sub->add_option("--init", init, "initial probe state: thermal|ground|excited")
                       ->capture_default_str();
        seed.attach(sub);
        common.attach(sub);
        sub->callback([this]() { run(); });
    }

    void run() {
        const thermo::RunConfig cfg = common.load();
        const thermo::BathModel model = bath.resolve_model(cfg);
        const double w = resolve(gap_opt, gap, cfg.gap, 1.0);
        const double t_true = resolve(temp_opt, temperature, cfg.temperature, 1.0);
        const double horizon = resolve(tau_opt, tau, cfg.tau, 10.0);
        const thermo::InitMode mode =
            init_from(resolve(init_opt, init, std::optional<std::string>{}, std::string("thermal")));
        const std::uint64_t s = seed.require(cfg);

        thermo::rng::Stream stream = thermo::rng::Stream::derive(s, 0);
        const thermo::Trajectory traj =
            thermo::sample_trajectory(model, w, t_true, horizon, mode, stream);
        const std::string traj_path = common.path_for("trajectory.csv");
        thermo::write_trajectory_csv_file(traj_path, traj);

        const thermo::SufficientStats st = thermo::sufficient_stats(traj);
        ordered_json summary;
        summary["command"] = "simulate";
        summary["schema_version"] = thermo::kConfigSchemaVersion;
        summary["bath"] = kind_name(model);
        summary["coupling"] = model.coupling;
        summary["gap"] = w;
        summary["temperature"] = t_true;
        summary["tau"] = horizon;
        summary["init"] = resolve(init_opt, init, std::optional<std::string>{}, std::string("thermal"));
        summary["seed"] = s;
        summary["n0"] = traj.n0;
        summary["k"] = st.k;
        summary["l"] = st.l;
        summary["tau1"] = st.tau1;
        summary["final_state"] = traj.final_state();
        summary["files"] = ordered_json{{"trajectory", traj_path}};
        emit(summary);
    }
};

struct EstimateCmd {
    CommonFlags common;
    BathFlags bath;
    PriorFlags prior;
    std::string traj_path;
    double gap = 1.0;
    std::string init = "thermal";
    CLI::Option *gap_opt = nullptr, *init_opt = nullptr;

    void attach(CLI::App* sub) {
        sub->add_option("--traj", traj_path, "trajectory CSV to analyze")->required();
        bath.attach(sub);
        gap_opt = sub->add_option("--gap", gap, "probe energy gap used during the run")
                      ->capture_default_str();
        prior.attach(sub, 400);
        init_opt = sub->add_option("--init", init, "initial-state model: thermal|ground|excited")
                       ->capture_default_str();
        common.attach(sub);
        sub->callback([this]() { run(); });
    }

    void run() {
        const thermo::RunConfig cfg = common.load();
        const thermo::BathModel model = bath.resolve_model(cfg);
        const double w = resolve(gap_opt, gap, cfg.gap, 1.0);
        const thermo::TemperatureGrid grid = prior.resolve_grid(cfg);
        const thermo::InitMode mode =
            init_from(resolve(init_opt, init, std::optional<std::string>{}, std::string("thermal")));

        const thermo::Trajectory traj = thermo::read_trajectory_csv_file(traj_path);
        thermo::Posterior post = thermo::flat_prior(grid);
        thermo::bayes_update(post, model, w, traj, mode);

        const double t_rel = thermo::estimate_relative(post);
        const double t_mean = thermo::estimate_mean(post);
        const double t_log = thermo::estimate_log(post);
        const double t_ml = thermo::estimate_ml(traj, model, w);
        const double t_mp = thermo::estimate_mp(traj, model, w, grid);

        const std::string post_path = common.path_for("posterior.csv");
        thermo::write_posterior_csv_file(post_path, post);

        ordered_json summary;
        summary["command"] = "estimate";
        summary["schema_version"] = thermo::kConfigSchemaVersion;
        summary["bath"] = kind_name(model);
        summary["coupling"] = model.coupling;
        summary["gap"] = w;
        summary["init"] = resolve(init_opt, init, std::optional<std::string>{}, std::string("thermal"));
        summary["prior"] = ordered_json{{"tmin", grid.t_min()},
                                        {"tmax", grid.t_max()},
                                        {"nodes", grid.size()}};
        summary["estimates"] = ordered_json{{"relative", t_rel},
                                            {"mean", t_mean},
                                            {"log", t_log},
                                            {"ml", t_ml},
                                            {"ml_boxed", t_mp}};
        summary["presumed_costs"] =
            ordered_json{{"relative", thermo::posterior_relative_cost(post, t_rel)},
                         {"absolute", thermo::posterior_absolute_cost(post, t_mean)},
                         {"log", thermo::posterior_log_cost(post, t_log)}};
        summary["files"] = ordered_json{{"posterior", post_path}};
        emit(summary);
    }
};

struct FisherCmd {
    CommonFlags common;
    BathFlags bath;
    double gap = 1.0, tau = 10.0, temperature = 1.0;
    double tmin = 0.1, tmax = 10.0;
    std::uint64_t num = 100;
    CLI::Option *gap_opt = nullptr, *tau_opt = nullptr, *temp_opt = nullptr, *tmin_opt = nullptr,
                *tmax_opt = nullptr, *num_opt = nullptr;

    void attach(CLI::App* sub) {
        bath.attach(sub);
        gap_opt = sub->add_option("--gap", gap, "probe energy gap")->capture_default_str();
        tau_opt = sub->add_option("--tau", tau, "observation time")->capture_default_str();
        temp_opt = sub->add_option("--temperature", temperature,
                                   "single temperature (omit for a sweep over [tmin,tmax])");
        tmin_opt = sub->add_option("--tmin", tmin, "sweep lower edge")->capture_default_str();
        tmax_opt = sub->add_option("--tmax", tmax, "sweep upper edge")->capture_default_str();
        num_opt = sub->add_option("--num", num, "sweep points")->capture_default_str();
        common.attach(sub);
        sub->callback([this]() { run(); });
    }

    void run() {
        const thermo::RunConfig cfg = common.load();
        const thermo::BathModel model = bath.resolve_model(cfg);
        const double w = resolve(gap_opt, gap, cfg.gap, 1.0);
        const double horizon = resolve(tau_opt, tau, cfg.tau, 10.0);

        std::vector<double> temps;
        if (temp_opt->count() > 0 || cfg.temperature) {
            temps.push_back(resolve(temp_opt, temperature, cfg.temperature, 1.0));
        } else {
            const double lo = resolve(tmin_opt, tmin, cfg.t_min, 0.1);
            const double hi = resolve(tmax_opt, tmax, cfg.t_max, 10.0);
            const auto n = static_cast<std::size_t>(
                resolve(num_opt, num, std::optional<std::uint64_t>{}, std::uint64_t{100}));
            if (n < 2) throw thermo::validation_error("num", "sweep needs at least 2 points");
            const thermo::TemperatureGrid sweep(lo, hi, n, thermo::GridSpacing::log_uniform);
            temps = sweep.nodes();
        }

        const std::string path = common.path_for("fisher.csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        out << "T,omega,tau,F_total,F_initial,F_linear\n";
        for (const double t : temps) {
            const thermo::FisherBreakdown b = thermo::fisher_finite_time(
                model, w, t, horizon, 0.0, thermo::FisherInit::thermal_steady_state);
            out << thermo::csv::g17(t) << "," << thermo::csv::g17(w) << ","
                << thermo::csv::g17(horizon) << "," << thermo::csv::g17(b.total()) << ","
                << thermo::csv::g17(b.initial_term) << "," << thermo::csv::g17(b.linear_term)
                << "\n";
        }
        out.close();

        ordered_json summary;
        summary["command"] = "fisher";
        summary["schema_version"] = thermo::kConfigSchemaVersion;
        summary["bath"] = kind_name(model);
        summary["coupling"] = model.coupling;
        summary["gap"] = w;
        summary["tau"] = horizon;
        summary["rows"] = temps.size();
        summary["files"] = ordered_json{{"fisher", path}};
        emit(summary);
    }
};

struct OptimizeGapCmd {
    CommonFlags common;
    BathFlags bath;
    PriorFlags prior;

    void attach(CLI::App* sub) {
        bath.attach(sub);
        prior.attach(sub, 400);
        common.attach(sub);
        sub->callback([this]() { run(); });
    }

    void run() {
        const thermo::RunConfig cfg = common.load();
        const thermo::BathModel model = bath.resolve_model(cfg);
        const thermo::TemperatureGrid grid = prior.resolve_grid(cfg);
        const thermo::GapOptimum opt = thermo::optimize_gap_nonadaptive(model, grid);
        const thermo::AdaptiveRatio ratio = thermo::optimal_adaptive_ratio(model);
        const double adaptive_coeff =
            thermo::crb_adaptive_integral(model, 1.0, grid, ratio.c_star);

        ordered_json summary;
        summary["command"] = "optimize-gap";
        summary["schema_version"] = thermo::kConfigSchemaVersion;
        summary["bath"] = kind_name(model);
        summary["coupling"] = model.coupling;
        summary["tmin"] = grid.t_min();
        summary["tmax"] = grid.t_max();
        summary["nodes"] = grid.size();
        summary["omega_star"] = opt.omega_star;
        summary["bound_coeff"] = opt.bound_value;
        summary["x_star"] = ratio.x_star;
        summary["c_star"] = ratio.c_star;
        summary["adaptive_bound_coeff"] = adaptive_coeff;
        summary["converged"] = opt.converged;
        emit(summary);
    }
};

struct MonteCarloCmd {
    CommonFlags common;
    BathFlags bath;
    PriorFlags prior;
    SeedFlag seed;
    DetectorFlags detector;
    std::string strategy = "nonadaptive";
    std::uint64_t n = 1000;
    double tau = 100.0, update_interval = 0.0, gap = 0.0;
    std::uint64_t threads = 0;
    bool noisy = false;
    CLI::Option *strategy_opt = nullptr, *n_opt = nullptr, *tau_opt = nullptr, *upd_opt = nullptr,
                *gap_opt = nullptr, *noisy_opt = nullptr;

    void attach(CLI::App* sub) {
        bath.attach(sub);
        prior.attach(sub, 200);
        strategy_opt = sub->add_option("--strategy", strategy, "nonadaptive|adaptive")
                           ->capture_default_str();
        n_opt = sub->add_option("--n", n, "ensemble size")->capture_default_str();
        tau_opt = sub->add_option("--tau", tau, "final observation time")->capture_default_str();
        upd_opt = sub->add_option("--update-interval", update_interval,
                                  "adaptive retune cadence (0 = tau/100)");
        gap_opt = sub->add_option("--gap", gap, "initial gap (0 = prior optimum)");
        noisy_opt = sub->add_flag("--noisy", noisy, "infer through the detector register");
        detector.attach(sub);
        sub->add_option("--threads", threads, "worker threads (0 = THERMO_THREADS or hardware)");
        seed.attach(sub);
        common.attach(sub);
        sub->callback([this]() { run(); });
    }

    thermo::McConfig build(const thermo::RunConfig& cfg) const {
        thermo::McConfig mc;
        mc.bath = bath.resolve_model(cfg);
        mc.t_min = prior.resolve_tmin(cfg);
        mc.t_max = prior.resolve_tmax(cfg);
        mc.grid_nodes = prior.resolve_nodes(cfg);
        mc.spacing = prior.resolve_spacing(cfg);
        mc.strategy = strategy_from(resolve(strategy_opt, strategy, cfg.strategy,
                                            std::string("nonadaptive")));
        mc.n_trajectories = static_cast<std::size_t>(
            resolve(n_opt, n, cfg.n_trajectories, std::uint64_t{1000}));
        mc.tau_max = resolve(tau_opt, tau, cfg.tau, 100.0);
        mc.update_interval = resolve(upd_opt, update_interval, cfg.update_interval, 0.0);
        mc.gap = resolve(gap_opt, gap, cfg.gap, 0.0);
        mc.sample_times = cfg.sample_times;
        mc.true_temperatures = cfg.true_temperatures;
        mc.master_seed = seed.require(cfg);
        mc.n_threads = static_cast<std::size_t>(threads);
        const bool use_detector = noisy_opt->count() > 0 ? noisy : cfg.has_detector;
        if (use_detector) mc.detector = detector.resolve_config(cfg);
        return mc;
    }

    void run() {
        const thermo::RunConfig cfg = common.load();
        const thermo::McConfig mc = build(cfg);
        const thermo::McResult result = thermo::run_error_curve(mc);
        const std::string path = common.path_for("results.csv");
        thermo::write_results_csv_file(path, result);

        const thermo::McCurvePoint& last = result.curve.back();
        ordered_json summary;
        summary["command"] = "montecarlo";
        summary["schema_version"] = thermo::kConfigSchemaVersion;
        summary["bath"] = kind_name(mc.bath);
        summary["strategy"] = strategy_name(mc.strategy);
        summary["noisy"] = mc.detector.has_value();
        summary["n_trajectories"] = mc.n_trajectories;
        summary["tau"] = mc.tau_max;
        summary["seed"] = mc.master_seed;
        summary["gap_used"] = result.gap_used;
        summary["x_star"] = result.x_star;
        summary["final"] = ordered_json{{"tau", last.tau},
                                        {"mean_DR", last.mean_dr},
                                        {"stderr_DR", last.stderr_dr},
                                        {"crb_nonadaptive", last.crb_nonadaptive},
                                        {"crb_adaptive", last.crb_adaptive}};
        summary["n_failed"] = result.n_failed;
        summary["valid"] = result.valid;
        summary["files"] = ordered_json{{"results", path}};
        emit(summary);
    }
};

struct NoisyCmd {
    CommonFlags common;
    BathFlags bath;
    PriorFlags prior;
    SeedFlag seed;
    DetectorFlags detector;
    double tau = 100.0, gap = 0.0, temperature = 1.0;
    std::string filter = "matrix";
    CLI::Option *tau_opt = nullptr, *gap_opt = nullptr, *temp_opt = nullptr, *filter_opt = nullptr;

    void attach(CLI::App* sub) {
        detector.attach(sub);
        tau_opt = sub->add_option("--tau", tau, "observation time")->capture_default_str();
        gap_opt = sub->add_option("--gap", gap, "probe energy gap (0 = prior optimum)");
        temp_opt = sub->add_option("--temperature", temperature, "true bath temperature")
                       ->capture_default_str();
        bath.attach(sub);
        prior.attach(sub, 200);
        filter_opt = sub->add_option("--filter", filter, "posterior filter: matrix|ks")
                         ->capture_default_str();
        seed.attach(sub);
        common.attach(sub);
        sub->callback([this]() { run(); });
    }

    void run() {
        const thermo::RunConfig cfg = common.load();
        const thermo::BathModel model = bath.resolve_model(cfg);
        const thermo::TemperatureGrid grid = prior.resolve_grid(cfg);
        const thermo::DetectorConfig det = detector.resolve_config(cfg);
        const double horizon = resolve(tau_opt, tau, cfg.tau, 100.0);
        const double t_true = resolve(temp_opt, temperature, cfg.temperature, 1.0);
        double w = resolve(gap_opt, gap, cfg.gap, 0.0);
        if (w <= 0.0) w = thermo::optimize_gap_nonadaptive(model, grid).omega_star;
        const std::string which =
            resolve(filter_opt, filter, std::optional<std::string>{}, std::string("matrix"));
        if (which != "matrix" && which != "ks")
            throw thermo::validation_error("filter", "filter must be 'matrix' or 'ks'");
        const std::uint64_t s = seed.require(cfg);

        thermo::rng::Stream stream = thermo::rng::Stream::derive(s, 0);
        const thermo::Trajectory traj =
            thermo::sample_trajectory(model, w, t_true, horizon, thermo::InitMode::thermal, stream);
        const thermo::DetectorRecord record = thermo::sample_record(traj, det, stream);
        const thermo::Posterior post = which == "ks"
                                           ? thermo::ks_filter(record, model, w, grid)
                                           : thermo::noisy_posterior(record, model, w, grid);
        const double est = thermo::estimate_relative(post);
        const double cost = thermo::posterior_relative_cost(post, est);

        const std::string record_path = common.path_for("record.csv");
        const std::string post_path = common.path_for("posterior.csv");
        thermo::write_record_csv_file(record_path, record);
        thermo::write_posterior_csv_file(post_path, post);

        ordered_json summary;
        summary["command"] = "noisy";
        summary["schema_version"] = thermo::kConfigSchemaVersion;
        summary["bath"] = kind_name(model);
        summary["coupling"] = model.coupling;
        summary["lambda"] = det.lambda;
        summary["gamma"] = det.gamma;
        summary["dt"] = det.dt;
        summary["tau"] = horizon;
        summary["gap"] = w;
        summary["temperature"] = t_true;
        summary["seed"] = s;
        summary["filter"] = which;
        summary["steps"] = record.steps();
        summary["estimate_relative"] = est;
        summary["presumed_relative_error"] = cost;
        summary["files"] = ordered_json{{"record", record_path}, {"posterior", post_path}};
        emit(summary);
    }
};

struct BiasSweepCmd {
    CommonFlags common;
    BathFlags bath;
    PriorFlags prior;
    SeedFlag seed;
    DetectorFlags detector;
    std::string strategy = "nonadaptive";
    std::uint64_t n = 200;
    double tau = 100.0, update_interval = 0.0, gap = 0.0;
    std::vector<double> true_temps;
    std::uint64_t threads = 0;
    bool noisy = false;
    CLI::Option *strategy_opt = nullptr, *n_opt = nullptr, *tau_opt = nullptr, *upd_opt = nullptr,
                *gap_opt = nullptr, *temps_opt = nullptr, *noisy_opt = nullptr;

    void attach(CLI::App* sub) {
        bath.attach(sub);
        prior.attach(sub, 200);
        strategy_opt = sub->add_option("--strategy", strategy, "nonadaptive|adaptive")
                           ->capture_default_str();
        n_opt = sub->add_option("--n", n, "trajectories per true temperature")
                    ->capture_default_str();
        tau_opt = sub->add_option("--tau", tau, "final observation time")->capture_default_str();
        upd_opt = sub->add_option("--update-interval", update_interval,
                                  "adaptive retune cadence (0 = tau/100)");
        gap_opt = sub->add_option("--gap", gap, "initial gap (0 = prior optimum)");
        temps_opt = sub->add_option("--true-temperature", true_temps,
                                    "true temperature (repeatable; default 35 log-spaced)");
        noisy_opt = sub->add_flag("--noisy", noisy, "infer through the detector register");
        detector.attach(sub);
        sub->add_option("--threads", threads, "worker threads (0 = THERMO_THREADS or hardware)");
        seed.attach(sub);
        common.attach(sub);
        sub->callback([this]() { run(); });
    }

    void run() {
        const thermo::RunConfig cfg = common.load();
        thermo::McConfig mc;
        mc.bath = bath.resolve_model(cfg);
        mc.t_min = prior.resolve_tmin(cfg);
        mc.t_max = prior.resolve_tmax(cfg);
        mc.grid_nodes = prior.resolve_nodes(cfg);
        mc.spacing = prior.resolve_spacing(cfg);
        mc.strategy = strategy_from(resolve(strategy_opt, strategy, cfg.strategy,
                                            std::string("nonadaptive")));
        mc.n_trajectories =
            static_cast<std::size_t>(resolve(n_opt, n, cfg.n_trajectories, std::uint64_t{200}));
        mc.tau_max = resolve(tau_opt, tau, cfg.tau, 100.0);
        mc.update_interval = resolve(upd_opt, update_interval, cfg.update_interval, 0.0);
        mc.gap = resolve(gap_opt, gap, cfg.gap, 0.0);
        mc.true_temperatures = temps_opt->count() > 0 ? true_temps : cfg.true_temperatures;
        mc.master_seed = seed.require(cfg);
        mc.n_threads = static_cast<std::size_t>(threads);
        const bool use_detector = noisy_opt->count() > 0 ? noisy : cfg.has_detector;
        if (use_detector) mc.detector = detector.resolve_config(cfg);

        const thermo::McResult result = thermo::run_bias_sweep(mc);
        const std::string path = common.path_for("bias.csv");
        thermo::write_bias_csv_file(path, result);

        ordered_json summary;
        summary["command"] = "bias-sweep";
        summary["schema_version"] = thermo::kConfigSchemaVersion;
        summary["bath"] = kind_name(mc.bath);
        summary["strategy"] = strategy_name(mc.strategy);
        summary["noisy"] = mc.detector.has_value();
        summary["n_temperatures"] = result.bias.size();
        summary["n_per_temperature"] = mc.n_trajectories;
        summary["tau"] = mc.tau_max;
        summary["seed"] = mc.master_seed;
        summary["gap_used"] = result.gap_used;
        summary["n_failed"] = result.n_failed;
        summary["valid"] = result.valid;
        summary["files"] = ordered_json{{"bias", path}};
        emit(summary);
    }
};

struct BvmCheckCmd {
    CommonFlags common;
    BathFlags bath;
    PriorFlags prior;
    SeedFlag seed;
    double gap = 0.0, temperature = 1.0, tau = 500.0;
    std::uint64_t n = 100;
    std::uint64_t threads = 0;
    CLI::Option *gap_opt = nullptr, *temp_opt = nullptr, *tau_opt = nullptr, *n_opt = nullptr;

    void attach(CLI::App* sub) {
        bath.attach(sub);
        prior.attach(sub, 400);
        gap_opt = sub->add_option("--gap", gap, "probe energy gap (0 = prior optimum)");
        temp_opt = sub->add_option("--temperature", temperature, "true bath temperature")
                       ->capture_default_str();
        tau_opt = sub->add_option("--tau", tau, "observation time")->capture_default_str();
        n_opt = sub->add_option("--n", n, "ensemble size")->capture_default_str();
        sub->add_option("--threads", threads, "worker threads (0 = THERMO_THREADS or hardware)");
        seed.attach(sub);
        common.attach(sub);
        sub->callback([this]() { run(); });
    }

    void run() {
        const thermo::RunConfig cfg = common.load();
        thermo::McConfig mc;
        mc.bath = bath.resolve_model(cfg);
        mc.t_min = prior.resolve_tmin(cfg);
        mc.t_max = prior.resolve_tmax(cfg);
        mc.grid_nodes = prior.resolve_nodes(cfg);
        mc.spacing = prior.resolve_spacing(cfg);
        mc.gap = resolve(gap_opt, gap, cfg.gap, 0.0);
        mc.t_true = resolve(temp_opt, temperature, cfg.temperature, 1.0);
        mc.tau_max = resolve(tau_opt, tau, cfg.tau, 500.0);
        mc.n_trajectories =
            static_cast<std::size_t>(resolve(n_opt, n, cfg.n_trajectories, std::uint64_t{100}));
        mc.master_seed = seed.require(cfg);
        mc.n_threads = static_cast<std::size_t>(threads);

        const thermo::BvmReport report = thermo::run_bvm_check(mc);

        ordered_json summary;
        summary["command"] = "bvm-check";
        summary["schema_version"] = thermo::kConfigSchemaVersion;
        summary["bath"] = kind_name(mc.bath);
        summary["temperature"] = mc.t_true;
        summary["tau"] = mc.tau_max;
        summary["n_runs"] = report.n_runs;
        summary["seed"] = mc.master_seed;
        summary["variance_ratio"] = report.variance_ratio;
        summary["mean_offset_sd"] = report.mean_offset_sd;
        summary["fisher"] = report.fisher_value;
        summary["n_failed"] = report.n_failed;
        summary["pre_asymptotic"] = report.pre_asymptotic;
        emit(summary);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-level probe thermometry: simulation, inference, and bounds"};
    app.require_subcommand(1);

    SimulateCmd simulate;
    EstimateCmd estimate;
    FisherCmd fisher;
    OptimizeGapCmd optimize_gap;
    MonteCarloCmd montecarlo;
    NoisyCmd noisy;
    BiasSweepCmd bias_sweep;
    BvmCheckCmd bvm_check;

    simulate.attach(app.add_subcommand("simulate", "sample one jump trajectory"));
    estimate.attach(app.add_subcommand("estimate", "posterior and point estimates from a trajectory"));
    fisher.attach(app.add_subcommand("fisher", "Fisher information table"));
    optimize_gap.attach(app.add_subcommand("optimize-gap", "optimal gap and bound coefficients"));
    montecarlo.attach(app.add_subcommand("montecarlo", "ensemble error-vs-time curve"));
    noisy.attach(app.add_subcommand("noisy", "detector record and filtered posterior"));
    bias_sweep.attach(app.add_subcommand("bias-sweep", "estimator bias across true temperatures"));
    bvm_check.attach(app.add_subcommand("bvm-check", "long-time posterior Gaussianity check"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const thermo::validation_error& e) {
        std::cerr << "validation error (" << e.field() << "): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
