#include "thermo/detector.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "thermo/csv.hpp"
#include "thermo/kernels.hpp"

namespace thermo {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kFlushPeriod = 32; // steps between log-scale flushes
} // namespace

DetectorConfig::DetectorConfig(double lambda_, double gamma_, double dt_)
    : lambda(lambda_), gamma(gamma_), dt(dt_) {
    if (!(lambda > 0.0)) throw validation_error("lambda", "measurement strength must be > 0");
    if (!(gamma > 0.0)) throw validation_error("gamma", "bandwidth must be > 0");
    if (!(dt > 0.0)) throw validation_error("dt", "time step must be > 0");
    if (!(gamma * dt <= 0.05))
        throw validation_error("dt", "gamma*dt must be <= 0.05 (stability guard)");
    if (!(lambda * dt <= 0.05))
        throw validation_error("dt", "lambda*dt must be <= 0.05 (stability guard)");
}

DetectorRecord sample_record(const Trajectory& traj, const DetectorConfig& cfg,
                             rng::Stream& stream) {
    traj.validate();
    const double dt = cfg.dt;
    // ceil with a relative backlash so an exact multiple does not gain a step.
    const auto n_steps =
        static_cast<std::size_t>(std::ceil(traj.horizon / dt * (1.0 - 1e-12)));

    DetectorRecord record;
    record.config = cfg;
    record.samples.resize(n_steps + 1);
    record.samples[0] = static_cast<double>(traj.n0);

    const double sigma = cfg.gamma / (2.0 * std::sqrt(cfg.lambda)) * std::sqrt(dt);
    auto next_event = traj.events.begin();
    int state = traj.n0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = dt * static_cast<double>(k);
        while (next_event != traj.events.end() && next_event->time <= t) {
            state = next_event->direction == JumpDirection::up ? 1 : 0;
            ++next_event;
        }
        const double d = record.samples[k];
        record.samples[k + 1] =
            d + cfg.gamma * (static_cast<double>(state) - d) * dt + sigma * stream.normal();
    }
    return record;
}

MeasurementLogWeights measurement_log_weights(double d, double d_prev, const DetectorConfig& cfg) {
    const double m0 = d_prev * std::exp(-cfg.gamma * cfg.dt);
    const double m1 = m0 + cfg.gamma * cfg.dt;
    const double prec = 2.0 * cfg.lambda / (cfg.gamma * cfg.gamma * cfg.dt);
    return {-prec * (d - m0) * (d - m0), -prec * (d - m1) * (d - m1)};
}

FilterTable build_filter_table(const BathModel& model, double omega, const TemperatureGrid& grid,
                               double dt) {
    const std::size_t n = grid.size();
    FilterTable table;
    table.omega = omega;
    table.dt = dt;
    table.k00.resize(n);
    table.k01.resize(n);
    table.k10.resize(n);
    table.k11.resize(n);
    table.pinf.resize(n);
    table.decay.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TransitionRates r = rates(model, omega, grid.node(i));
        const double pinf = r.thermal_excited();
        const double decay = std::exp(-r.total() * dt);
        const double up = pinf * (1.0 - decay);          // P(0 -> 1)
        const double down = (1.0 - pinf) * (1.0 - decay); // P(1 -> 0)
        table.k00[i] = 1.0 - up;
        table.k01[i] = down;
        table.k10[i] = up;
        table.k11[i] = 1.0 - down;
        table.pinf[i] = pinf;
        table.decay[i] = decay;
    }
    return table;
}

FilterState::FilterState(const TemperatureGrid& grid, const FilterTable& table)
    : p0_(grid.size()), p1_(grid.size()), log_scale_(grid.size(), 0.0) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        p1_[i] = table.pinf[i];
        p0_[i] = 1.0 - table.pinf[i];
    }
}

void FilterState::step(const FilterTable& table, const MeasurementLogWeights& w) {
    // The larger log weight is factored out so the in-array values stay near 1;
    // it goes into every live node's scale (a common factor, harmless to the
    // posterior but needed for absolute evidence values).
    const double lw_max = w.ground > w.excited ? w.ground : w.excited;
    const double w0 = std::exp(w.ground - lw_max);
    const double w1 = std::exp(w.excited - lw_max);
    kernels::active_table().mm_step(p0_.data(), p1_.data(), table.k00.data(), table.k01.data(),
                                    table.k10.data(), table.k11.data(), w0, w1, p0_.size());
    for (double& s : log_scale_)
        if (s != kNegInf) s += lw_max;
    ++step_count_;
    if (step_count_ % kFlushPeriod == 0) flush_scales();
}

void FilterState::flush_scales() {
    bool any_alive = false;
    for (std::size_t i = 0; i < p0_.size(); ++i) {
        const double m = p0_[i] + p1_[i];
        if (!(m > 0.0) || !std::isfinite(m)) {
            p0_[i] = 0.0;
            p1_[i] = 0.0;
            log_scale_[i] = kNegInf;
            continue;
        }
        p0_[i] /= m;
        p1_[i] /= m;
        log_scale_[i] += std::log(m);
        any_alive = true;
    }
    all_dead_ = !any_alive;
}

std::vector<double> FilterState::log_node_weights() const {
    std::vector<double> out(p0_.size());
    for (std::size_t i = 0; i < p0_.size(); ++i) {
        const double m = p0_[i] + p1_[i];
        out[i] = (m > 0.0 && std::isfinite(m)) ? log_scale_[i] + std::log(m) : kNegInf;
    }
    return out;
}

double FilterState::excited_given_node(std::size_t i) const {
    const double m = p0_[i] + p1_[i];
    return m > 0.0 ? p1_[i] / m : 0.0;
}

bool FilterState::node_dead(std::size_t i) const {
    return log_scale_[i] == kNegInf || !(p0_[i] + p1_[i] > 0.0);
}

namespace {

Posterior finalize_filter(const FilterState& state, const TemperatureGrid& grid,
                          std::size_t n_steps) {
    Posterior post{grid, state.log_node_weights()};
    bool any = false;
    for (double v : post.log_weights)
        if (v != kNegInf) any = true;
    if (!any) throw filter_underflow(n_steps);
    normalize(post);
    return post;
}

} // namespace

Posterior noisy_posterior(const DetectorRecord& record, const BathModel& model, double omega,
                          const TemperatureGrid& grid) {
    StrategySchedule schedule;
    schedule.segments.emplace_back(0.0, omega);
    return noisy_posterior(record, model, schedule, grid);
}

Posterior noisy_posterior(const DetectorRecord& record, const BathModel& model,
                          const StrategySchedule& schedule, const TemperatureGrid& grid) {
    FilterTable table = build_filter_table(model, schedule.gap_at(0.0), grid, record.config.dt);
    FilterState state(grid, table);
    const std::size_t n_steps = record.steps();
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double gap = schedule.gap_at(record.time_at(k));
        if (gap != table.omega) table = build_filter_table(model, gap, grid, record.config.dt);
        const auto w =
            measurement_log_weights(record.samples[k + 1], record.samples[k], record.config);
        state.step(table, w);
        if (state.all_dead()) throw filter_underflow(k + 1);
    }
    return finalize_filter(state, grid, n_steps);
}

Posterior ks_filter(const DetectorRecord& record, const BathModel& model, double omega,
                    const TemperatureGrid& grid) {
    const std::size_t n = grid.size();
    const double dt = record.config.dt;
    const double gamma = record.config.gamma;
    const double gain = 4.0 * record.config.lambda / gamma;
    const FilterTable table = build_filter_table(model, omega, grid, dt);
    const auto& kern = kernels::active_table();

    // Node masses start proportional to the quadrature weights: equal density
    // across nodes, i.e. the same flat prior the discrete filter starts from.
    std::vector<double> mass(n);
    double mass_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass_sum += grid.weight(i);
    for (std::size_t i = 0; i < n; ++i) mass[i] = grid.weight(i) / mass_sum;

    std::vector<double> p1(table.pinf); // conditioned occupation per node
    std::vector<double> q1(n);          // after relaxation, before correction

    const std::size_t n_steps = record.steps();
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double d_prev = record.samples[k];
        const double dd = record.samples[k + 1] - d_prev;

        kern.relax(q1.data(), p1.data(), table.pinf.data(), table.decay.data(), n);

        double q1bar = 0.0;
        for (std::size_t i = 0; i < n; ++i) q1bar += mass[i] * q1[i];

        const double innovation = dd - gamma * (q1bar - d_prev) * dt;
        const double coeff = gain * innovation;
        const double base = 1.0 - coeff * q1bar; // mass factor = base + coeff*q1 = 1 + coeff*(q1-q1bar)
        kern.weight_update(mass.data(), q1.data(), base, coeff, n);

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = mass[i];
            if (std::isnan(m)) throw ks_instability(k + 1, "posterior mass is NaN");
            if (m < 0.0) throw ks_instability(k + 1, "posterior mass went negative");
            sum += m;
        }
        if (!(sum > 0.0) || !std::isfinite(sum))
            throw ks_instability(k + 1, "total posterior mass is not positive");
        const double inv = 1.0 / sum;
        for (std::size_t i = 0; i < n; ++i) mass[i] *= inv;

        // Per-node innovation dD - gamma (q1 - D') dt = c1 - c2 * q1.
        const double c1 = dd + gamma * dt * d_prev;
        const double c2 = gamma * dt;
        kern.occupation_update(p1.data(), q1.data(), gain, c1, c2, n);
    }

    Posterior post{grid, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i)
        post.log_weights[i] =
            mass[i] > 0.0 ? std::log(mass[i]) - std::log(grid.weight(i)) : kNegInf;
    normalize(post);
    return post;
}

std::vector<double> standardized_innovations(const DetectorRecord& record, const BathModel& model,
                                             double omega, double temperature) {
    const double dt = record.config.dt;
    const double gamma = record.config.gamma;
    const double gain = 4.0 * record.config.lambda / gamma;
    const double sd = gamma * std::sqrt(dt) / (2.0 * std::sqrt(record.config.lambda));
    const TransitionRates r = rates(model, omega, temperature);
    const double pinf = r.thermal_excited();
    const double decay = std::exp(-r.total() * dt);

    std::vector<double> out(record.steps());
    double p1 = pinf;
    for (std::size_t k = 0; k < record.steps(); ++k) {
        const double d_prev = record.samples[k];
        const double dd = record.samples[k + 1] - d_prev;
        const double q1 = pinf + (p1 - pinf) * decay;
        const double innovation = dd - gamma * (q1 - d_prev) * dt;
        out[k] = innovation / sd;
        p1 = q1 + gain * q1 * (1.0 - q1) * innovation;
    }
    return out;
}

Trajectory threshold_reconstruct(const DetectorRecord& record) {
    Trajectory traj;
    traj.n0 = record.samples.empty() ? 0 : (record.samples[0] > 0.5 ? 1 : 0);
    traj.horizon = record.duration();
    int state = traj.n0;
    for (std::size_t k = 1; k < record.samples.size(); ++k) {
        const int v = record.samples[k] > 0.5 ? 1 : 0;
        if (v != state) {
            traj.events.push_back(
                {record.time_at(k), v == 1 ? JumpDirection::up : JumpDirection::down});
            state = v;
        }
    }
    return traj;
}

void write_record_csv(std::ostream& out, const DetectorRecord& record) {
    out << "time,D\n";
    for (std::size_t i = 0; i < record.samples.size(); ++i)
        out << csv::g17(record.time_at(i)) << "," << csv::g17(record.samples[i]) << "\n";
}

void write_record_csv_file(const std::string& path, const DetectorRecord& record) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_record_csv(out, record);
}

} // namespace thermo
