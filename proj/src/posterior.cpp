#include "thermo/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "thermo/csv.hpp"

namespace thermo {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double Posterior::density(std::size_t i) const { return std::exp(log_weights[i]); }

Posterior flat_prior(const TemperatureGrid& grid) {
    // Normalizing from zero log-weights gives exactly 1/(tmax - tmin) on an
    // interval (trapezoid integrates constants exactly) and a unit point mass
    // on a single-node grid, where 1/(tmax - tmin) would be undefined.
    Posterior post{grid, std::vector<double>(grid.size(), 0.0)};
    normalize(post);
    return post;
}

void normalize(Posterior& post) {
    const auto& lw = post.log_weights;
    const double m = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(m)) {
        throw posterior_underflow(SufficientStats{}, 0.0);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i)
        z += post.grid.weight(i) * std::exp(lw[i] - m);
    const double log_z = m + std::log(z);
    for (double& v : post.log_weights) v -= log_z;
}

void bayes_update(Posterior& post, const BathModel& model, const std::vector<ObservedSegment>& segments) {
    SufficientStats total_stats;
    double total_duration = 0.0;
    for (const auto& seg : segments) {
        total_stats.k += seg.stats.k;
        total_stats.l += seg.stats.l;
        total_stats.tau1 += seg.stats.tau1;
        total_duration += seg.duration;
    }

    auto& lw = post.log_weights;
    for (std::size_t i = 0; i < post.grid.size(); ++i) {
        if (lw[i] == kNegInf) continue;
        double acc = 0.0;
        for (const auto& seg : segments) {
            const TransitionRates r = rates(model, seg.omega, post.grid.node(i));
            const double lp0 = seg.condition_on_entry
                                   ? 0.0
                                   : log_initial_prob(seg.entry_state, r, InitMode::thermal);
            acc += log_likelihood_stats(seg.stats, seg.duration, r, lp0);
        }
        lw[i] += acc;
    }

    const double m = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(m)) throw posterior_underflow(total_stats, total_duration);
    normalize(post);
}

void bayes_update(Posterior& post, const BathModel& model, double omega,
                  const Trajectory& traj, InitMode init) {
    ObservedSegment seg;
    seg.stats = sufficient_stats(traj);
    seg.duration = traj.horizon;
    seg.entry_state = traj.n0;
    seg.omega = omega;
    seg.condition_on_entry = (init != InitMode::thermal);
    if (init == InitMode::fixed_excited && traj.n0 != 1)
        throw validation_error("init", "fixed-excited init requires n0 = 1");
    if (init == InitMode::fixed_ground && traj.n0 != 0)
        throw validation_error("init", "fixed-ground init requires n0 = 0");
    bayes_update(post, model, std::vector<ObservedSegment>{seg});
}

void write_posterior_csv(std::ostream& out, const Posterior& post) {
    out << "T,density\n";
    for (std::size_t i = 0; i < post.grid.size(); ++i)
        out << csv::g17(post.grid.node(i)) << "," << csv::g17(post.density(i)) << "\n";
}

void write_posterior_csv_file(const std::string& path, const Posterior& post) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_posterior_csv(out, post);
}

} // namespace thermo
