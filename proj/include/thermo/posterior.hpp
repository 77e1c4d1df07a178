#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thermo/grid.hpp"
#include "thermo/likelihood.hpp"
#include "thermo/trajectory.hpp"

namespace thermo {

// Signals a posterior whose every node underflowed to zero mass; carries the
// trajectory statistics that produced it for diagnosis.
class posterior_underflow : public std::runtime_error {
public:
    posterior_underflow(SufficientStats stats, double duration)
        : std::runtime_error("posterior underflow: all temperature nodes at zero mass (k=" +
                             std::to_string(stats.k) + ", l=" + std::to_string(stats.l) +
                             ", tau1=" + std::to_string(stats.tau1) +
                             ", duration=" + std::to_string(duration) + ")"),
          stats(stats), duration(duration) {}
    SufficientStats stats;
    double duration;
};

// Discretized temperature distribution: log density values on the grid nodes.
// After normalize(), the trapezoid integral of exp(log_weights) equals 1.
struct Posterior {
    TemperatureGrid grid;
    std::vector<double> log_weights;

    double density(std::size_t i) const;
    // Grid-quadrature expectation of f(T) under the density.
    template <class F>
    double expect(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            acc += grid.weight(i) * density(i) * f(grid.node(i));
        return acc;
    }
};

Posterior flat_prior(const TemperatureGrid& grid);

// Rescales log_weights so the trapezoid integral of the density is 1.
void normalize(Posterior& post);

// One piecewise-constant-gap segment of observed data for the Bayes update.
struct ObservedSegment {
    SufficientStats stats;
    double duration = 0.0;
    int entry_state = 0;
    double omega = 0.0;
    bool condition_on_entry = true; // false: thermal p(n0|T) factor (first segment, thermal init)
};

// Adds the segment log-likelihoods node-wise and renormalizes.
// Throws posterior_underflow when all nodes lose mass.
void bayes_update(Posterior& post, const BathModel& model, const std::vector<ObservedSegment>& segments);

// Whole-trajectory update at fixed gap.
void bayes_update(Posterior& post, const BathModel& model, double omega,
                  const Trajectory& traj, InitMode init);

// Posterior CSV, header "T,density".
void write_posterior_csv(std::ostream& out, const Posterior& post);
void write_posterior_csv_file(const std::string& path, const Posterior& post);

} // namespace thermo
