#include "thermo/grid.hpp"

#include <cmath>

namespace thermo {

TemperatureGrid::TemperatureGrid(double t_min, double t_max, std::size_t n_nodes, GridSpacing spacing)
    : t_min_(t_min), t_max_(t_max), spacing_(spacing) {
    if (!(t_min > 0.0)) throw validation_error("tmin", "tmin must be > 0");
    if (n_nodes == 0) throw validation_error("nodes", "grid needs at least 1 node");
    if (n_nodes == 1) {
        // Point measure: one node carrying unit quadrature weight.
        if (t_max != t_min)
            throw validation_error("nodes", "a single-node grid requires tmax == tmin");
        nodes_.assign(1, t_min);
        weights_.assign(1, 1.0);
        return;
    }
    if (!(t_max > t_min)) throw validation_error("tmax", "tmax must be > tmin");

    nodes_.resize(n_nodes);
    if (spacing == GridSpacing::log_uniform) {
        const double la = std::log(t_min), lb = std::log(t_max);
        for (std::size_t i = 0; i < n_nodes; ++i)
            nodes_[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n_nodes - 1));
    } else {
        for (std::size_t i = 0; i < n_nodes; ++i)
            nodes_[i] = t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(n_nodes - 1);
    }
    nodes_.front() = t_min;
    nodes_.back() = t_max;

    weights_.assign(n_nodes, 0.0);
    for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
        const double h = 0.5 * (nodes_[i + 1] - nodes_[i]);
        weights_[i] += h;
        weights_[i + 1] += h;
    }
}

} // namespace thermo
