#pragma once

#include <vector>

#include "thermo/bath.hpp"

namespace thermo {

enum class GridSpacing { log_uniform, uniform };

// Discretization of the prior support [t_min, t_max]; carries trapezoid
// quadrature weights so that integrate(f) = sum_i w_i f(T_i).
class TemperatureGrid {
public:
    TemperatureGrid(double t_min, double t_max, std::size_t n_nodes, GridSpacing spacing);

    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    GridSpacing spacing() const { return spacing_; }
    std::size_t size() const { return nodes_.size(); }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
        return acc;
    }

private:
    double t_min_, t_max_;
    GridSpacing spacing_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

} // namespace thermo
