#include "ksfp/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ksfp {

double Grid::abs_nu_max() const {
    double v = 0.0;
    for (const auto& n : nodes) v = std::max(v, std::abs(n.nu));
    return v;
}

Grid build_grid(int n_theta, int n_hermite, const std::vector<NuNode>& nu_nodes) {
    if (n_theta < 4)
        throw std::invalid_argument("build_grid: n_theta must be >= 4");
    if (n_theta % 2 != 0)
        throw std::invalid_argument("build_grid: n_theta must be even (got " +
                                    std::to_string(n_theta) + ")");
    if (n_hermite < 2)
        throw std::invalid_argument("build_grid: n_hermite must be >= 2");
    if (nu_nodes.empty())
        throw std::invalid_argument("build_grid: nu node list must be nonempty");

    double g_sum = 0.0;
    double inv_gbar_sum = 0.0;
    for (std::size_t j = 0; j < nu_nodes.size(); ++j) {
        const auto& nd = nu_nodes[j];
        if (!std::isfinite(nd.nu) || !std::isfinite(nd.g) || !std::isfinite(nd.gbar))
            throw std::invalid_argument("build_grid: node " + std::to_string(j) +
                                        " has a non-finite entry");
        if (nd.g < 0.0)
            throw std::invalid_argument("build_grid: node " + std::to_string(j) +
                                        " has negative marginal weight g");
        if (!(nd.gbar > 0.0))
            throw std::invalid_argument("build_grid: node " + std::to_string(j) +
                                        " has nonpositive confinement weight gbar");
        g_sum += nd.g;
        inv_gbar_sum += 1.0 / nd.gbar;
    }
    if (!(g_sum > 0.0))
        throw std::invalid_argument("build_grid: total marginal mass must be positive");

    Grid grid;
    grid.n_theta = n_theta;
    grid.n_hermite = n_hermite;
    grid.nodes = nu_nodes;
    // Rescale to the unit conventions: sum g = 1, sum 1/gbar = 1.
    for (auto& nd : grid.nodes) {
        nd.g /= g_sum;
        nd.gbar *= inv_gbar_sum;
    }
    grid.theta.resize(n_theta);
    for (int i = 0; i < n_theta; ++i)
        grid.theta[i] = 2.0 * std::numbers::pi * i / n_theta;
    return grid;
}

Grid build_grid_delta0(int n_theta, int n_hermite) {
    return build_grid(n_theta, n_hermite, {NuNode{0.0, 1.0, 1.0}});
}

} // namespace ksfp
