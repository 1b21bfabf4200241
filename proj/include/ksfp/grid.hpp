#pragma once

#include <string>
#include <vector>

namespace ksfp {

// One node of the discrete natural-frequency distribution.  g is the
// marginal mass carried by the node, gbar the confinement weight used in
// the weighted norms.
struct NuNode {
    double nu = 0.0;
    double g = 1.0;
    double gbar = 1.0;
};

// Discretization parameters shared by every field:
//   * n_theta equispaced angles theta_i = 2*pi*i/n_theta,
//   * Fourier modes k = -n_theta/2+1 .. n_theta/2,
//   * Hermite levels n = 0 .. n_hermite,
//   * a finite list of nu nodes.
//
// Normalization conventions enforced by build_grid:
//   sum_j g_j = 1          (g is a probability marginal),
//   sum_j 1/gbar_j = 1     (discrete confinement normalization).
struct Grid {
    int n_theta = 0;
    int n_hermite = 0;
    std::vector<NuNode> nodes;
    std::vector<double> theta; // collocation angles, size n_theta

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int k_min() const { return -n_theta / 2 + 1; }
    int k_max() const { return n_theta / 2; }
    double abs_nu_max() const;
};

// Validates and normalizes the grid.  nu_nodes may be the single delta
// node {0, 1, 1} or any nonempty list with g_j >= 0 (positive total) and
// gbar_j > 0.  n_theta must be even and >= 4; n_hermite >= 2.
Grid build_grid(int n_theta, int n_hermite, const std::vector<NuNode>& nu_nodes);

// Single-node grid for a Dirac frequency marginal at nu = 0.
Grid build_grid_delta0(int n_theta, int n_hermite);

} // namespace ksfp
