#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ksfp/field.hpp"
#include "ksfp/grid.hpp"
#include "ksfp/params.hpp"

namespace ksfp {

// ---------------------------------------------------------------------------
// Counter-based random streams
// ---------------------------------------------------------------------------
// Every random number is a pure function of (seed, particle, step, slot), so
// trajectories are reproducible bit for bit regardless of how particles are
// chunked across threads.  Initial sampling uses step 0; EM step s draws
// with counter s+1.

std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t particle,
                          std::uint64_t step, std::uint64_t slot);
double counter_uniform(std::uint64_t seed, std::uint64_t particle,
                       std::uint64_t step, std::uint64_t slot); // in [0, 1)
// Box-Muller pair from slots (slot, slot+1).
void counter_gaussian_pair(std::uint64_t seed, std::uint64_t particle,
                           std::uint64_t step, std::uint64_t slot, double& g0,
                           double& g1);

// ---------------------------------------------------------------------------
// Ensemble
// ---------------------------------------------------------------------------

struct ParticleEnsemble {
    std::vector<double> theta; // phases in [0, 2 pi)
    std::vector<double> omega;
    std::vector<double> nu;
    std::uint64_t seed = 0;
    double time = 0.0;
    long step = 0; // completed EM steps; advances the noise counter

    std::size_t size() const { return theta.size(); }
};

// Product initial law: theta from the given density by inverse-CDF sampling
// on a fine grid, nu from the grid node weights g_j, omega Gaussian with
// mean nu and variance sigma_t.  The density need not be normalized but
// must be nonnegative with positive mass.
ParticleEnsemble sample_initial(std::size_t n,
                                const std::function<double(double)>& theta_density,
                                const Grid& grid, double sigma_t,
                                std::uint64_t seed);

struct OrderParameter {
    double r = 0.0;
    double psi = 0.0; // reported 0 when r = 0
};

// r e^{i psi} = (1/N) sum_k e^{i theta_k}, accumulated in fixed index order.
OrderParameter order_parameter(const ParticleEnsemble& e);

// O(N^2) interaction sums (1/N) sum_k sin(theta_k - theta_i), for checking
// the order-parameter reformulation on small ensembles.
std::vector<double> interaction_sums_naive(const ParticleEnsemble& e);

// One Euler-Maruyama step of
//   d theta_i = omega_i dt
//   d omega_i = (1/m)(-omega_i + nu_i + kappa r sin(psi - theta_i)) dt
//               + (sqrt(2 sigma)/m) dW_i
// with the interaction evaluated through the order parameter of the old
// phases; phases are wrapped into [0, 2 pi).  Worker count only chunks the
// particle loop and never changes results.
void em_step(ParticleEnsemble& e, const SimParams& p, double dt, int workers = 1);

void em_run(ParticleEnsemble& e, const SimParams& p, double dt, long n_steps,
            int workers = 1);

// ---------------------------------------------------------------------------
// Density comparison
// ---------------------------------------------------------------------------

// Histogram on uniform theta bins, normalized so (2 pi / n_bins) sum = mass.
std::vector<double> empirical_density(const ParticleEnsemble& e, int n_bins,
                                      double mass = 1.0);

// Angular density modes of a field, summed over nu nodes.
std::vector<cplx> rho_modes(const SpectralField& c);

// Exact averages of sum_k modes[k] e^{i k theta} over uniform bins.
std::vector<double> bin_averages(const std::vector<cplx>& modes, int k_min,
                                 int n_bins);

// L1 distance (2 pi / n_bins) sum |a_b - b_b|; masses must agree to 1e-8.
double compare_to_kinetic(const std::vector<double>& empirical,
                          const std::vector<double>& kinetic);

} // namespace ksfp
