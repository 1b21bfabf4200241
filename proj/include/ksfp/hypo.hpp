#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksfp/field.hpp"
#include "ksfp/grid.hpp"
#include "ksfp/params.hpp"
#include "ksfp/spectral_ops.hpp"

namespace ksfp {

// ---------------------------------------------------------------------------
// Periodic Poisson solve in theta
// ---------------------------------------------------------------------------

// Solution of  d^2/dtheta^2 v = S  per nu node with zero angular mean:
// v_hat_k = S_hat_k / (-k^2), v_hat_0 = 0.  Compatibility requires S to
// have zero angular mean on every node.
struct AuxPotential {
    int n_nodes = 0;
    int n_theta = 0;
    std::vector<cplx> v_hat; // [j * n_theta + ki], ascending k

    int k_min() const { return -n_theta / 2 + 1; }
    std::size_t idx(int j, int k) const {
        return static_cast<std::size_t>(j) * n_theta + (k - k_min());
    }
};

// source indexed like AuxPotential (per-node Fourier modes of S).  A node
// whose k = 0 mode exceeds 1e-10 * scale is a hard error naming the node.
AuxPotential poisson_solve_theta(const std::vector<cplx>& source_hat, int n_nodes,
                                 int n_theta);

// Weighted norms of the gradient rows: ||d_theta v||^2 and ||d^2_theta v||^2
// in L2(gbar).
double aux_grad_sq(const AuxPotential& v, const Grid& grid);
double aux_grad2_sq(const AuxPotential& v, const Grid& grid);

// Checks the two solve properties on random zero-mean sources:
//   contraction  ||d_theta v||   <= ||S||   (unit Poincare constant),
//   identity     ||d^2_theta v||  = ||S||.
struct EllipticCheck {
    int n_sources = 0;
    int violations = 0;
    double max_identity_gap = 0.0;      // relative |grad2^2 - ||S||^2|
    double min_contraction_margin = 0.0; // min of ||S||^2 - ||d_theta v||^2, relative

    std::string text() const;
};

EllipticCheck elliptic_battery(const Grid& grid, int n_sources, std::uint64_t seed,
                               double tol = 1e-12);

// ---------------------------------------------------------------------------
// Energy pieces
// ---------------------------------------------------------------------------

// Cross term  A = sum_j gbar_j integral J_j d_theta v_j dtheta,  where v
// solves the Poisson problem with source N_inf - N.
double functional_a(const SpectralField& c, const Grid& grid, double sigma_t,
                    const EquilibriumState& eq);

// Admissible mixing weight
//   alpha = min( 1/(2 C_P), m sigma_t / (2 (5 m^2 sigma_t + C_P^2)) ),
// with Poincare constant C_P = 1 on the unit circle.
double default_alpha(const SimParams& p, double c_p = 1.0);

// E[f] = 1/2 ||f - f_inf||^2 + alpha A.
double modified_energy(const SpectralField& c, const Grid& grid, double sigma_t,
                       const EquilibriumState& eq, double alpha);

// ---------------------------------------------------------------------------
// Regime report
// ---------------------------------------------------------------------------

// Checks the smallness conditions relating coupling, inertia and noise.
// The headline condition is
//   c_inf * max( sqrt(kappa_t/m), kappa_t, m*kappa_t ) <= sigma_t,
// with c_inf supplied or defaulted from the equilibrium norms.  The two
// strict lines behind it are always evaluated and reported:
//   line 1: (kappa_t/alpha) (||N_inf||_L1 + sqrt(pi) ||N_inf||_L2) <= sigma_t/4
//   line 2: kappa_t (3 ||N_inf||_L1 + sqrt(pi) ||N_inf||_L2) <= sigma_t/(2m)
struct RegimeReport {
    double alpha = 0.0;
    double c_inf = 0.0;
    double lhs_main = 0.0;
    double rhs_main = 0.0;
    bool satisfied_main = false;
    double lhs_line1 = 0.0, rhs_line1 = 0.0;
    double lhs_line2 = 0.0, rhs_line2 = 0.0;
    bool satisfied_line1 = false;
    bool satisfied_line2 = false;
    bool satisfied_strict = false;
    double kappa_t_max = 0.0; // largest coupling passing both strict lines at this sigma_t
    double n_inf_l1 = 0.0;    // ||N_inf||_L1
    double n_inf_l2 = 0.0;    // ||N_inf||_L2(gbar)

    std::string text() const;
    std::string csv() const;
};

double default_c_inf(const SimParams& p, const EquilibriumState& eq, const Grid& grid);

// c_inf <= 0 selects the default.
RegimeReport regime_check(const SimParams& p, const EquilibriumState& eq,
                          const Grid& grid, double c_inf = 0.0);

// ---------------------------------------------------------------------------
// Inequality battery
// ---------------------------------------------------------------------------

// Per-field margins of the coefficient-space functional inequalities, all
// with the variance-aware constants that are sharp for a Gaussian of
// variance sigma_t (rhs - lhs, nonnegative means the inequality holds):
//   gp:    sigma_t I[f] + ||N - N_inf||^2 - ||f - f_inf||^2
//   flux:  sigma_t^2 I[f] - ||J||^2
//   press: 3 sigma_t^3 I[f] - ||P - sigma_t N||^2
// The nominal unit-constant margins (I, sigma_t I, 3 sigma_t^2 I) are
// recorded alongside; they coincide at sigma_t = 1 and may go negative for
// sigma_t > 1 on fields concentrated in the low Hermite rows.
struct InequalityRow {
    int field_index = 0;
    double sigma_t = 0.0;
    double margin_gp = 0.0;
    double margin_flux = 0.0;
    double margin_press = 0.0;
    double nominal_gp = 0.0;
    double nominal_flux = 0.0;
    double nominal_press = 0.0;
};

struct InequalityReport {
    std::vector<InequalityRow> rows;
    int violations = 0;        // sharp-margin violations beyond tolerance
    double worst_margin = 0.0; // most negative relative sharp margin seen
    double tolerance = 1e-12;

    std::string text() const;
    std::string csv() const;
};

// Random coefficient field with amplitude decay 2^{-n} 2^{-|k|}, Hermitian
// symmetric, deterministic per seed.
SpectralField random_field(const Grid& grid, std::uint64_t seed, double amplitude = 1.0);

InequalityReport inequality_battery(const Grid& grid, const std::vector<double>& sigma_list,
                                    int n_fields, std::uint64_t seed,
                                    double tolerance = 1e-12);

// ---------------------------------------------------------------------------
// Decay-rate fitting
// ---------------------------------------------------------------------------

struct DecayFit {
    double rate = 0.0;      // decay rate lambda of v ~ exp(-lambda t)
    double intercept = 0.0; // log amplitude at t = 0
    double r_squared = 1.0;
};

// Least squares on (t, log v); requires >= 5 samples, all values positive.
DecayFit fit_decay_rate(const std::vector<double>& times,
                        const std::vector<double>& values);

} // namespace ksfp
