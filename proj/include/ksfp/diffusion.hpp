#pragma once

#include <string>
#include <vector>

#include "ksfp/field.hpp"
#include "ksfp/grid.hpp"
#include "ksfp/params.hpp"
#include "ksfp/solver.hpp"
#include "ksfp/spectral_ops.hpp"

namespace ksfp {

// ---------------------------------------------------------------------------
// Drift-diffusion reference solver
// ---------------------------------------------------------------------------
// Evolves the angular density under
//   d_t rho = sigma_t d_theta^2 rho - kappa_t d_theta((sin * rho) rho)
// in Fourier space.  The diffusion factor e^{-sigma_t k^2 dt} is applied
// exactly; the nonlinear flux advances with two-stage RK.  The mass mode is
// untouched bit for bit.

struct DDState {
    int n_theta = 0;
    double time = 0.0;
    std::vector<cplx> rho_hat; // ascending k, same mode range as field rows

    int k_min() const { return -n_theta / 2 + 1; }
    int k_max() const { return n_theta / 2; }
    cplx& at(int k) { return rho_hat[static_cast<std::size_t>(k - k_min())]; }
    const cplx& at(int k) const { return rho_hat[static_cast<std::size_t>(k - k_min())]; }
};

DDState dd_state_from_samples(const std::vector<double>& rho_samples);
std::vector<double> dd_samples(const DDState& s);
double dd_mass(const DDState& s); // 2 pi Re rho_hat_0

void dd_step(DDState& s, double sigma_t, double kappa_t, double dt);

// Advances to t_final from the state's current time.  dt <= 0 selects a
// default resolving the coupling flux (and at least 200 steps for accuracy).
// Aborts with SolverAbort on non-finite modes.
DDState dd_run(DDState init, double sigma_t, double kappa_t, double t_final,
               double dt = 0.0);

// ---------------------------------------------------------------------------
// Scale-separation diagnostics
// ---------------------------------------------------------------------------

// Distance of a single-node field to its own local equilibrium rho M:
//   sqrt(2 pi sum_{n>=1} sum_k |C[0][n][k]|^2).
// The n = 0 row is exactly rho M, so only n >= 1 contributes.
double micro_distance(const SpectralField& c, const Grid& grid);

// Cross functional for the limit comparison: solves d_theta^2 v = S with
// S = rho - rho_eps + epsilon d_theta J_eps and returns (1/2)||d_theta v||^2.
// The masses of rho and rho_eps must agree (the k = 0 source must vanish).
double functional_a_eps(const SpectralField& f_eps, const DDState& rho_dd,
                        const SimParams& p, const Grid& grid);

// Sandwich bounds tying the cross functional to the homogeneous H^{-1}
// distance err and the transverse seminorm d = ||d_theta f||:
//   (1/4) err^2 - sigma_t c_p^2 (eps^2/2) d^2  <=  A  <=  err^2 + sigma_t c_p^2 eps^2 d^2.
struct BandRow {
    double a = 0.0, err_hm1 = 0.0, dtheta_norm = 0.0;
    double upper = 0.0, lower = 0.0;
    double margin_upper = 0.0; // upper - a
    double margin_lower = 0.0; // a - lower
    bool ok = false;
};

BandRow band_check(double a, double err_hm1, double dtheta_f_norm, double epsilon,
                     double sigma_t, double c_p = 1.0);

// ---------------------------------------------------------------------------
// Uniform growth bound
// ---------------------------------------------------------------------------
// Checks  ||f(t)|| + ||d_theta f(t)|| <= (||d_theta f_in|| + 3 ||f_in||) e^{C t}
// with C = (kappa_t M0)^2 / sigma_t at every recorded sample of a
// scale-separated trajectory.

struct GrowthReport {
    double growth_c = 0.0;  // exponent C
    double prefactor = 0.0; // ||d_theta f_in|| + 3 ||f_in||
    int n_violations = 0;
    double max_ratio = 0.0; // max over samples of lhs / bound
    std::vector<double> t, lhs, bound;

    std::string text() const;
};

GrowthReport growth_check(const Trajectory& traj, const SimParams& p);

// ---------------------------------------------------------------------------
// Moment relation along the scale-separated flow
// ---------------------------------------------------------------------------
// Max collocation residual of
//   d_t(N - eps d_theta J) + (nu/eps) d_theta N
//     - d_theta( d_theta P + nu d_theta J - kappa_t (sin * rho) N ),
// which is an exact consequence of the two moment balance laws and therefore
// vanishes to roundoff for n_hermite >= 2.
double moment_relation_residual(const SpectralField& c, const SimParams& p,
                                const Grid& grid);

// ---------------------------------------------------------------------------
// Epsilon sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
    Scheme scheme = Scheme::ExpRK4;
    double cfl_safety = 0.5;
    double dt_eps_factor = 0.25; // dt <= factor * eps^2
    long step_budget = 2000000;  // per-run step count that triggers a warning
    int workers = 1;             // concurrent eps runs
    double dd_dt = 0.0;          // reference-solver step; <= 0 selects default
};

struct EpsSweepResult {
    std::vector<double> eps_values;
    std::vector<double> errors_hminus1; // ||rho_eps(T) - rho(T)||_{H^-1}, Bessel weights
    std::vector<double> micro_errors;   // micro_distance at T
    double fitted_slope = 0.0;          // log-log slope of errors_hminus1 vs eps
    double fit_r_squared = 0.0;
    double micro_slope = 0.0; // same fit for micro_errors
    double micro_r_squared = 0.0;
    std::vector<std::string> warnings;

    std::string text() const;
};

// Runs the scale-separated solver once per epsilon from well-prepared data
// f_in = rho_in M (same rho_in for every eps) and the drift-diffusion
// reference once, then fits the log-log error curve.  rho_in is a sample
// vector on the grid angles; base supplies kappa_t and sigma_t.
EpsSweepResult eps_sweep(const std::vector<double>& rho_in, const SimParams& base,
                         double t_final, const std::vector<double>& eps_list,
                         const Grid& grid, const SweepOptions& opt = {});

} // namespace ksfp
