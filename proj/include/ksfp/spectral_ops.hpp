#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "ksfp/field.hpp"
#include "ksfp/grid.hpp"

namespace ksfp {

// ---------------------------------------------------------------------------
// Velocity-space basics
// ---------------------------------------------------------------------------

// Gaussian velocity profile with mean nu and variance sigma_t:
//   M(omega, nu) = (2 pi sigma_t)^{-1/2} exp(-(omega-nu)^2 / (2 sigma_t)).
double maxwellian(double omega, double nu, double sigma_t);

// ---------------------------------------------------------------------------
// Angular Fourier helpers (conventions used throughout)
// ---------------------------------------------------------------------------
// Analysis:  g_hat_k = (1/n_theta) sum_i g(theta_i) e^{-i k theta_i}
//            (the trapezoid value of (1/2pi) integral g e^{-ik theta}).
// Synthesis: g(theta) = sum_k g_hat_k e^{i k theta}.
// Mode index k runs over k_min..k_max of the grid; for real samples the
// paired modes are written as exact conjugates.

// Forward transform of real samples; result indexed like field rows
// (ascending k).  Hermitian symmetry holds bit-exactly by construction.
std::vector<cplx> dft_forward_real(const std::vector<double>& samples);

// Evaluates sum_k modes[k] e^{i k theta} and returns the real part.
double synth_real(const std::vector<cplx>& modes, int k_min, double theta);

// ---------------------------------------------------------------------------
// Projection / reconstruction
// ---------------------------------------------------------------------------

// Projects a pointwise density f(theta, omega, j) onto the coefficient
// basis using collocation in theta and Gauss-Hermite quadrature in omega.
// quad_order = 0 selects the default 2*n_hermite + 8; anything below
// 2*n_hermite is refused since the rule would not be exact on the span.
SpectralField project(const std::function<double(double, double, int)>& f,
                      const Grid& grid, double sigma_t, int quad_order = 0);

// Pointwise evaluation of the truncated expansion (real part).
double reconstruct(const SpectralField& c, const Grid& grid, double sigma_t,
                   double theta, double omega, int j);

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

// Angular Fourier modes of the first three velocity moments per nu node:
//   N = integral f dw,  J = integral (w-nu) f dw,  P = integral (w-nu)^2 f dw.
// In coefficients: N = C_0, J = sqrt(sigma_t) C_1,
// P = sigma_t (sqrt(2) C_2 + C_0).  P requires n_hermite >= 2.
struct MomentModes {
    int n_nodes = 0;
    int n_theta = 0;
    std::vector<cplx> n_hat, j_hat, p_hat; // [j * n_theta + ki], ascending k

    int k_min() const { return -n_theta / 2 + 1; }
    std::size_t idx(int j, int k) const {
        return static_cast<std::size_t>(j) * n_theta + (k - k_min());
    }
};

MomentModes moments(const SpectralField& c, const Grid& grid, double sigma_t);

// Total mass integral of the field: 2 pi sum_j Re C[j][0][0].
double total_mass(const SpectralField& c);

// ---------------------------------------------------------------------------
// Mean-field coupling
// ---------------------------------------------------------------------------

// (sin * rho)(theta) = integral sin(theta' - theta) rho(theta') dtheta'.
// Only the +-1 Fourier modes of rho contribute:
//   (sin * rho)(theta) = 2 Re[ i pi rho_hat_1 e^{i theta} ].
// Input and output are collocation samples on the grid angles.
std::vector<double> coupling_field(const std::vector<double>& rho_samples,
                                   const Grid& grid);

// Mode-space form: given rho_hat_1, returns F_1 = i pi rho_hat_1 (the
// coefficient of e^{i theta}; the e^{-i theta} coefficient is its conjugate).
cplx coupling_mode(cplx rho_hat_1);

// ---------------------------------------------------------------------------
// Equilibrium
// ---------------------------------------------------------------------------

// Space-homogeneous steady state: f_inf = rho_inf * g_j * M with
// rho_inf = mass / (2 pi).  n_inf[j] is the angular density of node j.
struct EquilibriumState {
    double rho_inf = 0.0;
    double sigma_t = 0.0;
    std::vector<double> n_inf; // per node: rho_inf * g_j

    SpectralField field(const Grid& grid) const;
};

EquilibriumState equilibrium(double mass, const Grid& grid, double sigma_t);

// ---------------------------------------------------------------------------
// Norms and dissipation
// ---------------------------------------------------------------------------

// Squared weighted L2 distance
//   ||f - f_ref||^2 = sum_j gbar_j sum_n 2 pi sum_k |C - C_ref|^2.
// reference = nullptr measures the plain weighted norm of the field; with a
// reference equilibrium only the (n,k) = (0,0) entries differ per node.
double l2_gamma_sq(const SpectralField& c, const Grid& grid,
                   const EquilibriumState* reference = nullptr);

// Velocity Fisher-type dissipation
//   I[f] = sum_j gbar_j sum_n (n / sigma_t) 2 pi sum_k |C[j][n][k]|^2.
double dissipation(const SpectralField& c, const Grid& grid, double sigma_t);

// Squared weighted distance of the angular density rows to equilibrium:
//   ||N - N_inf||^2 = sum_j gbar_j 2 pi (|C[j][0][0]-n_inf_j|^2 + sum_{k!=0} |C[j][0][k]|^2).
double n_err_sq(const SpectralField& c, const Grid& grid, const EquilibriumState& eq);

// Squared weighted norms of single moment rows.
double j_norm_sq(const SpectralField& c, const Grid& grid, double sigma_t);
double p_minus_sigma_n_sq(const SpectralField& c, const Grid& grid, double sigma_t);

// Unweighted phase-space norms on a single-scale field (gbar included):
// ||f||^2 and ||d_theta f||^2 in L2(M^{-1} gbar).
double l2_minv_sq(const SpectralField& c, const Grid& grid);
double dtheta_l2_minv_sq(const SpectralField& c, const Grid& grid);

// Inhomogeneous (Bessel) negative-order Sobolev norm of a periodic sample
// vector: sqrt(2 pi sum_k |g_hat_k|^2 / (1 + k^2)).
double hminus1_norm(const std::vector<double>& samples);

// Mode-space variants; "homogeneous" divides by k^2 and skips k = 0 (the
// input must then have zero mean for the norm to be meaningful).
double hminus1_from_modes(const std::vector<cplx>& modes, int k_min, bool homogeneous);

} // namespace ksfp
