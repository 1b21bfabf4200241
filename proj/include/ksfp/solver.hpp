#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksfp/field.hpp"
#include "ksfp/grid.hpp"
#include "ksfp/hypo.hpp"
#include "ksfp/params.hpp"
#include "ksfp/spectral_ops.hpp"

namespace ksfp {

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

// Mode-space right-hand side of the kinetic equation.  Per (j, n, k):
//   transport: -ik [ nu_j C_{n,k}
//                    + sqrt(sigma_t) (sqrt(n) C_{n-1,k} + sqrt(n+1) C_{n+1,k}) ]
//   coupling:  +(kappa_t/sqrt(sigma_t)) sqrt(n) (F_1 C_{n-1,k-1} + conj(F_1) C_{n-1,k+1})
//   drag-diffusion: -(n/m) C_{n,k}
// with F_1 = i pi rho_hat_1 and rho_hat_1 = sum_j C[j][0][1].  The top
// Hermite row is closed by C_{n_hermite+1} = 0.
SpectralField rhs(const SpectralField& c, const SimParams& p, const Grid& grid);

// Scale-separated form: transport and coupling carry a 1/epsilon factor and
// the drag-diffusion eigenvalue becomes -n/epsilon^2.  Requires p.epsilon > 0.
SpectralField rhs_rescaled(const SpectralField& c, const SimParams& p, const Grid& grid);

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

enum class Scheme { ExpRK2, ExpRK4 };

Scheme scheme_from_name(const std::string& name);
std::string scheme_name(Scheme s);

enum class CflMode { Refuse, Warn };

struct SolverConfig {
    double dt = 0.0;       // <= 0 selects the CFL-limited step
    double t_final = 1.0;
    Scheme scheme = Scheme::ExpRK4;
    int stride = 10;       // sampling stride in steps
    CflMode cfl_mode = CflMode::Refuse;
    double cfl_safety = 0.5;
    std::vector<double> snapshot_times;
};

// Advective CFL step bound: safety * (2 pi / n_theta) / v_max with
// v_max = adv_scale * (max|nu| + sqrt(2 sigma_t n_hermite)).
double cfl_limit(const Grid& grid, double sigma_t, double adv_scale,
                 double safety = 0.5);

// One step of the exponential integrator: the drag-diffusion part is applied
// through its exact per-row decay factors exp(-n rate dt), the transport and
// coupling parts through embedded explicit RK stages.  All exponential
// factors are nonincreasing, so stiff relaxation never amplifies.  Pure
// drag-diffusion flows (k = 0 data, kappa_t = 0) are integrated exactly.
void step(SpectralField& c, const Grid& grid, double sigma_t, double kappa_t,
          double adv_scale, double fp_rate, double dt, Scheme scheme);

// Convenience wrappers fixing the scales from the parameter set.
void step(SpectralField& c, const SimParams& p, const Grid& grid, double dt,
          Scheme scheme);
void step_rescaled(SpectralField& c, const SimParams& p, const Grid& grid, double dt,
                   Scheme scheme);

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct EnergySample {
    double t = 0.0;
    double mass = 0.0;
    double l2gamma_sq = 0.0; // ||f - f_inf||^2
    double i_f = 0.0;        // dissipation I[f]
    double a = 0.0;          // cross term A
    double e = 0.0;          // modified energy E
    double n_err_sq = 0.0;   // ||N - N_inf||^2
    // Scale-separated runs also record:
    double micro_err = 0.0;     // ||f - rho M|| in L2(M^{-1} gbar)
    double l2_minv = 0.0;       // ||f||
    double dtheta_l2_minv = 0.0;// ||d_theta f||
};

struct SolverAbort : std::runtime_error {
    double time;
    explicit SolverAbort(double t)
        : std::runtime_error("solver aborted on non-finite state at t = " +
                             std::to_string(t)),
          time(t) {}
};

struct Trajectory {
    std::vector<EnergySample> samples;
    SpectralField final_field;
    double alpha = 0.0;
    bool rescaled = false;
    std::vector<std::string> warnings;

    std::vector<double> times() const;
    std::vector<double> deviation_norms() const; // sqrt(l2gamma_sq)
};

using SnapshotSink = std::function<void(double, const SpectralField&)>;

// Advances the kinetic equation from `initial` to cfg.t_final, recording an
// EnergySample every cfg.stride steps (plus the final state).  The
// equilibrium is derived from the initial mass; a mismatch between the
// initial per-node marginals and the equilibrium marginals beyond 1e-8 is
// refused since the cross term A would be ill-posed.
Trajectory run(const SpectralField& initial, const SimParams& p, const Grid& grid,
               const SolverConfig& cfg, const SnapshotSink& sink = nullptr);

// Scale-separated counterpart; records the micro-distance and growth-check
// norms per sample.  Requires p.epsilon > 0.
Trajectory run_rescaled(const SpectralField& initial, const SimParams& p,
                        const Grid& grid, const SolverConfig& cfg,
                        const SnapshotSink& sink = nullptr);

// ---------------------------------------------------------------------------
// Moment balance diagnostics
// ---------------------------------------------------------------------------

// Residuals of the first two angular moment balance laws, evaluated from a
// field and its right-hand side (collocation samples, [j][i] row-major):
//   r_N = dN/dt + d_theta (J + nu N)
//   r_J = dJ/dt + d_theta (P + nu J) - kappa_t (sin * rho) N + J / m
// Both vanish identically on the resolved rows for n_hermite >= 2; the top
// Hermite closure never reaches these moments.
struct MomentResiduals {
    std::vector<double> r_n, r_j; // [j * n_theta + i]
    double max_abs_n = 0.0;
    double max_abs_j = 0.0;
};

MomentResiduals moment_balance_residual(const SpectralField& c, const SimParams& p,
                                        const Grid& grid);

} // namespace ksfp
