#include "ksfp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace ksfp {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Shared core of the mode-space right-hand side.  adv_scale multiplies the
// transport and coupling terms, fp_rate is the relaxation rate unit (the
// Hermite row n decays at n * fp_rate).
//
// The nonlinear Fourier shift is restricted to paired modes: the unpaired
// Nyquist row neither receives nor donates coupling contributions.  This
// keeps the evolution exactly Hermitian-symmetric and leaves a zero Nyquist
// row zero for all time.
SpectralField rhs_core(const SpectralField& c, const Grid& grid, double sigma_t,
                       double kappa_t, double adv_scale, double fp_rate) {
    SpectralField out = SpectralField(c.n_nodes, c.n_hermite, c.n_theta);
    const double sq_sigma = std::sqrt(sigma_t);
    const int k_lo = c.k_min();
    const int k_hi = c.k_max();
    const int k_pair = k_hi - 1; // largest paired |k|

    cplx rho1{0.0, 0.0};
    for (int j = 0; j < c.n_nodes; ++j) rho1 += c.at(j, 0, 1);
    const cplx f1 = coupling_mode(rho1);
    const cplx f1c = std::conj(f1);
    const double coup = adv_scale * kappa_t / sq_sigma;

    for (int j = 0; j < c.n_nodes; ++j) {
        const double nu = grid.nodes[j].nu;
        for (int n = 0; n <= c.n_hermite; ++n) {
            const double sq_n = std::sqrt(double(n));
            const double sq_np1 = std::sqrt(double(n + 1));
            for (int k = k_lo; k <= k_hi; ++k) {
                cplx ladder = nu * c.at(j, n, k);
                if (n >= 1) ladder += sq_sigma * sq_n * c.at(j, n - 1, k);
                if (n < c.n_hermite) ladder += sq_sigma * sq_np1 * c.at(j, n + 1, k);
                cplx acc = cplx{0.0, -double(k) * adv_scale} * ladder;

                if (n >= 1 && kappa_t != 0.0 && std::abs(k) <= k_pair) {
                    cplx z{0.0, 0.0};
                    if (k - 1 >= -k_pair) z += f1 * c.at(j, n - 1, k - 1);
                    if (k + 1 <= k_pair) z += f1c * c.at(j, n - 1, k + 1);
                    acc += coup * sq_n * z;
                }

                acc -= fp_rate * double(n) * c.at(j, n, k);
                out.at(j, n, k) = acc;
            }
        }
    }
    return out;
}

void apply_row_decay(SpectralField& c, const std::vector<double>& factor) {
    for (int j = 0; j < c.n_nodes; ++j)
        for (int n = 0; n <= c.n_hermite; ++n) {
            const double f = factor[n];
            for (int k = c.k_min(); k <= c.k_max(); ++k) c.at(j, n, k) *= f;
        }
}

std::vector<double> decay_factors(int n_top, double rate, double dt) {
    std::vector<double> f(n_top + 1);
    for (int n = 0; n <= n_top; ++n) f[n] = std::exp(-double(n) * rate * dt);
    return f;
}

} // namespace

SpectralField rhs(const SpectralField& c, const SimParams& p, const Grid& grid) {
    return rhs_core(c, grid, p.sigma_t, p.kappa_t, 1.0, 1.0 / p.m);
}

SpectralField rhs_rescaled(const SpectralField& c, const SimParams& p, const Grid& grid) {
    if (!p.has_epsilon())
        throw std::invalid_argument("rhs_rescaled: epsilon must be set");
    const double e = p.epsilon;
    return rhs_core(c, grid, p.sigma_t, p.kappa_t, 1.0 / e, 1.0 / (e * e));
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "exponential-splitting-rk2") return Scheme::ExpRK2;
    if (name == "exponential-splitting-rk4") return Scheme::ExpRK4;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string scheme_name(Scheme s) {
    return s == Scheme::ExpRK2 ? "exponential-splitting-rk2"
                               : "exponential-splitting-rk4";
}

double cfl_limit(const Grid& grid, double sigma_t, double adv_scale, double safety) {
    const double v_max =
        adv_scale * (grid.abs_nu_max() + std::sqrt(2.0 * sigma_t * grid.n_hermite));
    const double d_theta = two_pi / grid.n_theta;
    return safety * d_theta / v_max;
}

void step(SpectralField& c, const Grid& grid, double sigma_t, double kappa_t,
          double adv_scale, double fp_rate, double dt, Scheme scheme) {
    const std::vector<double> e_full = decay_factors(c.n_hermite, fp_rate, dt);
    const std::vector<double> e_half = decay_factors(c.n_hermite, fp_rate, 0.5 * dt);
    auto advect = [&](const SpectralField& s) {
        return rhs_core(s, grid, sigma_t, kappa_t, adv_scale, 0.0);
    };

    if (scheme == Scheme::ExpRK2) {
        SpectralField a1 = advect(c);
        SpectralField mid = c;
        mid.axpy(dt, a1);
        apply_row_decay(mid, e_full);
        SpectralField a2 = advect(mid);
        apply_row_decay(c, e_full);
        apply_row_decay(a1, e_full);
        c.axpy(0.5 * dt, a1);
        c.axpy(0.5 * dt, a2);
        return;
    }

    // Four-stage exponential integrator with the classical weights; every
    // decay factor applied is <= 1, so the stiff rows never amplify.
    SpectralField a1 = advect(c);

    SpectralField s2 = c;
    s2.axpy(0.5 * dt, a1);
    apply_row_decay(s2, e_half);
    SpectralField a2 = advect(s2);

    SpectralField s3 = c;
    apply_row_decay(s3, e_half);
    s3.axpy(0.5 * dt, a2);
    SpectralField a3 = advect(s3);

    SpectralField s4 = c;
    apply_row_decay(s4, e_full);
    {
        SpectralField tmp = a3;
        apply_row_decay(tmp, e_half);
        s4.axpy(dt, tmp);
    }
    SpectralField a4 = advect(s4);

    apply_row_decay(c, e_full);
    apply_row_decay(a1, e_full);
    c.axpy(dt / 6.0, a1);
    {
        SpectralField tmp = a2;
        tmp.axpy(1.0, a3);
        apply_row_decay(tmp, e_half);
        c.axpy(dt / 3.0, tmp);
    }
    c.axpy(dt / 6.0, a4);
}

void step(SpectralField& c, const SimParams& p, const Grid& grid, double dt,
          Scheme scheme) {
    step(c, grid, p.sigma_t, p.kappa_t, 1.0, 1.0 / p.m, dt, scheme);
}

void step_rescaled(SpectralField& c, const SimParams& p, const Grid& grid, double dt,
                   Scheme scheme) {
    if (!p.has_epsilon())
        throw std::invalid_argument("step_rescaled: epsilon must be set");
    step(c, grid, p.sigma_t, p.kappa_t, 1.0 / p.epsilon,
         1.0 / (p.epsilon * p.epsilon), dt, scheme);
}

std::vector<double> Trajectory::times() const {
    std::vector<double> t(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) t[i] = samples[i].t;
    return t;
}

std::vector<double> Trajectory::deviation_norms() const {
    std::vector<double> v(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        v[i] = std::sqrt(std::max(0.0, samples[i].l2gamma_sq));
    return v;
}

namespace {

double micro_err_sq_weighted(const SpectralField& c, const Grid& grid) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) {
        double node = 0.0;
        for (int n = 1; n <= c.n_hermite; ++n)
            for (int k = c.k_min(); k <= c.k_max(); ++k) node += std::norm(c.at(j, n, k));
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

EnergySample make_sample(double t, const SpectralField& c, const Grid& grid,
                         double sigma_t, const EquilibriumState& eq, double alpha,
                         bool rescaled) {
    EnergySample s;
    s.t = t;
    s.mass = total_mass(c);
    s.l2gamma_sq = l2_gamma_sq(c, grid, &eq);
    s.i_f = dissipation(c, grid, sigma_t);
    s.a = functional_a(c, grid, sigma_t, eq);
    s.e = 0.5 * s.l2gamma_sq + alpha * s.a;
    s.n_err_sq = n_err_sq(c, grid, eq);
    if (rescaled) {
        s.micro_err = std::sqrt(std::max(0.0, micro_err_sq_weighted(c, grid)));
        s.l2_minv = std::sqrt(std::max(0.0, l2_minv_sq(c, grid)));
        s.dtheta_l2_minv = std::sqrt(std::max(0.0, dtheta_l2_minv_sq(c, grid)));
    }
    return s;
}

Trajectory run_impl(const SpectralField& initial, const SimParams& p, const Grid& grid,
                    const SolverConfig& cfg, const SnapshotSink& sink, bool rescaled) {
    if (initial.n_nodes != grid.n_nodes() || initial.n_hermite != grid.n_hermite ||
        initial.n_theta != grid.n_theta)
        throw std::invalid_argument("run: field shape does not match the grid");
    if (!(cfg.t_final > 0.0))
        throw std::invalid_argument("run: t_final must be positive");
    if (cfg.stride < 1)
        throw std::invalid_argument("run: stride must be at least 1");
    if (!initial.is_finite()) throw SolverAbort(0.0);

    const double mass = total_mass(initial);
    if (!(mass > 0.0))
        throw std::invalid_argument("run: initial mass must be positive");
    EquilibriumState eq = equilibrium(mass, grid, p.sigma_t);
    for (int j = 0; j < grid.n_nodes(); ++j) {
        const double node_mass = two_pi * initial.at(j, 0, 0).real();
        const double expect = two_pi * eq.n_inf[j];
        if (std::abs(node_mass - expect) > 1e-8 * std::max(1.0, std::abs(mass)))
            throw std::invalid_argument(
                "run: initial per-node marginal at node " + std::to_string(j) +
                " is inconsistent with the equilibrium split");
    }

    const double adv_scale = rescaled ? 1.0 / p.epsilon : 1.0;
    const double fp_rate = rescaled ? 1.0 / (p.epsilon * p.epsilon) : 1.0 / p.m;
    const double cfl = cfl_limit(grid, p.sigma_t, adv_scale, cfg.cfl_safety);

    Trajectory traj;
    traj.rescaled = rescaled;
    // For scale-separated runs the energy weight is evaluated at the
    // equivalent inertia epsilon (the two systems coincide under the time
    // rescaling t -> t/epsilon at m = epsilon).
    SimParams alpha_params = p;
    if (rescaled) alpha_params = SimParams::from_rescaled(p.epsilon, p.kappa_t, p.sigma_t);
    traj.alpha = default_alpha(alpha_params);

    double dt = cfg.dt;
    if (dt <= 0.0) {
        dt = cfl;
    } else if (dt > cfl * (1.0 + 1e-12)) {
        if (cfg.cfl_mode == CflMode::Refuse)
            throw std::invalid_argument("run: dt exceeds the advective CFL limit " +
                                        std::to_string(cfl));
        traj.warnings.push_back("dt exceeds the advective CFL limit " +
                                std::to_string(cfl));
    }

    const long n_full = static_cast<long>(std::floor(cfg.t_final / dt + 1e-12));
    const double rem = cfg.t_final - double(n_full) * dt;
    const bool has_rem = rem > 1e-12 * dt;
    const long n_steps = n_full + (has_rem ? 1 : 0);

    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t snap_idx = 0;

    SpectralField c = initial;
    auto maybe_snapshot = [&](double t) {
        while (sink && snap_idx < snaps.size() && snaps[snap_idx] <= t + 1e-12) {
            sink(t, c);
            ++snap_idx;
        }
    };

    traj.samples.push_back(make_sample(0.0, c, grid, p.sigma_t, eq, traj.alpha, rescaled));
    maybe_snapshot(0.0);

    for (long s = 0; s < n_steps; ++s) {
        const bool last = s == n_steps - 1;
        const double h = (last && has_rem) ? rem : dt;
        step(c, grid, p.sigma_t, p.kappa_t, adv_scale, fp_rate, h, cfg.scheme);
        const double t = last ? cfg.t_final : double(s + 1) * dt;
        const bool want_sample = last || ((s + 1) % cfg.stride == 0);
        if (want_sample) {
            if (!c.is_finite()) throw SolverAbort(t);
            traj.samples.push_back(
                make_sample(t, c, grid, p.sigma_t, eq, traj.alpha, rescaled));
        }
        maybe_snapshot(t);
    }

    traj.final_field = std::move(c);
    return traj;
}

} // namespace

Trajectory run(const SpectralField& initial, const SimParams& p, const Grid& grid,
               const SolverConfig& cfg, const SnapshotSink& sink) {
    return run_impl(initial, p, grid, cfg, sink, false);
}

Trajectory run_rescaled(const SpectralField& initial, const SimParams& p,
                        const Grid& grid, const SolverConfig& cfg,
                        const SnapshotSink& sink) {
    if (!p.has_epsilon())
        throw std::invalid_argument("run_rescaled: epsilon must be set");
    return run_impl(initial, p, grid, cfg, sink, true);
}

MomentResiduals moment_balance_residual(const SpectralField& c, const SimParams& p,
                                        const Grid& grid) {
    SpectralField dc = rhs(c, p, grid);
    MomentModes m = moments(c, grid, p.sigma_t);
    MomentModes dm = moments(dc, grid, p.sigma_t);

    cplx rho1{0.0, 0.0};
    for (int j = 0; j < c.n_nodes; ++j) rho1 += c.at(j, 0, 1);
    const cplx f1 = coupling_mode(rho1);
    const int k_pair = c.k_max() - 1;

    MomentResiduals r;
    const std::size_t sz = static_cast<std::size_t>(c.n_nodes) * c.n_theta;
    r.r_n.resize(sz);
    r.r_j.resize(sz);

    std::vector<cplx> rn_hat(c.n_theta), rj_hat(c.n_theta);
    for (int j = 0; j < c.n_nodes; ++j) {
        const double nu = grid.nodes[j].nu;
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            const int ki = k - c.k_min();
            const cplx ik{0.0, double(k)};
            rn_hat[ki] = dm.n_hat[m.idx(j, k)] +
                         ik * (m.j_hat[m.idx(j, k)] + nu * m.n_hat[m.idx(j, k)]);
            cplx conv{0.0, 0.0};
            if (std::abs(k) <= k_pair) {
                if (k - 1 >= -k_pair) conv += f1 * m.n_hat[m.idx(j, k - 1)];
                if (k + 1 <= k_pair) conv += std::conj(f1) * m.n_hat[m.idx(j, k + 1)];
            }
            rj_hat[ki] = dm.j_hat[m.idx(j, k)] +
                         ik * (m.p_hat[m.idx(j, k)] + nu * m.j_hat[m.idx(j, k)]) -
                         p.kappa_t * conv + m.j_hat[m.idx(j, k)] / p.m;
        }
        for (int i = 0; i < grid.n_theta; ++i) {
            const double rn = synth_real(rn_hat, c.k_min(), grid.theta[i]);
            const double rj = synth_real(rj_hat, c.k_min(), grid.theta[i]);
            r.r_n[static_cast<std::size_t>(j) * c.n_theta + i] = rn;
            r.r_j[static_cast<std::size_t>(j) * c.n_theta + i] = rj;
            r.max_abs_n = std::max(r.max_abs_n, std::abs(rn));
            r.max_abs_j = std::max(r.max_abs_j, std::abs(rj));
        }
    }
    return r;
}

} // namespace ksfp
