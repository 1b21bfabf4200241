#include "ksfp/diffusion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "ksfp/hypo.hpp"

namespace ksfp {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

// Nonlinear flux term -kappa_t d_theta((sin * rho) rho) in mode space.  The
// shift is restricted to paired modes so the unpaired Nyquist row stays
// inert, matching the kinetic right-hand side.
std::vector<cplx> dd_flux(const DDState& s, double kappa_t) {
    const int k_lo = s.k_min();
    const int k_hi = s.k_max();
    const int k_pair = k_hi - 1;
    std::vector<cplx> out(s.rho_hat.size(), cplx{0.0, 0.0});
    if (kappa_t == 0.0) return out;
    const cplx f1 = coupling_mode(s.at(1));
    const cplx f1c = std::conj(f1);
    for (int k = k_lo; k <= k_hi; ++k) {
        cplx prod{0.0, 0.0};
        if (std::abs(k) <= k_pair) {
            if (k - 1 >= -k_pair) prod += f1 * s.at(k - 1);
            if (k + 1 <= k_pair) prod += f1c * s.at(k + 1);
        }
        out[static_cast<std::size_t>(k - k_lo)] =
            cplx{0.0, -double(k) * kappa_t} * prod;
    }
    return out;
}

bool dd_finite(const DDState& s) {
    for (const cplx& z : s.rho_hat)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

struct LogLogFit {
    double slope = 0.0;
    double r_squared = 1.0;
};

LogLogFit loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n)
        throw std::invalid_argument("loglog fit needs at least two points");
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("loglog fit needs positive data");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += lx[i];
        ym += ly[i];
    }
    xm /= double(n);
    ym /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - xm) * (lx[i] - xm);
        sxy += (lx[i] - xm) * (ly[i] - ym);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("loglog fit needs distinct abscissae");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = ym + fit.slope * (lx[i] - xm);
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - ym) * (ly[i] - ym);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace

DDState dd_state_from_samples(const std::vector<double>& rho_samples) {
    DDState s;
    s.n_theta = static_cast<int>(rho_samples.size());
    s.rho_hat = dft_forward_real(rho_samples);
    return s;
}

std::vector<double> dd_samples(const DDState& s) {
    std::vector<double> out(static_cast<std::size_t>(s.n_theta));
    for (int i = 0; i < s.n_theta; ++i)
        out[static_cast<std::size_t>(i)] =
            synth_real(s.rho_hat, s.k_min(), two_pi * i / s.n_theta);
    return out;
}

double dd_mass(const DDState& s) { return two_pi * s.at(0).real(); }

void dd_step(DDState& s, double sigma_t, double kappa_t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dd_step: dt must be positive");
    const int k_lo = s.k_min();
    const std::size_t m = s.rho_hat.size();
    std::vector<double> decay(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double k = double(k_lo + static_cast<int>(i));
        decay[i] = std::exp(-sigma_t * k * k * dt);
    }

    const std::vector<cplx> a1 = dd_flux(s, kappa_t);
    DDState mid = s;
    for (std::size_t i = 0; i < m; ++i)
        mid.rho_hat[i] = decay[i] * (s.rho_hat[i] + dt * a1[i]);
    const std::vector<cplx> a2 = dd_flux(mid, kappa_t);
    for (std::size_t i = 0; i < m; ++i)
        s.rho_hat[i] = decay[i] * s.rho_hat[i] +
                       0.5 * dt * (decay[i] * a1[i] + a2[i]);
    s.time += dt;
}

DDState dd_run(DDState init, double sigma_t, double kappa_t, double t_final, double dt) {
    const double span = t_final - init.time;
    if (!(span > 0.0))
        throw std::invalid_argument("dd_run: t_final must exceed the state time");
    if (dt <= 0.0) {
        const double d_theta = two_pi / init.n_theta;
        const double v_max = kappa_t * std::abs(dd_mass(init));
        dt = span / 200.0;
        if (v_max > 0.0) dt = std::min(dt, 0.25 * d_theta / v_max);
    }
    const long n_full = static_cast<long>(std::floor(span / dt + 1e-12));
    const double rem = span - double(n_full) * dt;
    const bool has_rem = rem > 1e-12 * dt;
    const double t0 = init.time;
    const long n_steps = n_full + (has_rem ? 1 : 0);
    for (long s = 0; s < n_steps; ++s) {
        const bool last = s == n_steps - 1;
        dd_step(init, sigma_t, kappa_t, (last && has_rem) ? rem : dt);
        init.time = last ? t_final : t0 + double(s + 1) * dt;
        if (!dd_finite(init)) throw SolverAbort(init.time);
    }
    return init;
}

double micro_distance(const SpectralField& c, const Grid& grid) {
    if (grid.n_nodes() != 1 || c.n_nodes != 1)
        throw std::invalid_argument("micro_distance: single-node grid required");
    double acc = 0.0;
    for (int n = 1; n <= c.n_hermite; ++n)
        for (int k = c.k_min(); k <= c.k_max(); ++k) acc += std::norm(c.at(0, n, k));
    return std::sqrt(two_pi * acc);
}

double functional_a_eps(const SpectralField& f_eps, const DDState& rho_dd,
                        const SimParams& p, const Grid& grid) {
    if (grid.n_nodes() != 1 || f_eps.n_nodes != 1)
        throw std::invalid_argument("functional_a_eps: single-node grid required");
    if (rho_dd.n_theta != f_eps.n_theta)
        throw std::invalid_argument("functional_a_eps: mode ranges disagree");
    const double eps = p.has_epsilon() ? p.epsilon : 0.0;
    const double sq_sigma = std::sqrt(p.sigma_t);

    const cplx mass_gap = rho_dd.at(0) - f_eps.at(0, 0, 0);
    if (std::abs(mass_gap) > 1e-10 * std::max(1.0, std::abs(rho_dd.at(0))))
        throw std::invalid_argument("functional_a_eps: masses of rho and rho_eps differ");

    std::vector<cplx> source(static_cast<std::size_t>(f_eps.n_theta));
    for (int k = f_eps.k_min(); k <= f_eps.k_max(); ++k) {
        const cplx j_hat = sq_sigma * f_eps.at(0, 1, k);
        cplx s = rho_dd.at(k) - f_eps.at(0, 0, k) + eps * cplx{0.0, double(k)} * j_hat;
        if (k == 0) s = cplx{0.0, 0.0}; // roundoff-level mass defect dropped
        source[static_cast<std::size_t>(k - f_eps.k_min())] = s;
    }
    AuxPotential v = poisson_solve_theta(source, 1, f_eps.n_theta);
    return 0.5 * aux_grad_sq(v, grid);
}

BandRow band_check(double a, double err_hm1, double dtheta_f_norm, double epsilon,
                     double sigma_t, double c_p) {
    if (a < 0.0 || err_hm1 < 0.0 || dtheta_f_norm < 0.0 || epsilon < 0.0)
        throw std::invalid_argument("band_check: inputs must be nonnegative");
    BandRow row;
    row.a = a;
    row.err_hm1 = err_hm1;
    row.dtheta_norm = dtheta_f_norm;
    const double err2 = err_hm1 * err_hm1;
    const double d2 = dtheta_f_norm * dtheta_f_norm;
    const double cross = sigma_t * c_p * c_p * epsilon * epsilon * d2;
    row.upper = err2 + cross;
    row.lower = 0.25 * err2 - 0.5 * cross;
    row.margin_upper = row.upper - a;
    row.margin_lower = a - row.lower;
    const double scale = std::max({1.0, a, row.upper, std::abs(row.lower)});
    const double slack = 1e-12 * scale;
    row.ok = row.margin_upper >= -slack && row.margin_lower >= -slack;
    return row;
}

GrowthReport growth_check(const Trajectory& traj, const SimParams& p) {
    if (!traj.rescaled)
        throw std::invalid_argument("growth_check: needs a scale-separated trajectory");
    if (traj.samples.empty())
        throw std::invalid_argument("growth_check: empty trajectory");
    const EnergySample& first = traj.samples.front();
    GrowthReport rep;
    rep.growth_c = (p.kappa_t * first.mass) * (p.kappa_t * first.mass) / p.sigma_t;
    rep.prefactor = first.dtheta_l2_minv + 3.0 * first.l2_minv;
    for (const EnergySample& s : traj.samples) {
        const double lhs = s.l2_minv + s.dtheta_l2_minv;
        const double bound = rep.prefactor * std::exp(rep.growth_c * s.t);
        rep.t.push_back(s.t);
        rep.lhs.push_back(lhs);
        rep.bound.push_back(bound);
        if (bound > 0.0) rep.max_ratio = std::max(rep.max_ratio, lhs / bound);
        if (lhs > bound * (1.0 + 1e-12)) ++rep.n_violations;
    }
    return rep;
}

std::string GrowthReport::text() const {
    std::string out;
    out += "growth exponent C = " + fmt(growth_c) + "\n";
    out += "prefactor        = " + fmt(prefactor) + "\n";
    out += "samples          = " + std::to_string(t.size()) + "\n";
    out += "max lhs/bound    = " + fmt(max_ratio) + "\n";
    out += "violations       = " + std::to_string(n_violations) + "\n";
    return out;
}

double moment_relation_residual(const SpectralField& c, const SimParams& p,
                                const Grid& grid) {
    if (!p.has_epsilon())
        throw std::invalid_argument("moment_relation_residual: epsilon must be set");
    const double eps = p.epsilon;
    SpectralField dc = rhs_rescaled(c, p, grid);
    MomentModes m = moments(c, grid, p.sigma_t);
    MomentModes dm = moments(dc, grid, p.sigma_t);

    cplx rho1{0.0, 0.0};
    for (int j = 0; j < c.n_nodes; ++j) rho1 += c.at(j, 0, 1);
    const cplx f1 = coupling_mode(rho1);
    const int k_pair = c.k_max() - 1;

    double max_abs = 0.0;
    std::vector<cplx> r_hat(static_cast<std::size_t>(c.n_theta));
    for (int j = 0; j < c.n_nodes; ++j) {
        const double nu = grid.nodes[j].nu;
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            const cplx ik{0.0, double(k)};
            cplx conv{0.0, 0.0};
            if (std::abs(k) <= k_pair) {
                if (k - 1 >= -k_pair) conv += f1 * m.n_hat[m.idx(j, k - 1)];
                if (k + 1 <= k_pair) conv += std::conj(f1) * m.n_hat[m.idx(j, k + 1)];
            }
            r_hat[static_cast<std::size_t>(k - c.k_min())] =
                dm.n_hat[m.idx(j, k)] - eps * ik * dm.j_hat[m.idx(j, k)] +
                (nu / eps) * ik * m.n_hat[m.idx(j, k)] -
                ik * (ik * m.p_hat[m.idx(j, k)] + nu * ik * m.j_hat[m.idx(j, k)] -
                      p.kappa_t * conv);
        }
        for (int i = 0; i < grid.n_theta; ++i)
            max_abs = std::max(max_abs,
                               std::abs(synth_real(r_hat, c.k_min(), grid.theta[i])));
    }
    return max_abs;
}

EpsSweepResult eps_sweep(const std::vector<double>& rho_in, const SimParams& base,
                         double t_final, const std::vector<double>& eps_list,
                         const Grid& grid, const SweepOptions& opt) {
    if (grid.n_nodes() != 1)
        throw std::invalid_argument("eps_sweep: single-node grid required");
    if (static_cast<int>(rho_in.size()) != grid.n_theta)
        throw std::invalid_argument("eps_sweep: rho_in must sample the grid angles");
    if (eps_list.empty())
        throw std::invalid_argument("eps_sweep: empty eps list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0))
            throw std::invalid_argument("eps_sweep: eps must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("eps_sweep: eps must be strictly decreasing");
    }
    if (!(t_final > 0.0))
        throw std::invalid_argument("eps_sweep: t_final must be positive");

    const std::vector<cplx> rho_hat_in = dft_forward_real(rho_in);
    const std::size_t zero_mode = static_cast<std::size_t>(0 - grid.k_min());
    const double mass = two_pi * rho_hat_in[zero_mode].real();
    if (!(mass > 0.0))
        throw std::invalid_argument("eps_sweep: initial mass must be positive");

    EpsSweepResult result;
    result.eps_values = eps_list;
    result.errors_hminus1.assign(eps_list.size(), 0.0);
    result.micro_errors.assign(eps_list.size(), 0.0);

    DDState dd_final = dd_run(dd_state_from_samples(rho_in), base.sigma_t,
                              base.kappa_t, t_final, opt.dd_dt);

    SpectralField f_in = SpectralField::zero_like(grid);
    for (int k = f_in.k_min(); k <= f_in.k_max(); ++k)
        f_in.at(0, 0, k) = rho_hat_in[static_cast<std::size_t>(k - f_in.k_min())];

    std::vector<std::string> budget_warnings(eps_list.size());
    std::vector<std::exception_ptr> failures(eps_list.size());

    auto run_case = [&](std::size_t i) {
        const double eps = eps_list[i];
        SimParams pe = SimParams::from_rescaled(eps, base.kappa_t, base.sigma_t, eps);
        const double cfl = cfl_limit(grid, pe.sigma_t, 1.0 / eps, opt.cfl_safety);
        SolverConfig cfg;
        cfg.dt = std::min(cfl, opt.dt_eps_factor * eps * eps);
        cfg.t_final = t_final;
        cfg.scheme = opt.scheme;
        cfg.stride = 1 << 26;
        const double n_est = std::ceil(t_final / cfg.dt);
        if (n_est > double(opt.step_budget))
            budget_warnings[i] = "eps = " + fmt(eps) + " needs about " +
                                 std::to_string(static_cast<long>(n_est)) +
                                 " steps, over the budget of " +
                                 std::to_string(opt.step_budget);
        Trajectory traj = run_rescaled(f_in, pe, grid, cfg);
        std::vector<cplx> diff(static_cast<std::size_t>(grid.n_theta));
        for (int k = f_in.k_min(); k <= f_in.k_max(); ++k)
            diff[static_cast<std::size_t>(k - f_in.k_min())] =
                traj.final_field.at(0, 0, k) - dd_final.at(k);
        result.errors_hminus1[i] = hminus1_from_modes(diff, f_in.k_min(), false);
        result.micro_errors[i] = micro_distance(traj.final_field, grid);
    };

    const int workers = std::max(1, std::min<int>(opt.workers,
                                                  static_cast<int>(eps_list.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < eps_list.size(); ++i) run_case(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= eps_list.size()) return;
                try {
                    run_case(i);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
        for (const std::exception_ptr& e : failures)
            if (e) std::rethrow_exception(e);
    }

    for (const std::string& w : budget_warnings)
        if (!w.empty()) result.warnings.push_back(w);

    LogLogFit fit = loglog_fit(eps_list, result.errors_hminus1);
    result.fitted_slope = fit.slope;
    result.fit_r_squared = fit.r_squared;
    LogLogFit mfit = loglog_fit(eps_list, result.micro_errors);
    result.micro_slope = mfit.slope;
    result.micro_r_squared = mfit.r_squared;
    return result;
}

std::string EpsSweepResult::text() const {
    std::string out;
    out += "eps sweep over " + std::to_string(eps_values.size()) + " values\n";
    for (std::size_t i = 0; i < eps_values.size(); ++i)
        out += "  eps = " + fmt(eps_values[i]) +
               "  err_hminus1 = " + fmt(errors_hminus1[i]) +
               "  micro_err = " + fmt(micro_errors[i]) + "\n";
    out += "fitted slope (H^-1, Bessel convention) = " + fmt(fitted_slope) +
           "  r^2 = " + fmt(fit_r_squared) + "\n";
    out += "fitted slope (micro)                   = " + fmt(micro_slope) +
           "  r^2 = " + fmt(micro_r_squared) + "\n";
    for (const std::string& w : warnings) out += "warning: " + w + "\n";
    return out;
}

} // namespace ksfp
