#include "ksfp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksfp/diffusion.hpp"
#include "ksfp/hypo.hpp"
#include "ksfp/io.hpp"
#include "ksfp/particles.hpp"
#include "ksfp/solver.hpp"
#include "ksfp/spectral_ops.hpp"
#include "ksfp/version.hpp"

namespace ksfp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string num6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// name -> content, written under out_dir in this order.
using ArtifactList = std::vector<std::pair<std::string, std::string>>;

int handle_kinetic(const ExperimentConfig& cfg, bool rescaled, ArtifactList& arts,
                   std::string& report) {
    const SimParams p = cfg.params();
    const Grid grid = cfg.grid();
    const SpectralField f0 = build_initial(cfg.initial, grid, p);
    const SolverConfig scfg = cfg.solver();

    std::vector<std::pair<double, SpectralField>> snaps;
    SnapshotSink sink = nullptr;
    if (!scfg.snapshot_times.empty())
        sink = [&snaps](double t, const SpectralField& c) { snaps.emplace_back(t, c); };

    const Trajectory traj = rescaled ? run_rescaled(f0, p, grid, scfg, sink)
                                     : run(f0, p, grid, scfg, sink);

    arts.emplace_back("energy.csv", energy_csv(traj));

    const EquilibriumState eq = equilibrium(cfg.initial.mass, grid, p.sigma_t);
    const RegimeReport reg = regime_check(p, eq, grid, cfg.c_inf);
    arts.emplace_back("regime.txt", reg.text());

    if (rescaled) arts.emplace_back("growth.txt", growth_check(traj, p).text());

    for (std::size_t i = 0; i < snaps.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof(name), "snapshot_%03zu.bin", i);
        const SnapshotMeta meta{p.sigma_t, p.kappa_t, p.m, snaps[i].first};
        arts.emplace_back(name, snapshot_bytes(snaps[i].second, meta));
    }

    const EnergySample& first = traj.samples.front();
    const EnergySample& last = traj.samples.back();
    double mass_drift = 0.0;
    double e_uptick = 0.0; // largest relative increase of E between samples
    const double e_scale = std::max(std::abs(first.e), 1e-300);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        mass_drift = std::max(mass_drift, std::abs(traj.samples[i].mass - first.mass));
        if (i > 0)
            e_uptick = std::max(e_uptick,
                                (traj.samples[i].e - traj.samples[i - 1].e) / e_scale);
    }
    double marginal_drift = 0.0;
    for (int j = 0; j < grid.n_nodes(); ++j)
        marginal_drift = std::max(
            marginal_drift, kTwoPi * std::abs(traj.final_field.at(j, 0, 0) - f0.at(j, 0, 0)));

    report += "kind: " + cfg.kind + "\n";
    report += "samples: " + std::to_string(traj.samples.size()) + ", t: " + num6(first.t) +
              " -> " + num6(last.t) + "\n";
    report += "mass: " + num(first.mass) + " -> " + num(last.mass) + " (drift " +
              num6(mass_drift) + ")\n";
    report += "per-node marginal drift: " + num6(marginal_drift) + "\n";
    report += "deviation ||f - f_inf||: " + num6(std::sqrt(first.l2gamma_sq)) + " -> " +
              num6(std::sqrt(last.l2gamma_sq)) + "\n";
    report += "modified energy: " + num6(first.e) + " -> " + num6(last.e) +
              " (max relative uptick " + num6(std::max(e_uptick, 0.0)) + ", alpha " +
              num6(traj.alpha) + ")\n";
    if (rescaled) report += "final micro distance: " + num6(last.micro_err) + "\n";
    report += std::string("regime condition: ") +
              (reg.satisfied_main ? "satisfied" : "not satisfied") + " (" +
              num6(reg.lhs_main) + " vs " + num6(reg.rhs_main) + ")\n";
    for (const auto& w : traj.warnings) report += "warning: " + w + "\n";
    return 0;
}

int handle_dd(const ExperimentConfig& cfg, ArtifactList& arts, std::string& report) {
    const SimParams p = cfg.params();
    const Grid grid = cfg.grid();
    const std::vector<double> rho0 = initial_density_samples(cfg.initial, grid, p);
    DDState s0 = dd_state_from_samples(rho0);
    const double mass0 = dd_mass(s0);
    const DDState sT = dd_run(s0, p.sigma_t, p.kappa_t, cfg.t_final, cfg.dt);
    const std::vector<double> rhoT = dd_samples(sT);

    std::string csv = "theta,rho_initial,rho_final\n";
    for (int i = 0; i < grid.n_theta; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        csv += num(grid.theta[u]) + "," + num(rho0[u]) + "," + num(rhoT[u]) + "\n";
    }
    arts.emplace_back("dd_rho.csv", std::move(csv));

    std::string mcsv = "k,re,im\n";
    for (int k = sT.k_min(); k <= sT.k_max(); ++k)
        mcsv += std::to_string(k) + "," + num(sT.at(k).real()) + "," +
                num(sT.at(k).imag()) + "\n";
    arts.emplace_back("dd_modes.csv", std::move(mcsv));

    const double massT = dd_mass(sT);
    report += "kind: dd\n";
    report += "t: 0 -> " + num6(sT.time) + "\n";
    report += "mass: " + num(mass0) + " -> " + num(massT) + " (drift " +
              num6(std::abs(massT - mass0)) + ")\n";
    report += "final density range: [" +
              num6(*std::min_element(rhoT.begin(), rhoT.end())) + ", " +
              num6(*std::max_element(rhoT.begin(), rhoT.end())) + "]\n";
    return 0;
}

int handle_sweep(const ExperimentConfig& cfg, ArtifactList& arts, std::string& report) {
    const SimParams p = cfg.params();
    const Grid grid = cfg.grid();
    const std::vector<double> rho0 = initial_density_samples(cfg.initial, grid, p);

    SweepOptions opt;
    opt.scheme = scheme_from_name(cfg.scheme);
    opt.step_budget = cfg.step_budget;
    opt.workers = workers_from_env();

    const EpsSweepResult r = eps_sweep(rho0, p, cfg.t_final, cfg.eps_list, grid, opt);

    arts.emplace_back("sweep.csv", sweep_csv(r));
    arts.emplace_back("err_curve.csv",
                      two_column_csv("eps", "err_hminus1", r.eps_values, r.errors_hminus1));
    arts.emplace_back("micro_curve.csv",
                      two_column_csv("eps", "micro_err", r.eps_values, r.micro_errors));

    report += "kind: sweep\n";
    report += r.text();
    return 0;
}

int handle_verify(const ExperimentConfig& cfg, ArtifactList& arts, std::string& report) {
    const SimParams p = cfg.params();
    const Grid grid = cfg.grid();

    const InequalityReport bat =
        inequality_battery(grid, cfg.sigma_list, cfg.n_fields, cfg.seed, cfg.tol);
    const EllipticCheck ell =
        elliptic_battery(grid, 100, cfg.seed + 0x9e3779b97f4a7c15ULL, cfg.tol);
    const EquilibriumState eq = equilibrium(cfg.initial.mass, grid, p.sigma_t);
    const RegimeReport reg = regime_check(p, eq, grid, cfg.c_inf);

    arts.emplace_back("battery.csv", bat.csv());
    arts.emplace_back("elliptic.txt", ell.text());
    arts.emplace_back("regime.txt", reg.text());

    const bool ok = bat.violations == 0 && ell.violations == 0;
    report += "kind: verify\n";
    report += bat.text();
    report += ell.text();
    report += reg.text();
    report += ok ? "verdict: all inequality checks hold\n"
                 : "verdict: VIOLATIONS FOUND\n";
    return ok ? 0 : 4;
}

// Shared by the particles and compare kinds: EM evolution with a per-step
// order-parameter series.
std::string particle_series(ParticleEnsemble& ens, const SimParams& p, double dt,
                            long n_steps, int workers) {
    std::string csv = "t,r,psi\n";
    OrderParameter op = order_parameter(ens);
    csv += num(ens.time) + "," + num(op.r) + "," + num(op.psi) + "\n";
    for (long s = 0; s < n_steps; ++s) {
        em_step(ens, p, dt, workers);
        op = order_parameter(ens);
        csv += num(ens.time) + "," + num(op.r) + "," + num(op.psi) + "\n";
    }
    return csv;
}

long particle_step_count(double t_final, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("particles: dt must be positive and finite");
    if (!(t_final > 0.0) || !std::isfinite(t_final))
        throw std::invalid_argument("particles: t_final must be positive and finite");
    long n = std::lround(t_final / dt);
    return n < 1 ? 1 : n;
}

int handle_particles(const ExperimentConfig& cfg, ArtifactList& arts,
                     std::string& report) {
    const SimParams p = cfg.params();
    const Grid grid = cfg.grid();
    const int workers = workers_from_env();

    const SpectralField f0 = build_initial(cfg.initial, grid, p);
    const std::vector<cplx> modes = rho_modes(f0);
    const int km = f0.k_min();
    ParticleEnsemble ens = sample_initial(
        static_cast<std::size_t>(cfg.n_particles),
        [&modes, km](double th) { return synth_real(modes, km, th); }, grid, p.sigma_t,
        cfg.seed);

    const long n_steps = particle_step_count(cfg.t_final, cfg.particle_dt);
    arts.emplace_back("particles.csv",
                      particle_series(ens, p, cfg.particle_dt, n_steps, workers));

    const OrderParameter op = order_parameter(ens);
    report += "kind: particles\n";
    report += "particles: " + std::to_string(ens.size()) +
              ", steps: " + std::to_string(n_steps) + ", dt: " + num6(cfg.particle_dt) +
              ", workers: " + std::to_string(workers) + "\n";
    report += "order parameter at t = " + num6(ens.time) + ": r = " + num6(op.r) +
              ", psi = " + num6(op.psi) + "\n";
    return 0;
}

int handle_compare(const ExperimentConfig& cfg, ArtifactList& arts, std::string& report) {
    const SimParams p = cfg.params();
    const Grid grid = cfg.grid();
    const int workers = workers_from_env();

    const SpectralField f0 = build_initial(cfg.initial, grid, p);
    const Trajectory traj = run(f0, p, grid, cfg.solver());
    arts.emplace_back("energy.csv", energy_csv(traj));

    const std::vector<cplx> modes0 = rho_modes(f0);
    const int km = f0.k_min();
    ParticleEnsemble ens = sample_initial(
        static_cast<std::size_t>(cfg.n_particles),
        [&modes0, km](double th) { return synth_real(modes0, km, th); }, grid, p.sigma_t,
        cfg.seed);
    const long n_steps = particle_step_count(cfg.t_final, cfg.particle_dt);
    arts.emplace_back("particles.csv",
                      particle_series(ens, p, cfg.particle_dt, n_steps, workers));

    const std::vector<double> emp = empirical_density(ens, cfg.n_bins, cfg.initial.mass);
    const std::vector<cplx> modesT = rho_modes(traj.final_field);
    const std::vector<double> kin = bin_averages(modesT, traj.final_field.k_min(), cfg.n_bins);
    const double l1 = compare_to_kinetic(emp, kin);

    std::string dc = "bin_center,empirical,kinetic\n";
    for (int b = 0; b < cfg.n_bins; ++b) {
        const double center = (b + 0.5) * kTwoPi / cfg.n_bins;
        dc += num(center) + "," + num(emp[static_cast<std::size_t>(b)]) + "," +
              num(kin[static_cast<std::size_t>(b)]) + "\n";
    }
    arts.emplace_back("density_compare.csv", std::move(dc));

    report += "kind: compare\n";
    report += "kinetic t_final: " + num6(traj.samples.back().t) +
              ", particle t_final: " + num6(ens.time) + "\n";
    report += "particles: " + std::to_string(ens.size()) +
              ", steps: " + std::to_string(n_steps) + ", workers: " +
              std::to_string(workers) + "\n";
    report += "density L1 distance over " + std::to_string(cfg.n_bins) +
              " bins: " + num6(l1) + "\n";
    for (const auto& w : traj.warnings) report += "warning: " + w + "\n";
    return 0;
}

} // namespace

int workers_from_env() {
    const char* s = std::getenv("KSFP_WORKERS");
    if (s == nullptr || *s == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1) return 1;
    return static_cast<int>(std::min(v, 256L));
}

SpectralField build_initial(const InitialSpec& spec, const Grid& grid,
                            const SimParams& p) {
    if (!(spec.mass > 0.0) || !std::isfinite(spec.mass))
        throw std::invalid_argument("initial: mass must be positive and finite");
    const EquilibriumState eq = equilibrium(spec.mass, grid, p.sigma_t);
    SpectralField c = SpectralField::zero_like(grid);
    for (int j = 0; j < grid.n_nodes(); ++j)
        c.at(j, 0, 0) = eq.n_inf[static_cast<std::size_t>(j)];

    if (spec.family == "equilibrium") {
        // baseline only
    } else if (spec.family == "cosine-perturbed") {
        if (!std::isfinite(spec.delta))
            throw std::invalid_argument("initial: delta must be finite");
        for (int j = 0; j < grid.n_nodes(); ++j) {
            const cplx half{0.5 * spec.delta * eq.n_inf[static_cast<std::size_t>(j)], 0.0};
            c.at(j, 0, 1) += half;
            c.at(j, 0, -1) += half;
        }
    } else if (spec.family == "hermite-mode") {
        const int n = spec.mode_n;
        const int k = spec.mode_k;
        if (n < 0 || n > grid.n_hermite || k < grid.k_min() || k > grid.k_max())
            throw std::invalid_argument("initial: hermite-mode index out of range");
        if (n == 0 && k == 0)
            throw std::invalid_argument(
                "initial: hermite-mode (0, 0) would shift the mass; set mass instead");
        if (!std::isfinite(spec.mode_c))
            throw std::invalid_argument("initial: c must be finite");
        for (int j = 0; j < grid.n_nodes(); ++j) {
            const double amp = spec.mode_c * grid.nodes[static_cast<std::size_t>(j)].g;
            c.at(j, n, k) += amp;
            // Hermitian mirror; the Nyquist mode has none and stays real.
            if (k != 0 && k != grid.k_max()) c.at(j, n, -k) += amp;
        }
    } else if (spec.family == "well-prepared") {
        if (!std::isfinite(spec.wp_a) || !std::isfinite(spec.wp_b))
            throw std::invalid_argument("initial: a and b must be finite");
        for (int j = 0; j < grid.n_nodes(); ++j) {
            const cplx amp = eq.n_inf[static_cast<std::size_t>(j)] *
                             cplx{0.5 * spec.wp_a, -0.5 * spec.wp_b};
            c.at(j, 0, 1) += amp;
            c.at(j, 0, -1) += std::conj(amp);
        }
    } else {
        throw std::invalid_argument("initial: unknown family '" + spec.family + "'");
    }
    return c;
}

std::vector<double> initial_density_samples(const InitialSpec& spec, const Grid& grid,
                                            const SimParams& p) {
    const SpectralField c = build_initial(spec, grid, p);
    const std::vector<cplx> modes = rho_modes(c);
    std::vector<double> out(static_cast<std::size_t>(grid.n_theta));
    for (int i = 0; i < grid.n_theta; ++i)
        out[static_cast<std::size_t>(i)] =
            synth_real(modes, c.k_min(), grid.theta[static_cast<std::size_t>(i)]);
    return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    validate_config(cfg);

    RunResult res;
    ArtifactList arts;
    std::string report;
    int code = 0;

    try {
        if (cfg.kind == "stability") code = handle_kinetic(cfg, false, arts, report);
        else if (cfg.kind == "rescaled") code = handle_kinetic(cfg, true, arts, report);
        else if (cfg.kind == "dd") code = handle_dd(cfg, arts, report);
        else if (cfg.kind == "sweep") code = handle_sweep(cfg, arts, report);
        else if (cfg.kind == "verify") code = handle_verify(cfg, arts, report);
        else if (cfg.kind == "particles") code = handle_particles(cfg, arts, report);
        else if (cfg.kind == "compare") code = handle_compare(cfg, arts, report);
        else throw std::invalid_argument("unknown experiment kind '" + cfg.kind + "'");
    } catch (const SolverAbort& e) {
        report += std::string("aborted: ") + e.what() + "\n";
        code = 2;
    }

    if (!cfg.out_dir.empty()) {
        make_dirs(cfg.out_dir);
        Manifest man;
        man.tool_version = version;
        man.config_hash = hex64(fnv1a64(serialize_config(cfg)));
        man.seed = cfg.seed;
        arts.emplace_back("summary.txt", report);
        for (const auto& art : arts) {
            const std::string path = cfg.out_dir + "/" + art.first;
            write_text_file(path, art.second);
            man.files.push_back({art.first, hex64(fnv1a64(art.second))});
            res.files.push_back(path);
        }
        man.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                .count();
        const std::string man_path = cfg.out_dir + "/manifest.txt";
        write_text_file(man_path, man.text());
        res.files.push_back(man_path);
    }

    res.exit_code = code;
    res.report = report;
    return res;
}

} // namespace ksfp
