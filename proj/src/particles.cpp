#include "ksfp/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace ksfp {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::uint64_t sm64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double wrap_2pi(double x) {
    double y = std::fmod(x, two_pi);
    if (y < 0.0) y += two_pi;
    if (y >= two_pi) y -= two_pi;
    if (y < 0.0) y = 0.0;
    return y;
}

// Contiguous chunking of [0, n) across `workers` threads; the per-particle
// work only reads shared state, so results never depend on the split.
template <typename Fn>
void parallel_over(std::size_t n, int workers, Fn&& body) {
    if (workers <= 1 || n < 2) {
        body(std::size_t{0}, n);
        return;
    }
    const std::size_t used = std::min(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + used - 1) / used;
    for (std::size_t w = 0; w < used; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi]() { body(lo, hi); });
    }
    for (std::thread& th : pool) th.join();
}

} // namespace

std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t particle,
                          std::uint64_t step, std::uint64_t slot) {
    return sm64(sm64(sm64(sm64(seed) ^ particle) ^ step) ^ slot);
}

double counter_uniform(std::uint64_t seed, std::uint64_t particle,
                       std::uint64_t step, std::uint64_t slot) {
    return double(counter_mix(seed, particle, step, slot) >> 11) * 0x1.0p-53;
}

void counter_gaussian_pair(std::uint64_t seed, std::uint64_t particle,
                           std::uint64_t step, std::uint64_t slot, double& g0,
                           double& g1) {
    const double u1 = 1.0 - counter_uniform(seed, particle, step, slot);
    const double u2 = counter_uniform(seed, particle, step, slot + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    g0 = r * std::cos(two_pi * u2);
    g1 = r * std::sin(two_pi * u2);
}

ParticleEnsemble sample_initial(std::size_t n,
                                const std::function<double(double)>& theta_density,
                                const Grid& grid, double sigma_t,
                                std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_initial: need at least one particle");
    if (!(sigma_t > 0.0))
        throw std::invalid_argument("sample_initial: sigma_t must be positive");

    // Piecewise-constant inverse CDF of the phase density on a fine grid.
    constexpr int cells = 8192;
    const double d = two_pi / cells;
    std::vector<double> w(cells), cum(cells);
    double total = 0.0;
    for (int c = 0; c < cells; ++c) {
        const double val = theta_density((c + 0.5) * d);
        if (!std::isfinite(val) || val < 0.0)
            throw std::invalid_argument("sample_initial: density must be finite and >= 0");
        w[static_cast<std::size_t>(c)] = val;
        total += val;
        cum[static_cast<std::size_t>(c)] = total;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("sample_initial: density has zero mass");

    std::vector<double> g_cum(grid.nodes.size());
    double g_total = 0.0;
    for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
        g_total += grid.nodes[j].g;
        g_cum[j] = g_total;
    }

    ParticleEnsemble e;
    e.seed = seed;
    e.theta.resize(n);
    e.omega.resize(n);
    e.nu.resize(n);
    const double sq_sigma = std::sqrt(sigma_t);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = counter_uniform(seed, i, 0, 0) * total;
        const std::size_t c = static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        const std::size_t cc = std::min<std::size_t>(c, cells - 1);
        const double below = cc > 0 ? cum[cc - 1] : 0.0;
        const double frac = w[cc] > 0.0 ? (u - below) / w[cc] : 0.5;
        e.theta[i] = wrap_2pi((double(cc) + std::min(std::max(frac, 0.0), 1.0)) * d);

        const double ug = counter_uniform(seed, i, 0, 1) * g_total;
        const std::size_t j = std::min<std::size_t>(
            static_cast<std::size_t>(
                std::upper_bound(g_cum.begin(), g_cum.end(), ug) - g_cum.begin()),
            grid.nodes.size() - 1);
        e.nu[i] = grid.nodes[j].nu;

        double g0 = 0.0, g1 = 0.0;
        counter_gaussian_pair(seed, i, 0, 2, g0, g1);
        e.omega[i] = e.nu[i] + sq_sigma * g0;
    }
    return e;
}

OrderParameter order_parameter(const ParticleEnsemble& e) {
    if (e.size() < 1) throw std::invalid_argument("order_parameter: empty ensemble");
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        re += std::cos(e.theta[i]);
        im += std::sin(e.theta[i]);
    }
    re /= double(e.size());
    im /= double(e.size());
    OrderParameter op;
    op.r = std::hypot(re, im);
    op.psi = op.r > 0.0 ? std::atan2(im, re) : 0.0;
    return op;
}

std::vector<double> interaction_sums_naive(const ParticleEnsemble& e) {
    const std::size_t n = e.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += std::sin(e.theta[k] - e.theta[i]);
        out[i] = acc / double(n);
    }
    return out;
}

void em_step(ParticleEnsemble& e, const SimParams& p, double dt, int workers) {
    if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be positive");
    const OrderParameter op = order_parameter(e);
    const double noise = std::sqrt(2.0 * p.sigma) / p.m * std::sqrt(dt);
    const std::uint64_t step_ctr = static_cast<std::uint64_t>(e.step) + 1;

    parallel_over(e.size(), workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double th = e.theta[i];
            const double om = e.omega[i];
            double g0 = 0.0, g1 = 0.0;
            counter_gaussian_pair(e.seed, i, step_ctr, 0, g0, g1);
            const double drift =
                -om + e.nu[i] + p.kappa * op.r * std::sin(op.psi - th);
            e.theta[i] = wrap_2pi(th + om * dt);
            e.omega[i] = om + dt / p.m * drift + noise * g0;
        }
    });
    e.step += 1;
    e.time += dt;
}

void em_run(ParticleEnsemble& e, const SimParams& p, double dt, long n_steps,
            int workers) {
    for (long s = 0; s < n_steps; ++s) em_step(e, p, dt, workers);
}

std::vector<double> empirical_density(const ParticleEnsemble& e, int n_bins,
                                      double mass) {
    if (n_bins < 4) throw std::invalid_argument("empirical_density: need >= 4 bins");
    std::vector<double> out(static_cast<std::size_t>(n_bins), 0.0);
    const double scale = mass * n_bins / (two_pi * double(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
        int b = static_cast<int>(e.theta[i] * n_bins / two_pi);
        b = std::min(std::max(b, 0), n_bins - 1);
        out[static_cast<std::size_t>(b)] += scale;
    }
    return out;
}

std::vector<cplx> rho_modes(const SpectralField& c) {
    std::vector<cplx> out(static_cast<std::size_t>(c.n_theta), cplx{0.0, 0.0});
    for (int j = 0; j < c.n_nodes; ++j)
        for (int k = c.k_min(); k <= c.k_max(); ++k)
            out[static_cast<std::size_t>(k - c.k_min())] += c.at(j, 0, k);
    return out;
}

std::vector<double> bin_averages(const std::vector<cplx>& modes, int k_min,
                                 int n_bins) {
    if (n_bins < 4) throw std::invalid_argument("bin_averages: need >= 4 bins");
    const double d = two_pi / n_bins;
    std::vector<double> out(static_cast<std::size_t>(n_bins), 0.0);
    for (int b = 0; b < n_bins; ++b) {
        const double center = (b + 0.5) * d;
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const int k = k_min + static_cast<int>(i);
            if (k == 0) {
                acc += modes[i];
            } else {
                // (1/d) integral over the bin of e^{i k theta}
                const double s = std::sin(0.5 * k * d) / (0.5 * k * d);
                acc += modes[i] * std::polar(s, k * center);
            }
        }
        out[static_cast<std::size_t>(b)] = acc.real();
    }
    return out;
}

double compare_to_kinetic(const std::vector<double>& empirical,
                          const std::vector<double>& kinetic) {
    if (empirical.size() != kinetic.size() || empirical.empty())
        throw std::invalid_argument("compare_to_kinetic: bin counts differ");
    const double d = two_pi / double(empirical.size());
    double mass_a = 0.0, mass_b = 0.0, dist = 0.0;
    for (std::size_t i = 0; i < empirical.size(); ++i) {
        mass_a += empirical[i];
        mass_b += kinetic[i];
        dist += std::abs(empirical[i] - kinetic[i]);
    }
    mass_a *= d;
    mass_b *= d;
    if (std::abs(mass_a - mass_b) > 1e-8 * std::max(1.0, std::abs(mass_a)))
        throw std::invalid_argument("compare_to_kinetic: masses differ");
    return dist * d;
}

} // namespace ksfp
