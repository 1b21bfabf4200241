#include "ksfp/spectral_ops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ksfp/hermite.hpp"

namespace ksfp {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

double maxwellian(double omega, double nu, double sigma_t) {
    if (!(sigma_t > 0.0))
        throw std::invalid_argument("maxwellian: sigma_t must be positive");
    const double d = omega - nu;
    return std::exp(-d * d / (2.0 * sigma_t)) / std::sqrt(two_pi * sigma_t);
}

// ---------------------------------------------------------------------------
// Fourier helpers
// ---------------------------------------------------------------------------

std::vector<cplx> dft_forward_real(const std::vector<double>& samples) {
    const int n = static_cast<int>(samples.size());
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("dft_forward_real: need an even sample count >= 4");
    const int k_min = -n / 2 + 1;
    const int k_max = n / 2;
    std::vector<cplx> out(n);
    // Compute k = 0..k_max directly, mirror negative modes as exact
    // conjugates so Hermitian symmetry holds bitwise.
    for (int k = 0; k <= k_max; ++k) {
        double re = 0.0, im = 0.0;
        for (int i = 0; i < n; ++i) {
            double ang = two_pi * k * i / n;
            re += samples[i] * std::cos(ang);
            im -= samples[i] * std::sin(ang);
        }
        re /= n;
        im /= n;
        if (k == 0) im = 0.0;
        out[k - k_min] = cplx{re, im};
        if (k > 0 && k < k_max) out[-k - k_min] = cplx{re, -im};
    }
    return out;
}

double synth_real(const std::vector<cplx>& modes, int k_min, double theta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        int k = k_min + static_cast<int>(i);
        double ang = k * theta;
        acc += modes[i].real() * std::cos(ang) - modes[i].imag() * std::sin(ang);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Projection / reconstruction
// ---------------------------------------------------------------------------

SpectralField project(const std::function<double(double, double, int)>& f,
                      const Grid& grid, double sigma_t, int quad_order) {
    if (!(sigma_t > 0.0))
        throw std::invalid_argument("project: sigma_t must be positive");
    if (quad_order == 0) quad_order = 2 * grid.n_hermite + 8;
    if (quad_order < 2 * grid.n_hermite)
        throw std::invalid_argument(
            "project: quadrature order " + std::to_string(quad_order) +
            " is below the exactness requirement 2*n_hermite = " +
            std::to_string(2 * grid.n_hermite));

    const GaussHermite gh = gauss_hermite(quad_order);
    const double sq_sigma = std::sqrt(sigma_t);
    const int n_top = grid.n_hermite;
    const int nt = grid.n_theta;

    // Precompute h_n at the quadrature nodes and the sample-to-density
    // conversion factor: against d(omega) the quadrature value is
    //   sum_q w_q f(theta, nu + sq_sigma*xi_q) * sq_sigma / phi(xi_q) * h_n(xi_q).
    std::vector<std::vector<double>> hvals(gh.order());
    std::vector<double> conv(gh.order());
    for (int q = 0; q < gh.order(); ++q) {
        hermite_values(n_top, gh.xi[q], hvals[q]);
        const double phi = std::exp(-gh.xi[q] * gh.xi[q] / 2.0) / std::sqrt(two_pi);
        conv[q] = gh.w[q] * sq_sigma / phi;
    }

    SpectralField c = SpectralField(grid.n_nodes(), n_top, nt);
    std::vector<double> g_row(nt);
    for (int j = 0; j < grid.n_nodes(); ++j) {
        const double nu = grid.nodes[j].nu;
        // f evaluated once per (theta, quad node)
        std::vector<std::vector<double>> fv(nt, std::vector<double>(gh.order()));
        for (int i = 0; i < nt; ++i)
            for (int q = 0; q < gh.order(); ++q)
                fv[i][q] = f(grid.theta[i], nu + sq_sigma * gh.xi[q], j);
        for (int n = 0; n <= n_top; ++n) {
            for (int i = 0; i < nt; ++i) {
                double acc = 0.0;
                for (int q = 0; q < gh.order(); ++q)
                    acc += conv[q] * hvals[q][n] * fv[i][q];
                g_row[i] = acc;
            }
            std::vector<cplx> row = dft_forward_real(g_row);
            for (int ki = 0; ki < nt; ++ki)
                c.data[c.index(j, n, c.k_min() + ki)] = row[ki];
        }
    }
    return c;
}

double reconstruct(const SpectralField& c, const Grid& grid, double sigma_t,
                   double theta, double omega, int j) {
    const double nu = grid.nodes[j].nu;
    const double xi = (omega - nu) / std::sqrt(sigma_t);
    std::vector<double> h;
    hermite_values(c.n_hermite, xi, h);
    const double mw = maxwellian(omega, nu, sigma_t);
    double acc = 0.0;
    for (int n = 0; n <= c.n_hermite; ++n) {
        double re = 0.0;
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            const cplx& v = c.at(j, n, k);
            double ang = k * theta;
            re += v.real() * std::cos(ang) - v.imag() * std::sin(ang);
        }
        acc += re * h[n];
    }
    return acc * mw;
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

MomentModes moments(const SpectralField& c, const Grid&, double sigma_t) {
    if (c.n_hermite < 2)
        throw std::invalid_argument("moments: n_hermite >= 2 required for the pressure row");
    MomentModes m;
    m.n_nodes = c.n_nodes;
    m.n_theta = c.n_theta;
    const std::size_t sz = static_cast<std::size_t>(c.n_nodes) * c.n_theta;
    m.n_hat.resize(sz);
    m.j_hat.resize(sz);
    m.p_hat.resize(sz);
    const double sq_sigma = std::sqrt(sigma_t);
    for (int j = 0; j < c.n_nodes; ++j)
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            const cplx c0 = c.at(j, 0, k);
            const cplx c1 = c.at(j, 1, k);
            const cplx c2 = c.at(j, 2, k);
            m.n_hat[m.idx(j, k)] = c0;
            m.j_hat[m.idx(j, k)] = sq_sigma * c1;
            m.p_hat[m.idx(j, k)] = sigma_t * (std::sqrt(2.0) * c2 + c0);
        }
    return m;
}

double total_mass(const SpectralField& c) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) acc += c.at(j, 0, 0).real();
    return two_pi * acc;
}

// ---------------------------------------------------------------------------
// Coupling
// ---------------------------------------------------------------------------

cplx coupling_mode(cplx rho_hat_1) {
    return cplx{0.0, std::numbers::pi} * rho_hat_1;
}

std::vector<double> coupling_field(const std::vector<double>& rho_samples,
                                   const Grid& grid) {
    if (static_cast<int>(rho_samples.size()) != grid.n_theta)
        throw std::invalid_argument("coupling_field: sample count must equal n_theta");
    std::vector<cplx> modes = dft_forward_real(rho_samples);
    const cplx f1 = coupling_mode(modes[1 - grid.k_min()]);
    std::vector<double> out(grid.n_theta);
    for (int i = 0; i < grid.n_theta; ++i) {
        double ang = grid.theta[i];
        out[i] = 2.0 * (f1.real() * std::cos(ang) - f1.imag() * std::sin(ang));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equilibrium
// ---------------------------------------------------------------------------

SpectralField EquilibriumState::field(const Grid& grid) const {
    SpectralField c = SpectralField::zero_like(grid);
    for (int j = 0; j < grid.n_nodes(); ++j)
        c.at(j, 0, 0) = cplx{n_inf[j], 0.0};
    return c;
}

EquilibriumState equilibrium(double mass, const Grid& grid, double sigma_t) {
    if (!(mass > 0.0))
        throw std::invalid_argument("equilibrium: mass must be positive");
    EquilibriumState eq;
    eq.rho_inf = mass / two_pi;
    eq.sigma_t = sigma_t;
    eq.n_inf.resize(grid.n_nodes());
    for (int j = 0; j < grid.n_nodes(); ++j)
        eq.n_inf[j] = eq.rho_inf * grid.nodes[j].g;
    return eq;
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double l2_gamma_sq(const SpectralField& c, const Grid& grid,
                   const EquilibriumState* reference) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) {
        double node = 0.0;
        for (int n = 0; n <= c.n_hermite; ++n)
            for (int k = c.k_min(); k <= c.k_max(); ++k) {
                cplx v = c.at(j, n, k);
                if (reference && n == 0 && k == 0) v -= reference->n_inf[j];
                node += std::norm(v);
            }
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

double dissipation(const SpectralField& c, const Grid& grid, double sigma_t) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) {
        double node = 0.0;
        for (int n = 1; n <= c.n_hermite; ++n) {
            double row = 0.0;
            for (int k = c.k_min(); k <= c.k_max(); ++k) row += std::norm(c.at(j, n, k));
            node += double(n) / sigma_t * row;
        }
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

double n_err_sq(const SpectralField& c, const Grid& grid, const EquilibriumState& eq) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) {
        double node = 0.0;
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            cplx v = c.at(j, 0, k);
            if (k == 0) v -= eq.n_inf[j];
            node += std::norm(v);
        }
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

double j_norm_sq(const SpectralField& c, const Grid& grid, double sigma_t) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) {
        double row = 0.0;
        for (int k = c.k_min(); k <= c.k_max(); ++k) row += std::norm(c.at(j, 1, k));
        acc += grid.nodes[j].gbar * two_pi * sigma_t * row;
    }
    return acc;
}

double p_minus_sigma_n_sq(const SpectralField& c, const Grid& grid, double sigma_t) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) {
        double row = 0.0;
        for (int k = c.k_min(); k <= c.k_max(); ++k) row += std::norm(c.at(j, 2, k));
        acc += grid.nodes[j].gbar * two_pi * 2.0 * sigma_t * sigma_t * row;
    }
    return acc;
}

double l2_minv_sq(const SpectralField& c, const Grid& grid) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) {
        double node = 0.0;
        for (int n = 0; n <= c.n_hermite; ++n)
            for (int k = c.k_min(); k <= c.k_max(); ++k) node += std::norm(c.at(j, n, k));
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

double dtheta_l2_minv_sq(const SpectralField& c, const Grid& grid) {
    double acc = 0.0;
    for (int j = 0; j < c.n_nodes; ++j) {
        double node = 0.0;
        for (int n = 0; n <= c.n_hermite; ++n)
            for (int k = c.k_min(); k <= c.k_max(); ++k)
                node += double(k) * double(k) * std::norm(c.at(j, n, k));
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

double hminus1_norm(const std::vector<double>& samples) {
    std::vector<cplx> modes = dft_forward_real(samples);
    const int k_min = -static_cast<int>(samples.size()) / 2 + 1;
    return hminus1_from_modes(modes, k_min, false);
}

double hminus1_from_modes(const std::vector<cplx>& modes, int k_min, bool homogeneous) {
    double acc = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const int k = k_min + static_cast<int>(i);
        const double kk = double(k) * double(k);
        if (homogeneous) {
            if (k == 0) continue;
            acc += std::norm(modes[i]) / kk;
        } else {
            acc += std::norm(modes[i]) / (1.0 + kk);
        }
    }
    return std::sqrt(two_pi * acc);
}

} // namespace ksfp
