#pragma once

// Independent numerical oracles for the test suites: quadrature integrators,
// direct basis summation, and a small least-squares helper.  Everything here
// deliberately avoids the library's optimized paths so agreement is evidence,
// not tautology.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ksfp/field.hpp"
#include "ksfp/grid.hpp"
#include "ksfp/hermite.hpp"
#include "ksfp/spectral_ops.hpp"

namespace oracles {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Trapezoid rule over [0, 2pi); exact for trigonometric polynomials of
// degree < n.
inline double theta_quad(const std::function<double(double)>& g, int n = 512) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += g(two_pi * i / n);
    return acc * two_pi / n;
}

// Trapezoid rule over [nu - L, nu + L] with L = halfwidth * sqrt(sigma_t);
// plenty for 1e-10 comparisons against Gaussian-weighted integrands.
inline double omega_quad(const std::function<double(double)>& g, double nu,
                         double sigma_t, int n = 4000, double halfwidth = 12.0) {
    const double length = halfwidth * std::sqrt(sigma_t);
    const double a = nu - length, b = nu + length;
    const double h = (b - a) / n;
    double acc = 0.5 * (g(a) + g(b));
    for (int i = 1; i < n; ++i) acc += g(a + h * i);
    return acc * h;
}

// Naive double-loop evaluation of the truncated expansion.
inline double direct_eval(const ksfp::SpectralField& c, const ksfp::Grid& grid,
                          double sigma_t, double theta, double omega, int j) {
    const double nu = grid.nodes[static_cast<std::size_t>(j)].nu;
    const double xi = (omega - nu) / std::sqrt(sigma_t);
    std::vector<double> h;
    ksfp::hermite_values(c.n_hermite, xi, h);
    std::complex<double> acc{0.0, 0.0};
    for (int n = 0; n <= c.n_hermite; ++n)
        for (int k = c.k_min(); k <= c.k_max(); ++k)
            acc += c.at(j, n, k) * std::polar(1.0, k * theta) *
                   h[static_cast<std::size_t>(n)];
    return acc.real() * ksfp::maxwellian(omega, nu, sigma_t);
}

// Random Hermitian-symmetric field, mass mode included, bounded rows.  The
// unpaired Nyquist column stays zero: the continuum norm of the synthesized
// real function weights that lone cosine by half, so populating it would put
// the coefficient-space Parseval sums and quadrature oracles out of step.
inline ksfp::SpectralField random_hermitian_field(const ksfp::Grid& grid,
                                                  std::uint64_t seed,
                                                  double amplitude = 0.3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ksfp::SpectralField c = ksfp::SpectralField::zero_like(grid);
    for (int j = 0; j < c.n_nodes; ++j)
        for (int n = 0; n <= c.n_hermite; ++n) {
            const double row_amp = amplitude * std::pow(2.0, -n);
            c.at(j, n, 0) = {row_amp * u(rng), 0.0};
            for (int k = 1; k < c.k_max(); ++k) {
                const std::complex<double> z{row_amp * std::pow(2.0, -k) * u(rng),
                                             row_amp * std::pow(2.0, -k) * u(rng)};
                c.at(j, n, k) = z;
                c.at(j, n, -k) = std::conj(z);
            }
        }
    return c;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (syy > 0.0) {
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = y[i] - (f.intercept + f.slope * x[i]);
            res += d * d;
        }
        f.r_squared = 1.0 - res / syy;
    }
    return f;
}

} // namespace oracles
