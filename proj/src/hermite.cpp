#include "ksfp/hermite.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ksfp {

double hermite_h(int n, double xi) {
    if (n < 0) throw std::invalid_argument("hermite_h: negative degree");
    double hm1 = 0.0;      // h_{j-1}
    double h = 1.0;        // h_j, starting at h_0
    for (int j = 0; j < n; ++j) {
        double hp1 = (xi * h - std::sqrt(double(j)) * hm1) / std::sqrt(double(j + 1));
        hm1 = h;
        h = hp1;
    }
    return h;
}

void hermite_values(int n_max, double xi, std::vector<double>& out) {
    out.resize(n_max + 1);
    out[0] = 1.0;
    if (n_max == 0) return;
    out[1] = xi;
    for (int j = 1; j < n_max; ++j)
        out[j + 1] = (xi * out[j] - std::sqrt(double(j)) * out[j - 1]) / std::sqrt(double(j + 1));
}

namespace {

// Orthonormal physicists' Hermite value and derivative at x, degree n.
// Recurrence: p_{j+1} = x*sqrt(2/(j+1))*p_j - sqrt(j/(j+1))*p_{j-1},
// p_0 = pi^{-1/4}.  Derivative of the top polynomial: p_n' = sqrt(2n) p_{n-1}.
void physicists_top(int n, double x, double& pn, double& dpn) {
    double pm1 = 0.0;
    double p = std::pow(std::numbers::pi, -0.25);
    for (int j = 0; j < n; ++j) {
        double pp1 = x * std::sqrt(2.0 / (j + 1)) * p - std::sqrt(double(j) / (j + 1)) * pm1;
        pm1 = p;
        p = pp1;
    }
    pn = p;
    dpn = std::sqrt(2.0 * n) * pm1;
}

} // namespace

GaussHermite gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    const int n = order;
    std::vector<double> x(n), v(n);

    // Newton iteration on the physicists' polynomial, largest root first.
    // Initial guesses follow the classical descending-root scheme.
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(double(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];

        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            physicists_top(n, z, p, dp);
            double dz = p / dp;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * (1.0 + std::abs(z))) break;
        }
        physicists_top(n, z, p, dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        v[i] = 2.0 / (dp * dp);
        v[n - 1 - i] = v[i];
    }

    // Map to the probabilists' normalization: xi = sqrt(2) x, w = v / sqrt(pi).
    GaussHermite gh;
    gh.xi.resize(n);
    gh.w.resize(n);
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    for (int i = 0; i < n; ++i) {
        gh.xi[i] = std::sqrt(2.0) * x[n - 1 - i]; // ascending
        gh.w[i] = v[n - 1 - i] * inv_sqrt_pi;
    }
    return gh;
}

} // namespace ksfp
