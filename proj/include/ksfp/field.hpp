#pragma once

#include <complex>
#include <vector>

#include "ksfp/grid.hpp"

namespace ksfp {

using cplx = std::complex<double>;

// Fourier-Hermite coefficient tensor C[j][n][k] of a phase-space density
//   f(theta, omega, nu_j) = sum_{n,k} C[j][n][k] e^{i k theta} h_n(xi) M(omega, nu_j),
// with xi = (omega - nu_j)/sqrt(sigma_t).  Layout is j-major, then Hermite
// level n, then Fourier index k ascending from k_min to k_max.
//
// A field describing a real density satisfies C[j][n][-k] = conj(C[j][n][k])
// for every paired mode; the unpaired Nyquist mode k = n_theta/2 carries its
// own complex degree of freedom and stays zero for band-limited data.
struct SpectralField {
    int n_nodes = 0;
    int n_hermite = 0; // top Hermite level N; rows n = 0..N
    int n_theta = 0;
    std::vector<cplx> data;

    SpectralField() = default;
    SpectralField(int nodes, int hermite, int theta)
        : n_nodes(nodes), n_hermite(hermite), n_theta(theta),
          data(static_cast<std::size_t>(nodes) * (hermite + 1) * theta, cplx{0.0, 0.0}) {}

    static SpectralField zero_like(const Grid& g) {
        return SpectralField(g.n_nodes(), g.n_hermite, g.n_theta);
    }

    int k_min() const { return -n_theta / 2 + 1; }
    int k_max() const { return n_theta / 2; }

    std::size_t index(int j, int n, int k) const {
        int ki = k - k_min();
        return (static_cast<std::size_t>(j) * (n_hermite + 1) + n) * n_theta + ki;
    }
    cplx& at(int j, int n, int k) { return data[index(j, n, k)]; }
    const cplx& at(int j, int n, int k) const { return data[index(j, n, k)]; }

    bool same_shape(const SpectralField& o) const {
        return n_nodes == o.n_nodes && n_hermite == o.n_hermite && n_theta == o.n_theta;
    }

    // Largest deviation from Hermitian symmetry over paired modes.
    double hermitian_defect() const;
    bool is_hermitian(double tol = 0.0) const { return hermitian_defect() <= tol; }

    // Overwrites paired modes with their symmetrized values and clears the
    // imaginary part at k = 0.
    void enforce_hermitian();

    bool is_finite() const;

    // In-place linear algebra used by the time steppers.
    void axpy(double a, const SpectralField& x); // this += a*x
    void scale(double a);
};

double max_abs(const SpectralField& f);

} // namespace ksfp
