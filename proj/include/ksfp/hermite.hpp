#pragma once

#include <utility>
#include <vector>

namespace ksfp {

// Orthonormal probabilists' Hermite polynomials h_n:
//   h_0 = 1, h_1 = xi, h_{n+1} = (xi*h_n - sqrt(n)*h_{n-1}) / sqrt(n+1),
// orthonormal against the standard Gaussian weight phi(xi) dxi.
double hermite_h(int n, double xi);

// Fills out[0..n_max] with h_0(xi) .. h_{n_max}(xi).
void hermite_values(int n_max, double xi, std::vector<double>& out);

// Gauss-Hermite rule adapted to the standard Gaussian weight:
//   integral u(xi) phi(xi) dxi  ~=  sum_q w_q u(xi_q),  sum_q w_q = 1.
// Exact for polynomials of degree <= 2*order - 1.  Nodes ascend.
struct GaussHermite {
    std::vector<double> xi;
    std::vector<double> w;
    int order() const { return static_cast<int>(xi.size()); }
};

GaussHermite gauss_hermite(int order);

} // namespace ksfp
