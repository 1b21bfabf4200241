#include "ksfp/field.hpp"

#include <cmath>

namespace ksfp {

double SpectralField::hermitian_defect() const {
    double worst = 0.0;
    for (int j = 0; j < n_nodes; ++j) {
        for (int n = 0; n <= n_hermite; ++n) {
            for (int k = 1; k <= -k_min(); ++k) {
                cplx d = at(j, n, -k) - std::conj(at(j, n, k));
                worst = std::max(worst, std::abs(d));
            }
            worst = std::max(worst, std::abs(at(j, n, 0).imag()));
        }
    }
    return worst;
}

void SpectralField::enforce_hermitian() {
    for (int j = 0; j < n_nodes; ++j)
        for (int n = 0; n <= n_hermite; ++n) {
            at(j, n, 0) = cplx{at(j, n, 0).real(), 0.0};
            for (int k = 1; k <= -k_min(); ++k) {
                cplx avg = 0.5 * (at(j, n, k) + std::conj(at(j, n, -k)));
                at(j, n, k) = avg;
                at(j, n, -k) = std::conj(avg);
            }
        }
}

bool SpectralField::is_finite() const {
    for (const cplx& c : data)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

void SpectralField::axpy(double a, const SpectralField& x) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += a * x.data[i];
}

void SpectralField::scale(double a) {
    for (auto& c : data) c *= a;
}

double max_abs(const SpectralField& f) {
    double m = 0.0;
    for (const cplx& c : f.data) m = std::max(m, std::abs(c));
    return m;
}

} // namespace ksfp
