#pragma once

#include <cmath>
#include <stdexcept>

namespace ksfp {

// Physical and rescaled parameter set for the kinetic model.
//
// The pair (kappa, sigma) are the physical coupling strength and noise
// intensity; (kappa_t, sigma_t) are their inertia-rescaled counterparts
// kappa/m and sigma/m.  Both views are kept, derived once on construction,
// so that kappa_t*m == kappa and sigma_t*m == sigma hold bit-exactly.
struct SimParams {
    double m = 1.0;        // inertia (mass), > 0
    double kappa = 0.0;    // physical coupling, >= 0
    double sigma = 1.0;    // physical noise intensity, > 0
    double kappa_t = 0.0;  // kappa / m
    double sigma_t = 1.0;  // sigma / m
    double epsilon = 0.0;  // scale separation parameter; 0 means "not set"

    // Build from physical inputs.  kappa and sigma are re-derived from the
    // rescaled values so the exact-consistency invariant holds in floating
    // point (the stored kappa may differ from the argument by one ulp).
    static SimParams from_physical(double m, double kappa, double sigma,
                                   double epsilon = 0.0) {
        validate_base(m, kappa, sigma, epsilon);
        SimParams p;
        p.m = m;
        p.kappa_t = kappa / m;
        p.sigma_t = sigma / m;
        p.kappa = p.kappa_t * m;
        p.sigma = p.sigma_t * m;
        p.epsilon = epsilon;
        return p;
    }

    // Build from rescaled inputs; the physical values are exact products.
    static SimParams from_rescaled(double m, double kappa_t, double sigma_t,
                                   double epsilon = 0.0) {
        validate_base(m, kappa_t * m, sigma_t * m, epsilon);
        SimParams p;
        p.m = m;
        p.kappa_t = kappa_t;
        p.sigma_t = sigma_t;
        p.kappa = kappa_t * m;
        p.sigma = sigma_t * m;
        p.epsilon = epsilon;
        return p;
    }

    bool has_epsilon() const { return epsilon > 0.0; }

  private:
    static void validate_base(double m, double kappa, double sigma,
                              double epsilon) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("SimParams: m must be positive and finite");
        if (!(kappa >= 0.0) || !std::isfinite(kappa))
            throw std::invalid_argument("SimParams: kappa must be nonnegative and finite");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("SimParams: sigma must be positive and finite");
        if (epsilon != 0.0 && (!(epsilon > 0.0) || !std::isfinite(epsilon)))
            throw std::invalid_argument("SimParams: epsilon must be positive when set");
    }
};

} // namespace ksfp
