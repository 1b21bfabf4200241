#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "ksfp/field.hpp"
#include "ksfp/grid.hpp"
#include "ksfp/hermite.hpp"
#include "ksfp/spectral_ops.hpp"
#include "oracles.hpp"

using namespace ksfp;
using oracles::two_pi;

TEST_CASE("grid construction normalizes weights and validates sizes") {
    Grid g = build_grid(16, 8, {{-1.0, 1.0, 3.0}, {0.0, 2.0, 3.0}, {1.0, 1.0, 3.0}});
    CHECK(g.n_theta == 16);
    CHECK(g.n_hermite == 8);
    CHECK(g.n_nodes() == 3);
    CHECK(g.k_min() == -7);
    CHECK(g.k_max() == 8);
    CHECK(g.theta[3] == doctest::Approx(3.0 * two_pi / 16).epsilon(1e-15));

    // g sums to one after normalization, 1/gbar likewise.
    CHECK(g.nodes[0].g == doctest::Approx(0.25));
    CHECK(g.nodes[1].g == doctest::Approx(0.5));
    double inv = 0.0;
    for (const auto& nd : g.nodes) inv += 1.0 / nd.gbar;
    CHECK(inv == doctest::Approx(1.0).epsilon(1e-14));

    Grid d = build_grid_delta0(32, 16);
    CHECK(d.n_nodes() == 1);
    CHECK(d.nodes[0].nu == 0.0);
    CHECK(d.nodes[0].g == 1.0);
    CHECK(d.nodes[0].gbar == 1.0);

    CHECK_THROWS_AS(build_grid(7, 8, {{0.0, 1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(2, 8, {{0.0, 1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(16, 1, {{0.0, 1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(16, 8, {}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(16, 8, {{0.0, 1.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(16, 8, {{0.0, -1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(16, 8, {{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("maxwellian matches closed-form values and integrates to one") {
    CHECK(maxwellian(0.0, 0.0, 1.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    const double nu = 0.7, st = 2.0;
    CHECK(maxwellian(nu + std::sqrt(st), nu, st) ==
          doctest::Approx(std::exp(-0.5) / std::sqrt(two_pi * st)).epsilon(1e-15));
    const double mass = oracles::omega_quad(
        [&](double w) { return maxwellian(w, nu, st); }, nu, st);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gauss hermite rule integrates gaussian moments exactly") {
    GaussHermite q = gauss_hermite(12);
    CHECK(q.order() == 12);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < q.order(); ++i) {
        m0 += q.w[i];
        m2 += q.w[i] * q.xi[i] * q.xi[i];
        m4 += q.w[i] * std::pow(q.xi[i], 4);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
    CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
}

TEST_CASE("hermite basis is the normalized probabilists family") {
    CHECK(hermite_h(0, 0.8) == 1.0);
    CHECK(hermite_h(1, 0.8) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(hermite_h(2, 0.8) ==
          doctest::Approx((0.8 * 0.8 - 1.0) / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(hermite_h(3, 1.5) == doctest::Approx(-0.45927932677184585).epsilon(1e-14));

    std::vector<double> vals;
    hermite_values(5, 1.5, vals);
    CHECK(vals.size() == 6);
    CHECK(vals[3] == doctest::Approx(hermite_h(3, 1.5)).epsilon(1e-15));

    // Orthonormality against the standard Gaussian.
    GaussHermite q = gauss_hermite(24);
    for (int a = 0; a <= 8; ++a)
        for (int b = a; b <= 8; ++b) {
            double acc = 0.0;
            for (int i = 0; i < q.order(); ++i)
                acc += q.w[i] * hermite_h(a, q.xi[i]) * hermite_h(b, q.xi[i]);
            CHECK(acc == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
        }
}

TEST_CASE("dft analysis and synthesis invert each other") {
    const int n = 16;
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) {
        const double th = two_pi * i / n;
        samples[i] = 2.0 + std::cos(3.0 * th) - 0.5 * std::sin(5.0 * th);
    }
    std::vector<std::complex<double>> modes = dft_forward_real(samples);
    CHECK(modes.size() == 16);
    // Layout is k = -7..8; mode k sits at index k + 7.
    CHECK(modes[7].real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(modes[10].real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(modes[10].imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(modes[12].imag() == doctest::Approx(0.25).scale(1.0).epsilon(1e-14));
    for (int k = 1; k <= 7; ++k) {
        CHECK(modes[7 + k].real() == doctest::Approx(modes[7 - k].real()).scale(1.0).epsilon(1e-15));
        CHECK(modes[7 + k].imag() == doctest::Approx(-modes[7 - k].imag()).scale(1.0).epsilon(1e-15));
    }
    for (int i = 0; i < n; ++i) {
        const double back = synth_real(modes, -7, two_pi * i / n);
        CHECK(back == doctest::Approx(samples[i]).epsilon(1e-13));
    }
}

TEST_CASE("projection reproduces closed-form coefficients") {
    const double st = 1.7;
    Grid g = build_grid(8, 6, {{-0.4, 1.0, 2.0}, {0.9, 1.0, 2.0}});

    SUBCASE("local equilibrium projects onto the mass row") {
        SpectralField c = project(
            [&](double, double w, int j) {
                return maxwellian(w, g.nodes[static_cast<std::size_t>(j)].nu, st);
            },
            g, st);
        for (int j = 0; j < c.n_nodes; ++j)
            for (int n = 0; n <= c.n_hermite; ++n)
                for (int k = c.k_min(); k <= c.k_max(); ++k) {
                    const double want = (n == 0 && k == 0) ? 1.0 : 0.0;
                    CHECK(c.at(j, n, k).real() ==
                          doctest::Approx(want).scale(1.0).epsilon(1e-12));
                    CHECK(c.at(j, n, k).imag() ==
                          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
                }
    }

    SUBCASE("first moment weight lands on row one with sqrt sigma") {
        SpectralField c = project(
            [&](double, double w, int j) {
                const double nu = g.nodes[static_cast<std::size_t>(j)].nu;
                return (w - nu) * maxwellian(w, nu, st);
            },
            g, st);
        for (int j = 0; j < c.n_nodes; ++j) {
            CHECK(c.at(j, 1, 0).real() == doctest::Approx(std::sqrt(st)).epsilon(1e-12));
            CHECK(c.at(j, 0, 0).real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
            CHECK(c.at(j, 2, 0).real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("insufficient quadrature order is refused") {
        CHECK_THROWS_AS(project([](double, double, int) { return 0.0; }, g, st, 4),
                        std::invalid_argument);
    }
}

TEST_CASE("reconstruct agrees with direct basis summation") {
    const double st = 0.9;
    Grid g = build_grid(12, 5, {{-0.3, 1.0, 2.0}, {0.5, 1.0, 2.0}});
    SpectralField c = oracles::random_hermitian_field(g, 2026u);
    for (double theta : {0.0, 1.1, 4.4})
        for (double omega : {-1.2, 0.3, 2.0})
            for (int j = 0; j < c.n_nodes; ++j)
                CHECK(reconstruct(c, g, st, theta, omega, j) ==
                      doctest::Approx(oracles::direct_eval(c, g, st, theta, omega, j))
                          .scale(1.0)
                          .epsilon(1e-12));
}

TEST_CASE("projection inverts reconstruction on truncated fields") {
    const double st = 1.3;
    Grid g = build_grid(8, 4, {{0.2, 1.0, 1.0}});
    SpectralField c = oracles::random_hermitian_field(g, 77u);
    SpectralField back = project(
        [&](double th, double w, int j) { return reconstruct(c, g, st, th, w, j); },
        g, st);
    for (int n = 0; n <= c.n_hermite; ++n)
        for (int k = c.k_min(); k <= c.k_max(); ++k)
            CHECK(std::abs(back.at(0, n, k) - c.at(0, n, k)) <= 1e-10);
}

TEST_CASE("moments extract density flux and pressure rows") {
    const double st = 2.5;
    Grid g = build_grid(8, 4, {{0.3, 1.0, 1.0}});

    SUBCASE("pure second row gives the sqrt-two pressure mode") {
        SpectralField c = SpectralField::zero_like(g);
        c.at(0, 2, 0) = {1.0, 0.0};
        MomentModes m = moments(c, g, st);
        CHECK(m.n_hat[m.idx(0, 0)].real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
        CHECK(m.j_hat[m.idx(0, 0)].real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
        CHECK(m.p_hat[m.idx(0, 0)].real() ==
              doctest::Approx(std::sqrt(2.0) * st).epsilon(1e-15));
    }

    SUBCASE("random field moments match omega quadrature") {
        SpectralField c = oracles::random_hermitian_field(g, 4242u);
        MomentModes m = moments(c, g, st);
        const double nu = g.nodes[0].nu;
        for (int i = 0; i < g.n_theta; i += 3) {
            const double th = g.theta[static_cast<std::size_t>(i)];
            const double n_quad = oracles::omega_quad(
                [&](double w) { return oracles::direct_eval(c, g, st, th, w, 0); }, nu, st);
            const double j_quad = oracles::omega_quad(
                [&](double w) {
                    return (w - nu) * oracles::direct_eval(c, g, st, th, w, 0);
                },
                nu, st);
            const double p_quad = oracles::omega_quad(
                [&](double w) {
                    return (w - nu) * (w - nu) * oracles::direct_eval(c, g, st, th, w, 0);
                },
                nu, st);
            CHECK(synth_real(m.n_hat, m.k_min(), th) ==
                  doctest::Approx(n_quad).scale(1.0).epsilon(1e-10));
            CHECK(synth_real(m.j_hat, m.k_min(), th) ==
                  doctest::Approx(j_quad).scale(1.0).epsilon(1e-10));
            CHECK(synth_real(m.p_hat, m.k_min(), th) ==
                  doctest::Approx(p_quad).scale(1.0).epsilon(1e-10));
        }
    }

    SUBCASE("two hermite rows are required") {
        Grid tiny = build_grid(8, 2, {{0.0, 1.0, 1.0}});
        SpectralField c = SpectralField::zero_like(tiny);
        CHECK_NOTHROW(moments(c, tiny, st));
    }
}

TEST_CASE("total mass sums the zero modes over nodes") {
    Grid g = build_grid(8, 3, {{-1.0, 1.0, 2.0}, {1.0, 1.0, 2.0}});
    SpectralField c = SpectralField::zero_like(g);
    c.at(0, 0, 0) = {0.25, 0.0};
    c.at(1, 0, 0) = {0.15, 0.0};
    CHECK(total_mass(c) == doctest::Approx(two_pi * 0.4).epsilon(1e-15));
}

TEST_CASE("coupling field realizes the attractive convolution") {
    Grid g = build_grid(32, 3, {{0.0, 1.0, 1.0}});

    SUBCASE("constant density produces no drive") {
        std::vector<double> rho(32, 1.0 / two_pi);
        std::vector<double> field = coupling_field(rho, g);
        for (double v : field) CHECK(std::abs(v) <= 1e-15);
    }

    SUBCASE("cosine bump drives minus half sine") {
        std::vector<double> rho(32);
        for (int i = 0; i < 32; ++i)
            rho[static_cast<std::size_t>(i)] =
                (1.0 + std::cos(g.theta[static_cast<std::size_t>(i)])) / two_pi;
        std::vector<double> field = coupling_field(rho, g);
        for (int i = 0; i < 32; ++i)
            CHECK(field[static_cast<std::size_t>(i)] ==
                  doctest::Approx(-0.5 * std::sin(g.theta[static_cast<std::size_t>(i)]))
                      .scale(1.0)
                      .epsilon(1e-14));
    }

    SUBCASE("sine bump drives plus half cosine") {
        std::vector<double> rho(32);
        for (int i = 0; i < 32; ++i)
            rho[static_cast<std::size_t>(i)] =
                (1.0 + std::sin(g.theta[static_cast<std::size_t>(i)])) / two_pi;
        std::vector<double> field = coupling_field(rho, g);
        for (int i = 0; i < 32; ++i)
            CHECK(field[static_cast<std::size_t>(i)] ==
                  doctest::Approx(0.5 * std::cos(g.theta[static_cast<std::size_t>(i)]))
                      .scale(1.0)
                      .epsilon(1e-14));
    }

    SUBCASE("random density matches the trapezoid convolution oracle") {
        std::vector<double> rho(32);
        std::mt19937_64 rng(99u);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& r : rho) r = u(rng);
        std::vector<double> field = coupling_field(rho, g);
        double l1 = 0.0;
        for (double r : rho) l1 += std::abs(r) * two_pi / 32;
        for (int i = 0; i < 32; ++i) {
            const double th = g.theta[static_cast<std::size_t>(i)];
            double conv = 0.0;
            for (int ip = 0; ip < 32; ++ip)
                conv += std::sin(g.theta[static_cast<std::size_t>(ip)] - th) *
                        rho[static_cast<std::size_t>(ip)] * two_pi / 32;
            CHECK(field[static_cast<std::size_t>(i)] ==
                  doctest::Approx(conv).scale(1.0).epsilon(1e-12));
            CHECK(std::abs(field[static_cast<std::size_t>(i)]) <= l1 + 1e-12);
        }
    }

    SUBCASE("first harmonic mode map is i pi rho_hat") {
        const std::complex<double> rho1{0.3, -0.2};
        const std::complex<double> f1 = coupling_mode(rho1);
        CHECK(f1.real() == doctest::Approx((std::acos(-1.0) * 0.2)).epsilon(1e-15));
        CHECK(f1.imag() == doctest::Approx((std::acos(-1.0) * 0.3)).epsilon(1e-15));
    }
}

TEST_CASE("weighted norm and dissipation have closed parseval forms") {
    const double st = 2.0;
    Grid g = build_grid_delta0(16, 6);

    SUBCASE("single coefficient norm") {
        SpectralField c = SpectralField::zero_like(g);
        c.at(0, 3, 0) = {0.37, 0.0};
        CHECK(l2_gamma_sq(c, g) == doctest::Approx(two_pi * 0.37 * 0.37).epsilon(1e-15));
    }

    SUBCASE("norm matches the weighted quadrature oracle") {
        Grid g2 = build_grid(12, 4, {{-0.5, 1.0, 2.0}, {0.5, 1.0, 2.0}});
        SpectralField c = oracles::random_hermitian_field(g2, 11u);
        double quad = 0.0;
        for (int j = 0; j < 2; ++j) {
            const double nu = g2.nodes[static_cast<std::size_t>(j)].nu;
            const double gbar = g2.nodes[static_cast<std::size_t>(j)].gbar;
            quad += gbar * oracles::theta_quad(
                               [&](double th) {
                                   return oracles::omega_quad(
                                       [&](double w) {
                                           const double f =
                                               oracles::direct_eval(c, g2, st, th, w, j);
                                           return f * f / maxwellian(w, nu, st);
                                       },
                                       nu, st);
                               },
                               48);
        }
        CHECK(l2_gamma_sq(c, g2) == doctest::Approx(quad).epsilon(1e-9));
    }

    SUBCASE("single coefficient dissipation carries the row index over sigma") {
        SpectralField c = SpectralField::zero_like(g);
        c.at(0, 2, 0) = {0.5, 0.0};
        CHECK(dissipation(c, g, st) ==
              doctest::Approx((2.0 / st) * two_pi * 0.25).epsilon(1e-15));
    }

    SUBCASE("hydrodynamic fields carry no dissipation") {
        SpectralField c = SpectralField::zero_like(g);
        c.at(0, 0, 1) = {0.1, -0.2};
        c.at(0, 0, -1) = {0.1, 0.2};
        CHECK(dissipation(c, g, st) == doctest::Approx(0.0).scale(1.0).epsilon(1e-18));
    }

    SUBCASE("dissipation matches the omega-derivative quadrature oracle") {
        Grid g2 = build_grid(12, 4, {{0.4, 1.0, 1.0}});
        SpectralField c = oracles::random_hermitian_field(g2, 13u);
        const double nu = g2.nodes[0].nu;
        // d/domega of f/M expands row n onto row n-1 with weight sqrt(n/sigma).
        double quad = oracles::theta_quad(
            [&](double th) {
                return oracles::omega_quad(
                    [&](double w) {
                        const double xi = (w - nu) / std::sqrt(st);
                        std::vector<double> h;
                        hermite_values(c.n_hermite, xi, h);
                        std::complex<double> d{0.0, 0.0};
                        for (int n = 1; n <= c.n_hermite; ++n)
                            for (int k = c.k_min(); k <= c.k_max(); ++k)
                                d += c.at(0, n, k) * std::polar(1.0, k * th) *
                                     std::sqrt(n / st) * h[static_cast<std::size_t>(n - 1)];
                        const double dr = d.real();
                        return dr * dr * maxwellian(w, nu, st);
                    },
                    nu, st);
            },
            48);
        CHECK(dissipation(c, g2, st) == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("negative sobolev norms of density gaps") {
    const int n = 64;
    std::vector<double> cosg(n), sin2g(n), zero(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double th = two_pi * i / n;
        cosg[static_cast<std::size_t>(i)] = std::cos(th);
        sin2g[static_cast<std::size_t>(i)] = std::sin(2.0 * th);
    }
    CHECK(hminus1_norm(zero) == 0.0);
    CHECK(hminus1_norm(cosg) == doctest::Approx(std::sqrt(std::acos(-1.0) / 2.0)).epsilon(1e-13));
    CHECK(hminus1_norm(sin2g) == doctest::Approx(std::sqrt(std::acos(-1.0) / 5.0)).epsilon(1e-13));
    const int k_min = -n / 2 + 1;
    CHECK(hminus1_from_modes(dft_forward_real(cosg), k_min, true) ==
          doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-13));
    CHECK(hminus1_from_modes(dft_forward_real(sin2g), k_min, true) ==
          doctest::Approx(std::sqrt(std::acos(-1.0)) / 2.0).epsilon(1e-13));
    CHECK(hminus1_from_modes(dft_forward_real(cosg), k_min, false) ==
          doctest::Approx(hminus1_norm(cosg)).epsilon(1e-14));
}

TEST_CASE("equilibrium state ties mass to the stationary density") {
    Grid g = build_grid(16, 4, {{-1.0, 1.0, 4.0}, {0.0, 2.0, 2.0}, {1.0, 1.0, 4.0}});

    SUBCASE("mass two pi gives unit density") {
        EquilibriumState eq = equilibrium(two_pi, g, 1.5);
        CHECK(eq.rho_inf == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(eq.n_inf[1] == doctest::Approx(0.5).epsilon(1e-15));
        SpectralField f = eq.field(g);
        CHECK(total_mass(f) == doctest::Approx(two_pi).epsilon(1e-14));
        CHECK(l2_gamma_sq(f, g) > 0.0);
    }

    SUBCASE("unit mass single node freezes the zero coefficient") {
        Grid d = build_grid_delta0(16, 4);
        EquilibriumState eq = equilibrium(1.0, d, 1.0);
        CHECK(eq.rho_inf == doctest::Approx(0.15915494309189535).epsilon(1e-15));
        SpectralField f = eq.field(d);
        CHECK(f.at(0, 0, 0).real() == doctest::Approx(0.15915494309189535).epsilon(1e-15));
        CHECK(f.at(0, 1, 0).real() == 0.0);
        CHECK(total_mass(f) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("field helpers enforce conjugate symmetry and finiteness") {
    Grid g = build_grid(8, 3, {{0.0, 1.0, 1.0}});
    SpectralField c = SpectralField::zero_like(g);
    c.at(0, 1, 2) = {1.0, 0.5};
    CHECK(c.hermitian_defect() > 0.0);
    c.enforce_hermitian();
    CHECK(c.hermitian_defect() == 0.0);
    CHECK(c.at(0, 1, -2) == std::conj(c.at(0, 1, 2)));

    SpectralField d = SpectralField::zero_like(g);
    d.at(0, 2, 0) = {2.0, 0.0};
    c.axpy(0.5, d);
    CHECK(c.at(0, 2, 0).real() == doctest::Approx(1.0));
    c.scale(2.0);
    CHECK(c.at(0, 2, 0).real() == doctest::Approx(2.0));
    CHECK(c.is_finite());
    CHECK(max_abs(c) >= 2.0);
    c.at(0, 0, 0) = {std::nan(""), 0.0};
    CHECK(!c.is_finite());
}
