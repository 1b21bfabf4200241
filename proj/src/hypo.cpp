#include "ksfp/hypo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ksfp {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

// ---------------------------------------------------------------------------
// Poisson solve
// ---------------------------------------------------------------------------

AuxPotential poisson_solve_theta(const std::vector<cplx>& source_hat, int n_nodes,
                                 int n_theta) {
    if (static_cast<int>(source_hat.size()) != n_nodes * n_theta)
        throw std::invalid_argument("poisson_solve_theta: source size mismatch");
    AuxPotential v;
    v.n_nodes = n_nodes;
    v.n_theta = n_theta;
    v.v_hat.assign(source_hat.size(), cplx{0.0, 0.0});

    for (int j = 0; j < n_nodes; ++j) {
        double scale = 0.0;
        for (int k = v.k_min(); k <= n_theta / 2; ++k)
            scale = std::max(scale, std::abs(source_hat[v.idx(j, k)]));
        const double mean = std::abs(source_hat[v.idx(j, 0)]);
        if (mean > 1e-10 * std::max(1.0, scale))
            throw std::runtime_error(
                "poisson_solve_theta: source has nonzero angular mean " + fmt(mean) +
                " at node " + std::to_string(j));
        for (int k = v.k_min(); k <= n_theta / 2; ++k) {
            if (k == 0) continue;
            v.v_hat[v.idx(j, k)] = source_hat[v.idx(j, k)] / (-double(k) * double(k));
        }
    }
    return v;
}

double aux_grad_sq(const AuxPotential& v, const Grid& grid) {
    double acc = 0.0;
    for (int j = 0; j < v.n_nodes; ++j) {
        double node = 0.0;
        for (int k = v.k_min(); k <= v.n_theta / 2; ++k)
            node += double(k) * double(k) * std::norm(v.v_hat[v.idx(j, k)]);
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

double aux_grad2_sq(const AuxPotential& v, const Grid& grid) {
    double acc = 0.0;
    for (int j = 0; j < v.n_nodes; ++j) {
        double node = 0.0;
        for (int k = v.k_min(); k <= v.n_theta / 2; ++k) {
            double kk = double(k) * double(k);
            node += kk * kk * std::norm(v.v_hat[v.idx(j, k)]);
        }
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

EllipticCheck elliptic_battery(const Grid& grid, int n_sources, std::uint64_t seed,
                               double tol) {
    if (n_sources < 1)
        throw std::invalid_argument("elliptic_battery: n_sources must be positive");
    EllipticCheck chk;
    chk.n_sources = n_sources;
    chk.min_contraction_margin = std::numeric_limits<double>::infinity();
    const int nt = grid.n_theta;
    const int nn = grid.n_nodes();
    for (int s = 0; s < n_sources; ++s) {
        std::mt19937_64 rng(seed + std::uint64_t(s));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<cplx> src(static_cast<std::size_t>(nn) * nt, cplx{0.0, 0.0});
        AuxPotential probe;
        probe.n_nodes = nn;
        probe.n_theta = nt;
        double s_sq = 0.0;
        for (int j = 0; j < nn; ++j) {
            double node = 0.0;
            for (int k = 1; k <= grid.k_max(); ++k) {
                const double decay = std::pow(2.0, -double(k));
                const cplx z{u(rng) * decay, k < grid.k_max() ? u(rng) * decay : 0.0};
                src[probe.idx(j, k)] = z;
                if (k < grid.k_max()) {
                    src[probe.idx(j, -k)] = std::conj(z);
                    node += 2.0 * std::norm(z);
                } else {
                    node += std::norm(z);
                }
            }
            s_sq += grid.nodes[j].gbar * two_pi * node;
        }
        AuxPotential v = poisson_solve_theta(src, nn, nt);
        const double g1 = aux_grad_sq(v, grid);
        const double g2 = aux_grad2_sq(v, grid);
        const double scale = std::max(1.0, s_sq);
        const double gap = std::abs(g2 - s_sq) / scale;
        const double margin = (s_sq - g1) / scale;
        chk.max_identity_gap = std::max(chk.max_identity_gap, gap);
        chk.min_contraction_margin = std::min(chk.min_contraction_margin, margin);
        if (gap > tol || margin < -tol) ++chk.violations;
    }
    return chk;
}

std::string EllipticCheck::text() const {
    std::string s;
    s += "elliptic solve battery over " + std::to_string(n_sources) + " sources\n";
    s += "max identity gap        = " + fmt(max_identity_gap) + "\n";
    s += "min contraction margin  = " + fmt(min_contraction_margin) + "\n";
    s += "violations              = " + std::to_string(violations) + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// Energy pieces
// ---------------------------------------------------------------------------

double functional_a(const SpectralField& c, const Grid& grid, double sigma_t,
                    const EquilibriumState& eq) {
    const int nt = c.n_theta;
    const int nn = c.n_nodes;
    // Source N_inf - N per node in mode space.
    std::vector<cplx> src(static_cast<std::size_t>(nn) * nt, cplx{0.0, 0.0});
    AuxPotential probe;
    probe.n_nodes = nn;
    probe.n_theta = nt;
    for (int j = 0; j < nn; ++j)
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            cplx s = -c.at(j, 0, k);
            if (k == 0) s += eq.n_inf[j];
            src[probe.idx(j, k)] = s;
        }
    AuxPotential v = poisson_solve_theta(src, nn, nt);

    // A = sum_j gbar_j 2 pi sum_k J_hat_k conj((d_theta v)_k), real by symmetry.
    const double sq_sigma = std::sqrt(sigma_t);
    double acc = 0.0;
    for (int j = 0; j < nn; ++j) {
        double node = 0.0;
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            if (k == 0) continue;
            const cplx jk = sq_sigma * c.at(j, 1, k);
            const cplx dv = cplx{0.0, double(k)} * v.v_hat[v.idx(j, k)];
            node += (jk * std::conj(dv)).real();
        }
        acc += grid.nodes[j].gbar * two_pi * node;
    }
    return acc;
}

double default_alpha(const SimParams& p, double c_p) {
    const double a1 = 1.0 / (2.0 * c_p);
    const double a2 = p.m * p.sigma_t /
                      (2.0 * (5.0 * p.m * p.m * p.sigma_t + c_p * c_p));
    return std::min(a1, a2);
}

double modified_energy(const SpectralField& c, const Grid& grid, double sigma_t,
                       const EquilibriumState& eq, double alpha) {
    return 0.5 * l2_gamma_sq(c, grid, &eq) + alpha * functional_a(c, grid, sigma_t, eq);
}

// ---------------------------------------------------------------------------
// Regime report
// ---------------------------------------------------------------------------

namespace {

void equilibrium_norms(const EquilibriumState& eq, const Grid& grid, double& l1,
                       double& l2) {
    // N_inf is constant in theta per node: L1 = 2 pi sum_j |n_inf_j|,
    // L2(gbar)^2 = 2 pi sum_j gbar_j n_inf_j^2.
    l1 = 0.0;
    double sq = 0.0;
    for (int j = 0; j < grid.n_nodes(); ++j) {
        l1 += std::abs(eq.n_inf[j]);
        sq += grid.nodes[j].gbar * eq.n_inf[j] * eq.n_inf[j];
    }
    l1 *= two_pi;
    l2 = std::sqrt(two_pi * sq);
}

} // namespace

double default_c_inf(const SimParams& p, const EquilibriumState& eq, const Grid& grid) {
    double l1 = 0.0, l2 = 0.0;
    equilibrium_norms(eq, grid, l1, l2);
    const double alpha = default_alpha(p);
    // 10*alpha*m is the ratio of alpha to its large-noise limit 1/(10 m);
    // dividing by it keeps the headline condition equivalent to the strict
    // lines in that limit.
    const double scaling = std::min(1.0, 10.0 * alpha * p.m);
    return 4.0 * (3.0 * l1 + std::sqrt(std::numbers::pi) * l2) / scaling;
}

RegimeReport regime_check(const SimParams& p, const EquilibriumState& eq,
                          const Grid& grid, double c_inf) {
    RegimeReport r;
    equilibrium_norms(eq, grid, r.n_inf_l1, r.n_inf_l2);
    r.alpha = default_alpha(p);
    r.c_inf = c_inf > 0.0 ? c_inf : default_c_inf(p, eq, grid);

    const double spi = std::sqrt(std::numbers::pi);
    r.lhs_main = r.c_inf * std::max({std::sqrt(p.kappa_t / p.m), p.kappa_t,
                                     p.m * p.kappa_t});
    r.rhs_main = p.sigma_t;
    r.satisfied_main = r.lhs_main <= r.rhs_main;

    const double b1 = r.n_inf_l1 + spi * r.n_inf_l2;
    const double b2 = 3.0 * r.n_inf_l1 + spi * r.n_inf_l2;
    r.lhs_line1 = p.kappa_t / r.alpha * b1;
    r.rhs_line1 = p.sigma_t / 4.0;
    r.lhs_line2 = p.kappa_t * b2;
    r.rhs_line2 = p.sigma_t / (2.0 * p.m);
    r.satisfied_line1 = r.lhs_line1 <= r.rhs_line1;
    r.satisfied_line2 = r.lhs_line2 <= r.rhs_line2;
    r.satisfied_strict = r.satisfied_line1 && r.satisfied_line2;

    r.kappa_t_max = std::min(r.rhs_line1 * r.alpha / b1, r.rhs_line2 / b2);
    return r;
}

std::string RegimeReport::text() const {
    std::string s;
    s += "regime report\n";
    s += "  alpha                = " + fmt(alpha) + "\n";
    s += "  c_inf                = " + fmt(c_inf) + "\n";
    s += "  headline  lhs/rhs    = " + fmt(lhs_main) + " / " + fmt(rhs_main) +
         (satisfied_main ? "  [ok]\n" : "  [VIOLATED]\n");
    s += "  strict line 1        = " + fmt(lhs_line1) + " / " + fmt(rhs_line1) +
         (satisfied_line1 ? "  [ok]\n" : "  [violated]\n");
    s += "  strict line 2        = " + fmt(lhs_line2) + " / " + fmt(rhs_line2) +
         (satisfied_line2 ? "  [ok]\n" : "  [violated]\n");
    s += "  largest strict kappa_t at this sigma_t = " + fmt(kappa_t_max) + "\n";
    s += "  equilibrium norms: L1 = " + fmt(n_inf_l1) + ", weighted L2 = " +
         fmt(n_inf_l2) + "\n";
    return s;
}

std::string RegimeReport::csv() const {
    std::string s =
        "alpha,c_inf,lhs_main,rhs_main,satisfied_main,lhs_line1,rhs_line1,"
        "satisfied_line1,lhs_line2,rhs_line2,satisfied_line2,kappa_t_max\n";
    s += fmt(alpha) + "," + fmt(c_inf) + "," + fmt(lhs_main) + "," + fmt(rhs_main) +
         "," + (satisfied_main ? "1" : "0") + "," + fmt(lhs_line1) + "," +
         fmt(rhs_line1) + "," + (satisfied_line1 ? "1" : "0") + "," + fmt(lhs_line2) +
         "," + fmt(rhs_line2) + "," + (satisfied_line2 ? "1" : "0") + "," +
         fmt(kappa_t_max) + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// Inequality battery
// ---------------------------------------------------------------------------

SpectralField random_field(const Grid& grid, std::uint64_t seed, double amplitude) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SpectralField c = SpectralField::zero_like(grid);
    for (int j = 0; j < c.n_nodes; ++j)
        for (int n = 0; n <= c.n_hermite; ++n)
            for (int k = 0; k <= c.k_max(); ++k) {
                const double decay =
                    amplitude * std::pow(2.0, -double(n)) * std::pow(2.0, -double(k));
                double re = u(rng) * decay;
                double im = u(rng) * decay;
                if (k == 0) im = 0.0;
                c.at(j, n, k) = cplx{re, im};
                if (k > 0 && k < c.k_max()) c.at(j, n, -k) = cplx{re, -im};
                if (k == c.k_max()) c.at(j, n, k) = cplx{re, 0.0}; // unpaired mode kept real
            }
    return c;
}

InequalityReport inequality_battery(const Grid& grid, const std::vector<double>& sigma_list,
                                    int n_fields, std::uint64_t seed, double tolerance) {
    if (n_fields < 1) throw std::invalid_argument("inequality_battery: n_fields >= 1");
    InequalityReport rep;
    rep.tolerance = tolerance;
    rep.rows.reserve(sigma_list.size() * n_fields);
    for (double sigma_t : sigma_list) {
        if (!(sigma_t > 0.0))
            throw std::invalid_argument("inequality_battery: sigma values must be positive");
        for (int i = 0; i < n_fields; ++i) {
            SpectralField f = random_field(grid, seed + std::uint64_t(i));
            // Mass can be negative for a raw random field; shift the mean
            // mode up so the matching equilibrium is well defined.
            double mass = total_mass(f);
            if (mass <= 0.1) {
                double lift = (0.1 - mass) / (two_pi * grid.n_nodes());
                for (int j = 0; j < f.n_nodes; ++j) f.at(j, 0, 0) += lift;
                mass = total_mass(f);
            }
            EquilibriumState eq = equilibrium(mass, grid, sigma_t);

            const double i_f = dissipation(f, grid, sigma_t);
            const double l2 = l2_gamma_sq(f, grid, &eq);
            const double nerr = n_err_sq(f, grid, eq);
            const double j2 = j_norm_sq(f, grid, sigma_t);
            const double p2 = p_minus_sigma_n_sq(f, grid, sigma_t);

            InequalityRow row;
            row.field_index = i;
            row.sigma_t = sigma_t;
            row.margin_gp = sigma_t * i_f + nerr - l2;
            row.margin_flux = sigma_t * sigma_t * i_f - j2;
            row.margin_press = 3.0 * sigma_t * sigma_t * sigma_t * i_f - p2;
            row.nominal_gp = i_f + nerr - l2;
            row.nominal_flux = sigma_t * i_f - j2;
            row.nominal_press = 3.0 * sigma_t * sigma_t * i_f - p2;
            rep.rows.push_back(row);

            const double s_gp = std::max(1.0, sigma_t * i_f + nerr + l2);
            const double s_fl = std::max(1.0, sigma_t * sigma_t * i_f + j2);
            const double s_pr = std::max(1.0, 3.0 * sigma_t * sigma_t * sigma_t * i_f + p2);
            const double rel = std::min({row.margin_gp / s_gp, row.margin_flux / s_fl,
                                         row.margin_press / s_pr});
            rep.worst_margin = std::min(rep.worst_margin, rel);
            if (rel < -tolerance) ++rep.violations;
        }
    }
    return rep;
}

std::string InequalityReport::text() const {
    std::string s;
    s += "inequality battery: " + std::to_string(rows.size()) + " fields, " +
         std::to_string(violations) + " violations (tolerance " + fmt(tolerance) + ")\n";
    s += "  worst relative margin = " + fmt(worst_margin) + "\n";
    return s;
}

std::string InequalityReport::csv() const {
    std::string s =
        "field,sigma_t,margin_gp,margin_flux,margin_press,"
        "nominal_gp,nominal_flux,nominal_press\n";
    for (const auto& r : rows)
        s += std::to_string(r.field_index) + "," + fmt(r.sigma_t) + "," +
             fmt(r.margin_gp) + "," + fmt(r.margin_flux) + "," + fmt(r.margin_press) +
             "," + fmt(r.nominal_gp) + "," + fmt(r.nominal_flux) + "," +
             fmt(r.nominal_press) + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// Decay fitting
// ---------------------------------------------------------------------------

DecayFit fit_decay_rate(const std::vector<double>& times,
                        const std::vector<double>& values) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_decay_rate: size mismatch");
    if (times.size() < 5)
        throw std::invalid_argument("fit_decay_rate: need at least 5 samples");
    const std::size_t n = times.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(values[i] > 0.0))
            throw std::invalid_argument("fit_decay_rate: values must be positive");
        y[i] = std::log(values[i]);
    }
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tm += times[i];
        ym += y[i];
    }
    tm /= double(n);
    ym /= double(n);
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (times[i] - tm) * (times[i] - tm);
        sty += (times[i] - tm) * (y[i] - ym);
    }
    if (!(stt > 0.0))
        throw std::invalid_argument("fit_decay_rate: times must not be all equal");
    const double slope = sty / stt;
    DecayFit fit;
    fit.rate = -slope;
    fit.intercept = ym - slope * tm;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.intercept + slope * times[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - ym) * (y[i] - ym);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace ksfp
