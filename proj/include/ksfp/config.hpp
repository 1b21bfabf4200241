#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksfp/grid.hpp"
#include "ksfp/params.hpp"
#include "ksfp/solver.hpp"

namespace ksfp {

// Named initial-data family with its parameters.  Families:
//   equilibrium                 spatially homogeneous steady state
//   cosine-perturbed            N = N_inf (1 + delta cos theta)
//   hermite-mode                equilibrium plus coefficient c at (n, k)
//   well-prepared               rho_in M with rho_in = (mass/2pi)(1 + a cos + b sin)
struct InitialSpec {
    std::string family = "equilibrium";
    double mass = 1.0;
    double delta = 0.1;
    int mode_n = 1;
    int mode_k = 0;
    double mode_c = 0.1;
    double wp_a = 0.5;
    double wp_b = 0.0;
};

// Fully parsed experiment description.  Field groups mirror the config
// sections; accessors build the module-level objects with the usual
// validation.
struct ExperimentConfig {
    // [experiment]
    std::string kind = "stability"; // stability | rescaled | dd | sweep |
                                    // verify | particles | compare
    std::string out_dir;            // empty: report only, no files
    std::uint64_t seed = 1;

    // [params]  (kappa/sigma may be given rescaled; flags record which)
    double m = 1.0;
    double kappa_in = 0.0;
    double sigma_in = 1.0;
    bool kappa_rescaled = false;
    bool sigma_rescaled = false;
    double epsilon = 0.0; // 0 = unset

    // [grid]
    int n_theta = 32;
    int n_hermite = 16;
    bool nu_delta0 = true;
    std::vector<NuNode> nu_nodes; // raw, normalized by build_grid

    // [solver]
    double dt = 0.0;
    double t_final = 1.0;
    std::string scheme = "exponential-splitting-rk4";
    int stride = 10;
    std::string cfl = "refuse"; // refuse | warn
    std::vector<double> snapshots;

    // [initial]
    InitialSpec initial;

    // [sweep]
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    long step_budget = 2000000;

    // [verify]
    std::vector<double> sigma_list{0.5, 1.0, 2.0};
    int n_fields = 1000;
    double c_inf = 0.0; // 0 selects the default formula
    double tol = 1e-12;

    // [particles]
    long n_particles = 10000;
    double particle_dt = 1e-3;
    int n_bins = 32;

    SimParams params() const;
    Grid grid() const;
    SolverConfig solver() const;
};

struct ConfigError {
    int line = 0; // 0: cross-field check without a single source line
    std::string message;
};

// Carries every error found in one pass, not just the first.
struct ConfigParseError : std::runtime_error {
    std::vector<ConfigError> errors;
    explicit ConfigParseError(std::vector<ConfigError> errs);
};

ExperimentConfig parse_config(const std::string& text);

// Canonical form: fixed section and key order, %.17g numbers.  Parsing the
// output reproduces the config, and serialize(parse(serialize(c))) equals
// serialize(c) byte for byte.
std::string serialize_config(const ExperimentConfig& cfg);

// Applies "section.key=value" to the config through the same per-key
// validation as parse_config.  Cross-field checks are deferred so that a
// batch of overrides may pass through an intermediate state; run
// validate_config once the batch is complete.
void apply_override(ExperimentConfig& cfg, const std::string& spec);

// Cross-field consistency checks (kind/epsilon coupling, initial-mode
// ranges).  parse_config runs this automatically; run_experiment runs it
// again on entry.
void validate_config(const ExperimentConfig& cfg);

} // namespace ksfp
