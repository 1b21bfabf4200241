#pragma once

#include <string>
#include <vector>

#include "ksfp/config.hpp"
#include "ksfp/field.hpp"
#include "ksfp/grid.hpp"
#include "ksfp/params.hpp"

namespace ksfp {

// Worker count from the KSFP_WORKERS environment variable; unset or invalid
// selects 1.  Workers only chunk loops, results never depend on the count.
int workers_from_env();

// Coefficients of the named initial family on the grid.  All families share
// the equilibrium n = 0 baseline carrying `mass`; see InitialSpec.
SpectralField build_initial(const InitialSpec& spec, const Grid& grid,
                            const SimParams& p);

// Angular density of the initial family at the n_theta grid angles.
std::vector<double> initial_density_samples(const InitialSpec& spec,
                                            const Grid& grid, const SimParams& p);

struct RunResult {
    int exit_code = 0;             // 0 ok, 2 solver abort, 4 verification failure
    std::string report;            // human-readable summary (also summary.txt)
    std::vector<std::string> files; // paths written, manifest order
};

// Executes the experiment described by cfg.  With cfg.out_dir set, writes
// the kind-specific artifacts plus summary.txt and manifest.txt; otherwise
// only the report is produced.
RunResult run_experiment(const ExperimentConfig& cfg);

} // namespace ksfp
