#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "ksfp/config.hpp"
#include "ksfp/experiment.hpp"
#include "ksfp/io.hpp"
#include "ksfp/solver.hpp"
#include "ksfp/version.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
};

int run_kind(const std::string& kind, const CliOptions& opt, bool seed_set) {
    ksfp::ExperimentConfig cfg;
    if (!opt.config_path.empty())
        cfg = ksfp::parse_config(ksfp::read_text_file(opt.config_path));
    if (!kind.empty()) ksfp::apply_override(cfg, "experiment.kind=" + kind);
    for (const auto& o : opt.overrides) ksfp::apply_override(cfg, o);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (seed_set) cfg.seed = opt.seed;

    const ksfp::RunResult res = ksfp::run_experiment(cfg);
    std::fputs(res.report.c_str(), stdout);
    for (const auto& f : res.files) std::printf("wrote %s\n", f.c_str());
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic spectral laboratory for the inertial kinetic "
                 "mean-field model"};
    app.set_version_flag("--version", std::string(ksfp::version));
    app.require_subcommand(0, 1);
    app.fallthrough();

    CliOptions opt;
    app.add_option("--config", opt.config_path, "INI config file");
    app.add_option("--out", opt.out_dir, "output directory (overrides the config)");
    CLI::Option* seed_opt = app.add_option("--seed", opt.seed, "RNG seed (overrides the config)");
    app.add_option("--override", opt.overrides,
                   "section.key=value applied after the config; repeatable");

    const std::pair<const char*, const char*> kinds[] = {
        {"simulate-kinetic", "stability"},
        {"simulate-rescaled", "rescaled"},
        {"simulate-dd", "dd"},
        {"sweep-epsilon", "sweep"},
        {"verify", "verify"},
        {"simulate-particles", "particles"},
        {"compare", "compare"},
    };
    const char* descriptions[] = {
        "evolve the kinetic equation and record energy diagnostics",
        "evolve the scale-separated form at fixed epsilon",
        "evolve the drift-diffusion limit equation",
        "run the epsilon convergence sweep against the limit equation",
        "run the functional-inequality and regime checks",
        "run the Euler-Maruyama particle system",
        "compare particle and kinetic angular densities",
    };
    std::string chosen;
    for (std::size_t i = 0; i < std::size(kinds); ++i) {
        CLI::App* sub = app.add_subcommand(kinds[i].first, descriptions[i]);
        sub->fallthrough();
        const char* kind = kinds[i].second;
        sub->callback([&chosen, kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (chosen.empty() && opt.config_path.empty()) {
            std::fputs(app.help().c_str(), stdout);
            return 64;
        }
        return run_kind(chosen, opt, seed_opt->count() > 0);
    } catch (const ksfp::ConfigParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 64;
    } catch (const ksfp::SolverAbort& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
