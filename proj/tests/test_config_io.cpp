#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ksfp/config.hpp"
#include "ksfp/experiment.hpp"
#include "ksfp/io.hpp"
#include "ksfp/spectral_ops.hpp"
#include "oracles.hpp"

using namespace ksfp;
using oracles::two_pi;

TEST_CASE("an empty config text yields the documented defaults") {
    ExperimentConfig c = parse_config("");
    CHECK(c.kind == "stability");
    CHECK(c.out_dir.empty());
    CHECK(c.seed == 1);
    CHECK(c.m == 1.0);
    CHECK(c.n_theta == 32);
    CHECK(c.n_hermite == 16);
    CHECK(c.nu_delta0);
    CHECK(c.initial.family == "equilibrium");

    SimParams p = c.params();
    CHECK(p.m == 1.0);
    CHECK(p.kappa == 0.0);
    CHECK(p.sigma == 1.0);
    Grid g = c.grid();
    CHECK(g.n_theta == 32);
    CHECK(g.nodes.size() == 1);
    CHECK(g.nodes[0].nu == 0.0);
    SolverConfig s = c.solver();
    CHECK(s.t_final == 1.0);
    CHECK(s.stride == 10);
    CHECK(s.scheme == Scheme::ExpRK4);
    CHECK(s.cfl_mode == CflMode::Refuse);
}

TEST_CASE("parsing handles comments, rescaled parameters and node lists") {
    const std::string text =
        "# full example\n"
        "[experiment]\n"
        "kind = rescaled   ; trailing comment\n"
        "seed = 99\n"
        "[params]\n"
        "m = 0.3\n"
        "kappa_t = 0.7\n"
        "sigma_t = 1.9\n"
        "epsilon = 0.3\n"
        "[grid]\n"
        "n_theta = 16\n"
        "n_hermite = 6\n"
        "nu_nodes = -0.5:1:2, 0.5:1:2\n"
        "[solver]\n"
        "dt = 0.001\n"
        "t_final = 0.25\n"
        "scheme = exponential-splitting-rk2\n"
        "cfl = warn\n"
        "snapshots = 0.1, 0.2\n"
        "[initial]\n"
        "family = cosine-perturbed\n"
        "delta = 0.15\n";
    ExperimentConfig c = parse_config(text);
    CHECK(c.kind == "rescaled");
    CHECK(c.seed == 99);
    CHECK(c.kappa_rescaled);
    CHECK(c.sigma_rescaled);

    // Rescaled inputs pass through bit for bit, no m round trip.
    SimParams p = c.params();
    CHECK(p.kappa_t == 0.7);
    CHECK(p.sigma_t == 1.9);
    CHECK(p.epsilon == 0.3);

    Grid g = c.grid();
    REQUIRE(g.nodes.size() == 2);
    CHECK(g.nodes[0].nu == -0.5);
    CHECK(g.nodes[0].g == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c.solver().snapshot_times == std::vector<double>{0.1, 0.2});
    CHECK(c.solver().cfl_mode == CflMode::Warn);
    CHECK(c.initial.delta == 0.15);
}

TEST_CASE("serialization is canonical and reparses to the same bytes") {
    const std::string text =
        "[experiment]\nkind = sweep\nseed = 5\n"
        "[params]\nm = 0.125\nkappa_t = 0.77\nsigma = 2.5\nepsilon = 0.2\n"
        "[grid]\nn_theta = 24\nn_hermite = 10\nnu_nodes = -1:1:1, 0:2:1, 1:1:1\n"
        "[sweep]\neps_list = 0.4, 0.2, 0.1\nstep_budget = 5000\n"
        "[initial]\nfamily = well-prepared\na = 0.3\nb = 0.125\n";
    ExperimentConfig c = parse_config(text);
    const std::string s1 = serialize_config(c);
    ExperimentConfig c2 = parse_config(s1);
    const std::string s2 = serialize_config(c2);
    CHECK(s1 == s2);
    CHECK(c2.kappa_in == c.kappa_in);
    CHECK(c2.kappa_rescaled == c.kappa_rescaled);
    CHECK(c2.sigma_rescaled == c.sigma_rescaled);
    CHECK(c2.epsilon == 0.2);
    CHECK(c2.eps_list == c.eps_list);
    CHECK(c2.step_budget == 5000);
    CHECK(c2.nu_nodes.size() == 3);
    CHECK(c2.initial.wp_b == 0.125);
}

TEST_CASE("every parse error is collected with its source line") {
    const std::string text =
        "[params]\n"
        "m = abc\n"
        "[grid]\n"
        "n_theta = 7\n"
        "bogus = 1\n"
        "[nope]\n"
        "x = 1\n";
    try {
        parse_config(text);
        FAIL("expected ConfigParseError");
    } catch (const ConfigParseError& e) {
        REQUIRE(e.errors.size() == 4);
        CHECK(e.errors[0].line == 2);
        CHECK(e.errors[0].message.find("expected a number") != std::string::npos);
        CHECK(e.errors[1].line == 4);
        CHECK(e.errors[1].message.find("even") != std::string::npos);
        CHECK(e.errors[2].line == 5);
        CHECK(e.errors[2].message.find("unknown key") != std::string::npos);
        CHECK(e.errors[3].line == 6);
        CHECK(e.errors[3].message.find("unknown section") != std::string::npos);
        CHECK(std::string(e.what()).find("4 error(s)") != std::string::npos);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }

    CHECK_THROWS_WITH_AS(parse_config("m = 1\n"), doctest::Contains("outside any section"),
                         ConfigParseError);
    CHECK_THROWS_WITH_AS(parse_config("[params\nm = 1\n"),
                         doctest::Contains("malformed section header"), ConfigParseError);
    CHECK_THROWS_WITH_AS(parse_config("[params]\njust words\n"),
                         doctest::Contains("key = value"), ConfigParseError);
    CHECK_THROWS_WITH_AS(parse_config("[grid]\nnu_nodes = -1:1\n"),
                         doctest::Contains("triples"), ConfigParseError);
}

TEST_CASE("cross-field checks catch inconsistent configs") {
    SUBCASE("scale separation needs epsilon") {
        try {
            parse_config("[experiment]\nkind = rescaled\n");
            FAIL("expected ConfigParseError");
        } catch (const ConfigParseError& e) {
            REQUIRE(e.errors.size() == 1);
            CHECK(e.errors[0].line == 0);
            CHECK(e.errors[0].message.find("epsilon") != std::string::npos);
        }
    }

    SUBCASE("mode indices must live on the grid") {
        CHECK_THROWS_WITH_AS(
            parse_config("[initial]\nfamily = hermite-mode\nn = 40\n"),
            doctest::Contains("exceeds n_hermite"), ConfigParseError);
        CHECK_THROWS_WITH_AS(
            parse_config("[initial]\nfamily = hermite-mode\nn = 0\nk = 0\n"),
            doctest::Contains("mass mode"), ConfigParseError);
        CHECK_THROWS_WITH_AS(
            parse_config("[grid]\nn_theta = 8\n[initial]\nfamily = hermite-mode\nk = 7\n"),
            doctest::Contains("mode range"), ConfigParseError);
    }
}

TEST_CASE("overrides reuse the per-key validation and defer cross checks") {
    ExperimentConfig c = parse_config("");
    apply_override(c, "params.m=2.5");
    CHECK(c.m == 2.5);
    apply_override(c, "solver.scheme=exponential-splitting-rk2");
    CHECK(c.scheme == "exponential-splitting-rk2");

    CHECK_THROWS_WITH_AS(apply_override(c, "params.m"), doctest::Contains("section.key=value"),
                         ConfigParseError);
    CHECK_THROWS_WITH_AS(apply_override(c, "m=2"), doctest::Contains("section.key=value"),
                         ConfigParseError);
    CHECK_THROWS_WITH_AS(apply_override(c, "nope.m=2"), doctest::Contains("unknown section"),
                         ConfigParseError);
    CHECK_THROWS_WITH_AS(apply_override(c, "params.m=-1"), doctest::Contains("positive"),
                         ConfigParseError);
    CHECK(c.m == 2.5); // failed overrides leave the config untouched

    // kind=rescaled without epsilon passes per-key validation; the batch is
    // checked as a whole by validate_config.
    apply_override(c, "experiment.kind=rescaled");
    CHECK_THROWS_AS(validate_config(c), ConfigParseError);
    apply_override(c, "params.epsilon=0.1");
    CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("snapshots round trip bit for bit and reject damaged bytes") {
    Grid g = build_grid(12, 3, {{-0.4, 1.0, 1.0}, {0.4, 1.0, 1.0}});
    SpectralField c = oracles::random_hermitian_field(g, 345u);
    SnapshotMeta meta;
    meta.sigma_t = 1.25;
    meta.kappa_t = 0.5;
    meta.m = 0.8;
    meta.time = 3.75;
    const std::string bytes = snapshot_bytes(c, meta);
    Snapshot back = parse_snapshot(bytes);
    CHECK(back.field.data == c.data);
    CHECK(back.meta.sigma_t == 1.25);
    CHECK(back.meta.kappa_t == 0.5);
    CHECK(back.meta.m == 0.8);
    CHECK(back.meta.time == 3.75);

    const auto dir = std::filesystem::temp_directory_path() / "ksfp_snap_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "state.snap").string();
    write_snapshot(path, c, meta);
    Snapshot disk = read_snapshot(path);
    CHECK(disk.field.data == c.data);
    std::filesystem::remove_all(dir);

    CHECK_THROWS_WITH_AS(parse_snapshot(bytes.substr(0, bytes.size() - 5)),
                         doctest::Contains("truncated"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_snapshot(bytes + "xx"), doctest::Contains("trailing"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_snapshot(std::string(200, 'z')),
                         doctest::Contains("implausible"), std::runtime_error);
}

TEST_CASE("csv emitters use stable headers and full precision") {
    Grid g = build_grid_delta0(16, 4);
    SimParams plain = SimParams::from_rescaled(1.0, 0.0, 1.0);
    EquilibriumState eq = equilibrium(1.0, g, 1.0);
    SolverConfig scfg;
    scfg.dt = 0.01;
    scfg.t_final = 0.05;
    scfg.stride = 1;
    Trajectory traj = run(eq.field(g), plain, g, scfg);
    const std::string csv = energy_csv(traj);
    CHECK(csv.rfind("t,mass,l2gamma_sq,I,A,E,N_err_sq\n", 0) == 0);

    SimParams resc = SimParams::from_rescaled(0.5, 0.0, 1.0, 0.5);
    Trajectory rt = run_rescaled(eq.field(g), resc, g, scfg);
    const std::string rcsv = energy_csv(rt);
    CHECK(rcsv.rfind("t,mass,l2gamma_sq,I,A,E,N_err_sq,micro_err,l2_minv,dtheta_l2_minv\n",
                     0) == 0);

    const std::string two = two_column_csv("eps", "err", {0.5}, {0.125});
    CHECK(two == "eps,err\n0.5,0.125\n");
    CHECK_THROWS_AS(two_column_csv("x", "y", {1.0}, {1.0, 2.0}), std::invalid_argument);

    const std::string fcsv = field_csv(eq.field(g));
    CHECK(fcsv.rfind("j,n,k,re,im\n", 0) == 0);
    // one row per stored coefficient plus the header
    const auto rows = std::count(fcsv.begin(), fcsv.end(), '\n');
    CHECK(rows == 1 + 1 * (4 + 1) * 16);
}

TEST_CASE("the content hash matches the reference fnv1a values") {
    CHECK(fnv1a64(std::string{}) == 0xcbf29ce484222325ull);
    CHECK(fnv1a64(std::string{"a"}) == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
    CHECK(hex64(0x5ull) == "0000000000000005");
}

TEST_CASE("worker counts come from the environment with a sane cap") {
    auto with_env = [](const char* v) {
        if (v == nullptr)
            unsetenv("KSFP_WORKERS");
        else
            setenv("KSFP_WORKERS", v, 1);
        const int w = workers_from_env();
        unsetenv("KSFP_WORKERS");
        return w;
    };
    CHECK(with_env(nullptr) == 1);
    CHECK(with_env("") == 1);
    CHECK(with_env("abc") == 1);
    CHECK(with_env("0") == 1);
    CHECK(with_env("-2") == 1);
    CHECK(with_env("3") == 3);
    CHECK(with_env("1000") == 256);
}

TEST_CASE("initial families build the advertised coefficients") {
    Grid g = build_grid(16, 6, {{-0.5, 1.0, 1.0}, {0.5, 1.0, 1.0}});
    SimParams p = SimParams::from_rescaled(1.0, 0.0, 1.3);
    EquilibriumState eq = equilibrium(2.0, g, p.sigma_t);

    SUBCASE("equilibrium family is the steady state itself") {
        InitialSpec spec;
        spec.mass = 2.0;
        CHECK(build_initial(spec, g, p).data == eq.field(g).data);
    }

    SUBCASE("cosine perturbation tilts the density and keeps the mass") {
        InitialSpec spec;
        spec.family = "cosine-perturbed";
        spec.mass = 2.0;
        spec.delta = 0.2;
        SpectralField c = build_initial(spec, g, p);
        CHECK(total_mass(c) == doctest::Approx(2.0).epsilon(1e-15));
        for (int j = 0; j < 2; ++j) {
            CHECK(c.at(j, 0, 1).real() ==
                  doctest::Approx(0.1 * eq.n_inf[static_cast<std::size_t>(j)]).epsilon(1e-15));
            CHECK(c.at(j, 0, 1).imag() == 0.0);
        }
        std::vector<double> rho = initial_density_samples(spec, g, p);
        for (int i = 0; i < g.n_theta; ++i) {
            const double th = g.theta[static_cast<std::size_t>(i)];
            CHECK(rho[static_cast<std::size_t>(i)] ==
                  doctest::Approx(2.0 / two_pi * (1.0 + 0.2 * std::cos(th))).epsilon(1e-12));
        }
    }

    SUBCASE("hermite mode injects one weighted coefficient pair") {
        InitialSpec spec;
        spec.family = "hermite-mode";
        spec.mass = 2.0;
        spec.mode_n = 2;
        spec.mode_k = 1;
        spec.mode_c = 0.01;
        SpectralField c = build_initial(spec, g, p);
        for (int j = 0; j < 2; ++j) {
            CHECK(c.at(j, 0, 0) == eq.field(g).at(j, 0, 0)); // density untouched
            CHECK(c.at(j, 2, 1).real() == doctest::Approx(0.005).epsilon(1e-15));
            CHECK(c.at(j, 2, -1) == c.at(j, 2, 1));
        }
        CHECK(c.hermitian_defect() == 0.0);

        spec.mode_k = g.n_theta / 2; // lone cosine mode has no mirror partner
        SpectralField ny = build_initial(spec, g, p);
        CHECK(ny.hermitian_defect() == 0.0);

        spec.mode_n = 99;
        CHECK_THROWS_AS(build_initial(spec, g, p), std::invalid_argument);
    }

    SUBCASE("well-prepared data is a pure density tilt") {
        InitialSpec spec;
        spec.family = "well-prepared";
        spec.mass = 1.5;
        spec.wp_a = 0.3;
        spec.wp_b = -0.2;
        std::vector<double> rho = initial_density_samples(spec, g, p);
        for (int i = 0; i < g.n_theta; ++i) {
            const double th = g.theta[static_cast<std::size_t>(i)];
            const double want =
                1.5 / two_pi * (1.0 + 0.3 * std::cos(th) - 0.2 * std::sin(th));
            CHECK(rho[static_cast<std::size_t>(i)] ==
                  doctest::Approx(want).scale(1.0).epsilon(1e-12));
        }
        SpectralField c = build_initial(spec, g, p);
        double upper_rows = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int n = 1; n <= g.n_hermite; ++n)
                for (int k = c.k_min(); k <= c.k_max(); ++k)
                    upper_rows = std::max(upper_rows, std::abs(c.at(j, n, k)));
        CHECK(upper_rows == 0.0);
    }

    SUBCASE("unknown families are refused") {
        InitialSpec spec;
        spec.family = "vortex";
        CHECK_THROWS_WITH_AS(build_initial(spec, g, p), doctest::Contains("unknown family"),
                             std::invalid_argument);
    }
}

TEST_CASE("a full experiment writes verifiable artifacts") {
    const auto dir = std::filesystem::temp_directory_path() / "ksfp_run_test";
    std::filesystem::remove_all(dir);

    ExperimentConfig cfg = parse_config(
        "[experiment]\nkind = stability\n"
        "[grid]\nn_theta = 16\nn_hermite = 6\n"
        "[solver]\ndt = 0.001\nt_final = 0.05\nstride = 10\n"
        "[initial]\nfamily = cosine-perturbed\ndelta = 0.1\n");
    cfg.out_dir = (dir / "run1").string();

    RunResult r = run_experiment(cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.report.find("kind: stability") != std::string::npos);
    REQUIRE(!r.files.empty());
    for (const std::string& f : r.files) CHECK(std::filesystem::exists(f));

    // Manifest hashes must match a re-hash of the bytes on disk.
    const std::string man = read_text_file((dir / "run1" / "manifest.txt").string());
    std::size_t checked = 0;
    std::size_t pos = 0;
    while ((pos = man.find("file ", pos)) != std::string::npos) {
        const std::size_t sp = man.find(' ', pos + 5);
        const std::size_t nl = man.find('\n', sp);
        const std::string name = man.substr(pos + 5, sp - pos - 5);
        const std::string hash = man.substr(sp + 1, nl - sp - 1);
        const std::string content = read_text_file((dir / "run1" / name).string());
        CHECK(hex64(fnv1a64(content)) == hash);
        ++checked;
        pos = nl;
    }
    CHECK(checked >= 3); // energy.csv, regime.txt, summary.txt at least

    // Reruns are byte-identical.
    cfg.out_dir = (dir / "run2").string();
    run_experiment(cfg);
    CHECK(read_text_file((dir / "run1" / "energy.csv").string()) ==
          read_text_file((dir / "run2" / "energy.csv").string()));

    // Without out_dir only the report is produced.
    cfg.out_dir.clear();
    RunResult dry = run_experiment(cfg);
    CHECK(dry.exit_code == 0);
    CHECK(dry.files.empty());
    CHECK(!dry.report.empty());

    std::filesystem::remove_all(dir);
}
