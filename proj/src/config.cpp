#include "ksfp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

namespace ksfp {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_double_str(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

bool parse_long_str(const std::string& s, long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

bool parse_int_str(const std::string& s, int& out) {
    long v = 0;
    if (!parse_long_str(s, v) || v < -2147483647L || v > 2147483647L) return false;
    out = static_cast<int>(v);
    return true;
}

bool parse_u64_str(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s[0] == '-') return false;
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(trim(s.substr(pos)));
            break;
        }
        out.push_back(trim(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

struct ParseCtx {
    ExperimentConfig cfg;
    std::vector<ConfigError> errors;

    void err(int line, const std::string& msg) { errors.push_back({line, msg}); }

    bool number(int line, const std::string& key, const std::string& value,
                double& out) {
        double v = 0.0;
        if (!parse_double_str(value, v)) {
            err(line, key + ": expected a number, got '" + value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool number_list(int line, const std::string& key, const std::string& value,
                     std::vector<double>& out) {
        std::vector<double> vals;
        for (const std::string& tok : split_on(value, ',')) {
            double v = 0.0;
            if (!parse_double_str(tok, v)) {
                err(line, key + ": expected a number list, bad entry '" + tok + "'");
                return false;
            }
            vals.push_back(v);
        }
        out = std::move(vals);
        return true;
    }
};

const std::set<std::string> kinds = {"stability", "rescaled", "dd",       "sweep",
                                     "verify",    "particles", "compare"};
const std::set<std::string> families = {"equilibrium", "cosine-perturbed",
                                        "hermite-mode", "well-prepared"};
const std::set<std::string> sections = {"experiment", "params",  "grid",
                                        "solver",     "initial", "sweep",
                                        "verify",     "particles"};

void apply_key(ParseCtx& ctx, const std::string& section, const std::string& key,
               const std::string& value, int line) {
    ExperimentConfig& c = ctx.cfg;
    double d = 0.0;

    if (section == "experiment") {
        if (key == "kind") {
            if (!kinds.count(value)) {
                ctx.err(line, "kind: unknown experiment kind '" + value + "'");
                return;
            }
            c.kind = value;
        } else if (key == "out") {
            c.out_dir = value;
        } else if (key == "seed") {
            std::uint64_t u = 0;
            if (!parse_u64_str(value, u)) {
                ctx.err(line, "seed: expected an unsigned integer, got '" + value + "'");
                return;
            }
            c.seed = u;
        } else {
            ctx.err(line, "unknown key '" + key + "' in [experiment]");
        }
        return;
    }

    if (section == "params") {
        if (key == "m") {
            if (ctx.number(line, key, value, d)) {
                if (!(d > 0.0)) ctx.err(line, "m must be positive");
                else c.m = d;
            }
        } else if (key == "kappa" || key == "kappa_t") {
            if (ctx.number(line, key, value, d)) {
                if (!(d >= 0.0)) ctx.err(line, key + " must be nonnegative");
                else {
                    c.kappa_in = d;
                    c.kappa_rescaled = key == "kappa_t";
                }
            }
        } else if (key == "sigma" || key == "sigma_t") {
            if (ctx.number(line, key, value, d)) {
                if (!(d > 0.0)) ctx.err(line, key + " must be positive");
                else {
                    c.sigma_in = d;
                    c.sigma_rescaled = key == "sigma_t";
                }
            }
        } else if (key == "epsilon") {
            if (ctx.number(line, key, value, d)) {
                if (!(d > 0.0)) ctx.err(line, "epsilon must be positive");
                else c.epsilon = d;
            }
        } else {
            ctx.err(line, "unknown key '" + key + "' in [params]");
        }
        return;
    }

    if (section == "grid") {
        if (key == "n_theta") {
            int v = 0;
            if (!parse_int_str(value, v)) {
                ctx.err(line, "n_theta: expected an integer, got '" + value + "'");
            } else if (v < 4 || v % 2 != 0) {
                ctx.err(line, "n_theta must be even and at least 4 (got " +
                                  std::to_string(v) + ")");
            } else {
                c.n_theta = v;
            }
        } else if (key == "n_hermite") {
            int v = 0;
            if (!parse_int_str(value, v)) {
                ctx.err(line, "n_hermite: expected an integer, got '" + value + "'");
            } else if (v < 2) {
                ctx.err(line, "n_hermite must be at least 2");
            } else {
                c.n_hermite = v;
            }
        } else if (key == "nu_nodes") {
            if (value == "delta0") {
                c.nu_delta0 = true;
                c.nu_nodes.clear();
                return;
            }
            std::vector<NuNode> nodes;
            bool ok = true;
            for (const std::string& tok : split_on(value, ',')) {
                const std::vector<std::string> parts = split_on(tok, ':');
                NuNode n;
                if (parts.size() != 3 || !parse_double_str(parts[0], n.nu) ||
                    !parse_double_str(parts[1], n.g) ||
                    !parse_double_str(parts[2], n.gbar)) {
                    ctx.err(line, "nu_nodes: expected nu:g:gbar triples, bad entry '" +
                                      tok + "'");
                    ok = false;
                    break;
                }
                if (!(n.g >= 0.0) || !(n.gbar > 0.0)) {
                    ctx.err(line, "nu_nodes: need g >= 0 and gbar > 0 in '" + tok + "'");
                    ok = false;
                    break;
                }
                nodes.push_back(n);
            }
            if (ok && nodes.empty()) {
                ctx.err(line, "nu_nodes must be 'delta0' or a nonempty node list");
                ok = false;
            }
            if (ok) {
                c.nu_delta0 = false;
                c.nu_nodes = std::move(nodes);
            }
        } else {
            ctx.err(line, "unknown key '" + key + "' in [grid]");
        }
        return;
    }

    if (section == "solver") {
        if (key == "dt") {
            if (ctx.number(line, key, value, d)) {
                if (d < 0.0) ctx.err(line, "dt must be >= 0 (0 selects the CFL step)");
                else c.dt = d;
            }
        } else if (key == "t_final") {
            if (ctx.number(line, key, value, d)) {
                if (!(d > 0.0)) ctx.err(line, "t_final must be positive");
                else c.t_final = d;
            }
        } else if (key == "scheme") {
            if (value != "exponential-splitting-rk2" &&
                value != "exponential-splitting-rk4") {
                ctx.err(line, "scheme: unknown scheme '" + value + "'");
            } else {
                c.scheme = value;
            }
        } else if (key == "stride") {
            int v = 0;
            if (!parse_int_str(value, v) || v < 1)
                ctx.err(line, "stride must be a positive integer");
            else
                c.stride = v;
        } else if (key == "cfl") {
            if (value != "refuse" && value != "warn")
                ctx.err(line, "cfl must be 'refuse' or 'warn'");
            else
                c.cfl = value;
        } else if (key == "snapshots") {
            std::vector<double> times;
            if (ctx.number_list(line, key, value, times)) {
                for (double t : times)
                    if (t < 0.0) {
                        ctx.err(line, "snapshots: times must be >= 0");
                        return;
                    }
                c.snapshots = std::move(times);
            }
        } else {
            ctx.err(line, "unknown key '" + key + "' in [solver]");
        }
        return;
    }

    if (section == "initial") {
        InitialSpec& ini = c.initial;
        if (key == "family") {
            if (!families.count(value))
                ctx.err(line, "family: unknown initial family '" + value + "'");
            else
                ini.family = value;
        } else if (key == "mass") {
            if (ctx.number(line, key, value, d)) {
                if (!(d > 0.0)) ctx.err(line, "mass must be positive");
                else ini.mass = d;
            }
        } else if (key == "delta") {
            if (ctx.number(line, key, value, d)) ini.delta = d;
        } else if (key == "n") {
            int v = 0;
            if (!parse_int_str(value, v) || v < 0)
                ctx.err(line, "n must be a nonnegative integer");
            else
                ini.mode_n = v;
        } else if (key == "k") {
            int v = 0;
            if (!parse_int_str(value, v))
                ctx.err(line, "k: expected an integer, got '" + value + "'");
            else
                ini.mode_k = v;
        } else if (key == "c") {
            if (ctx.number(line, key, value, d)) ini.mode_c = d;
        } else if (key == "a") {
            if (ctx.number(line, key, value, d)) ini.wp_a = d;
        } else if (key == "b") {
            if (ctx.number(line, key, value, d)) ini.wp_b = d;
        } else {
            ctx.err(line, "unknown key '" + key + "' in [initial]");
        }
        return;
    }

    if (section == "sweep") {
        if (key == "eps_list") {
            std::vector<double> eps;
            if (!ctx.number_list(line, key, value, eps)) return;
            if (eps.size() < 2) {
                ctx.err(line, "eps_list needs at least two values");
                return;
            }
            for (std::size_t i = 0; i < eps.size(); ++i) {
                if (!(eps[i] > 0.0)) {
                    ctx.err(line, "eps_list values must be positive");
                    return;
                }
                if (i > 0 && !(eps[i] < eps[i - 1])) {
                    ctx.err(line, "eps_list must be strictly decreasing");
                    return;
                }
            }
            c.eps_list = std::move(eps);
        } else if (key == "step_budget") {
            long v = 0;
            if (!parse_long_str(value, v) || v < 1)
                ctx.err(line, "step_budget must be a positive integer");
            else
                c.step_budget = v;
        } else {
            ctx.err(line, "unknown key '" + key + "' in [sweep]");
        }
        return;
    }

    if (section == "verify") {
        if (key == "sigma_list") {
            std::vector<double> sig;
            if (!ctx.number_list(line, key, value, sig)) return;
            if (sig.empty()) {
                ctx.err(line, "sigma_list must not be empty");
                return;
            }
            for (double s : sig)
                if (!(s > 0.0)) {
                    ctx.err(line, "sigma_list values must be positive");
                    return;
                }
            c.sigma_list = std::move(sig);
        } else if (key == "n_fields") {
            int v = 0;
            if (!parse_int_str(value, v) || v < 1)
                ctx.err(line, "n_fields must be a positive integer");
            else
                c.n_fields = v;
        } else if (key == "c_inf") {
            if (ctx.number(line, key, value, d)) {
                if (d < 0.0) ctx.err(line, "c_inf must be >= 0 (0 selects the default)");
                else c.c_inf = d;
            }
        } else if (key == "tol") {
            if (ctx.number(line, key, value, d)) {
                if (!(d > 0.0)) ctx.err(line, "tol must be positive");
                else c.tol = d;
            }
        } else {
            ctx.err(line, "unknown key '" + key + "' in [verify]");
        }
        return;
    }

    if (section == "particles") {
        if (key == "n") {
            long v = 0;
            if (!parse_long_str(value, v) || v < 1)
                ctx.err(line, "n must be a positive integer");
            else
                c.n_particles = v;
        } else if (key == "dt") {
            if (ctx.number(line, key, value, d)) {
                if (!(d > 0.0)) ctx.err(line, "dt must be positive");
                else c.particle_dt = d;
            }
        } else if (key == "n_bins") {
            int v = 0;
            if (!parse_int_str(value, v) || v < 4)
                ctx.err(line, "n_bins must be an integer >= 4");
            else
                c.n_bins = v;
        } else {
            ctx.err(line, "unknown key '" + key + "' in [particles]");
        }
        return;
    }
}

void cross_checks(ParseCtx& ctx) {
    ExperimentConfig& c = ctx.cfg;
    if ((c.kind == "rescaled") && !(c.epsilon > 0.0))
        ctx.err(0, "kind '" + c.kind + "' requires [params] epsilon");
    if (c.initial.family == "hermite-mode") {
        if (c.initial.mode_n == 0 && c.initial.mode_k == 0)
            ctx.err(0, "hermite-mode initial data cannot target (n, k) = (0, 0), "
                       "which is the mass mode");
        if (c.initial.mode_n > c.n_hermite)
            ctx.err(0, "hermite-mode n exceeds n_hermite");
        if (c.initial.mode_k < -c.n_theta / 2 + 1 || c.initial.mode_k > c.n_theta / 2)
            ctx.err(0, "hermite-mode k is outside the Fourier mode range");
    }
    if (!ctx.errors.empty()) throw ConfigParseError(std::move(ctx.errors));
}

std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
        if ((line[i] == '#' || line[i] == ';') &&
            (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
            return line.substr(0, i);
    }
    return line;
}

std::string join_errors(const std::vector<ConfigError>& errs) {
    std::string out = "config: " + std::to_string(errs.size()) + " error(s)";
    for (const ConfigError& e : errs) {
        out += "\n  ";
        if (e.line > 0) out += "line " + std::to_string(e.line) + ": ";
        out += e.message;
    }
    return out;
}

} // namespace

ConfigParseError::ConfigParseError(std::vector<ConfigError> errs)
    : std::runtime_error(join_errors(errs)), errors(std::move(errs)) {}

ExperimentConfig parse_config(const std::string& text) {
    ParseCtx ctx;
    std::string section;
    bool section_known = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find('\n', pos);
        const std::string raw = next == std::string::npos
                                    ? text.substr(pos)
                                    : text.substr(pos, next - pos);
        pos = next == std::string::npos ? text.size() + 1 : next + 1;
        ++line_no;

        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                ctx.err(line_no, "malformed section header '" + line + "'");
                section_known = false;
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            section_known = sections.count(section) > 0;
            if (!section_known)
                ctx.err(line_no, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            ctx.err(line_no, "expected 'key = value', got '" + line + "'");
            continue;
        }
        if (section.empty()) {
            ctx.err(line_no, "key outside any section");
            continue;
        }
        if (!section_known) continue; // section error already recorded
        apply_key(ctx, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                  line_no);
    }
    cross_checks(ctx);
    return ctx.cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& spec) {
    const std::size_t eq = spec.find('=');
    const std::size_t dot = spec.find('.');
    ParseCtx ctx;
    ctx.cfg = cfg;
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        ctx.err(0, "override must look like section.key=value, got '" + spec + "'");
        throw ConfigParseError(std::move(ctx.errors));
    }
    const std::string section = trim(spec.substr(0, dot));
    const std::string key = trim(spec.substr(dot + 1, eq - dot - 1));
    const std::string value = trim(spec.substr(eq + 1));
    if (!sections.count(section)) {
        ctx.err(0, "unknown section '" + section + "' in override");
        throw ConfigParseError(std::move(ctx.errors));
    }
    apply_key(ctx, section, key, value, 0);
    if (!ctx.errors.empty()) throw ConfigParseError(std::move(ctx.errors));
    cfg = ctx.cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    ParseCtx ctx;
    ctx.cfg = cfg;
    cross_checks(ctx);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::string out;
    out += "[experiment]\n";
    out += "kind = " + c.kind + "\n";
    if (!c.out_dir.empty()) out += "out = " + c.out_dir + "\n";
    out += "seed = " + std::to_string(c.seed) + "\n";

    out += "\n[params]\n";
    out += "m = " + fmt(c.m) + "\n";
    out += (c.kappa_rescaled ? "kappa_t = " : "kappa = ") + fmt(c.kappa_in) + "\n";
    out += (c.sigma_rescaled ? "sigma_t = " : "sigma = ") + fmt(c.sigma_in) + "\n";
    if (c.epsilon > 0.0) out += "epsilon = " + fmt(c.epsilon) + "\n";

    out += "\n[grid]\n";
    out += "n_theta = " + std::to_string(c.n_theta) + "\n";
    out += "n_hermite = " + std::to_string(c.n_hermite) + "\n";
    if (c.nu_delta0) {
        out += "nu_nodes = delta0\n";
    } else {
        out += "nu_nodes = ";
        for (std::size_t j = 0; j < c.nu_nodes.size(); ++j) {
            if (j) out += ", ";
            out += fmt(c.nu_nodes[j].nu) + ":" + fmt(c.nu_nodes[j].g) + ":" +
                   fmt(c.nu_nodes[j].gbar);
        }
        out += "\n";
    }

    out += "\n[solver]\n";
    out += "dt = " + fmt(c.dt) + "\n";
    out += "t_final = " + fmt(c.t_final) + "\n";
    out += "scheme = " + c.scheme + "\n";
    out += "stride = " + std::to_string(c.stride) + "\n";
    out += "cfl = " + c.cfl + "\n";
    if (!c.snapshots.empty()) {
        out += "snapshots = ";
        for (std::size_t i = 0; i < c.snapshots.size(); ++i) {
            if (i) out += ", ";
            out += fmt(c.snapshots[i]);
        }
        out += "\n";
    }

    out += "\n[initial]\n";
    out += "family = " + c.initial.family + "\n";
    out += "mass = " + fmt(c.initial.mass) + "\n";
    if (c.initial.family == "cosine-perturbed")
        out += "delta = " + fmt(c.initial.delta) + "\n";
    if (c.initial.family == "hermite-mode") {
        out += "n = " + std::to_string(c.initial.mode_n) + "\n";
        out += "k = " + std::to_string(c.initial.mode_k) + "\n";
        out += "c = " + fmt(c.initial.mode_c) + "\n";
    }
    if (c.initial.family == "well-prepared") {
        out += "a = " + fmt(c.initial.wp_a) + "\n";
        out += "b = " + fmt(c.initial.wp_b) + "\n";
    }

    out += "\n[sweep]\n";
    out += "eps_list = ";
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
        if (i) out += ", ";
        out += fmt(c.eps_list[i]);
    }
    out += "\n";
    out += "step_budget = " + std::to_string(c.step_budget) + "\n";

    out += "\n[verify]\n";
    out += "sigma_list = ";
    for (std::size_t i = 0; i < c.sigma_list.size(); ++i) {
        if (i) out += ", ";
        out += fmt(c.sigma_list[i]);
    }
    out += "\n";
    out += "n_fields = " + std::to_string(c.n_fields) + "\n";
    out += "c_inf = " + fmt(c.c_inf) + "\n";
    out += "tol = " + fmt(c.tol) + "\n";

    out += "\n[particles]\n";
    out += "n = " + std::to_string(c.n_particles) + "\n";
    out += "dt = " + fmt(c.particle_dt) + "\n";
    out += "n_bins = " + std::to_string(c.n_bins) + "\n";
    return out;
}

SimParams ExperimentConfig::params() const {
    const double kt = kappa_rescaled ? kappa_in : kappa_in / m;
    const double st = sigma_rescaled ? sigma_in : sigma_in / m;
    return SimParams::from_rescaled(m, kt, st, epsilon);
}

Grid ExperimentConfig::grid() const {
    return nu_delta0 ? build_grid_delta0(n_theta, n_hermite)
                     : build_grid(n_theta, n_hermite, nu_nodes);
}

SolverConfig ExperimentConfig::solver() const {
    SolverConfig s;
    s.dt = dt;
    s.t_final = t_final;
    s.scheme = scheme_from_name(scheme);
    s.stride = stride;
    s.cfl_mode = cfl == "warn" ? CflMode::Warn : CflMode::Refuse;
    s.snapshot_times = snapshots;
    return s;
}

} // namespace ksfp
