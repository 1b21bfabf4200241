#include "ksfp/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "snapshot files assume a little-endian host");

namespace ksfp {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

void append_raw(std::string& out, const void* p, std::size_t len) {
    out.append(static_cast<const char*>(p), len);
}

void append_i64(std::string& out, std::int64_t v) { append_raw(out, &v, sizeof v); }
void append_f64(std::string& out, double v) { append_raw(out, &v, sizeof v); }

struct Reader {
    const std::string& bytes;
    std::size_t pos = 0;

    void take(void* p, std::size_t len) {
        if (pos + len > bytes.size())
            throw std::runtime_error("snapshot: truncated file");
        std::memcpy(p, bytes.data() + pos, len);
        pos += len;
    }
    std::int64_t i64() {
        std::int64_t v = 0;
        take(&v, sizeof v);
        return v;
    }
    double f64() {
        double v = 0.0;
        take(&v, sizeof v);
        return v;
    }
};

} // namespace

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

void make_dirs(const std::string& path) {
    if (path.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec)
        throw std::runtime_error("cannot create directory '" + path +
                                 "': " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

std::string energy_csv(const Trajectory& traj) {
    std::string out = "t,mass,l2gamma_sq,I,A,E,N_err_sq";
    if (traj.rescaled) out += ",micro_err,l2_minv,dtheta_l2_minv";
    out += "\n";
    for (const EnergySample& s : traj.samples) {
        out += fmt(s.t) + "," + fmt(s.mass) + "," + fmt(s.l2gamma_sq) + "," +
               fmt(s.i_f) + "," + fmt(s.a) + "," + fmt(s.e) + "," + fmt(s.n_err_sq);
        if (traj.rescaled)
            out += "," + fmt(s.micro_err) + "," + fmt(s.l2_minv) + "," +
                   fmt(s.dtheta_l2_minv);
        out += "\n";
    }
    return out;
}

std::string sweep_csv(const EpsSweepResult& r) {
    std::string out = "eps,err_hminus1,micro_err\n";
    for (std::size_t i = 0; i < r.eps_values.size(); ++i)
        out += fmt(r.eps_values[i]) + "," + fmt(r.errors_hminus1[i]) + "," +
               fmt(r.micro_errors[i]) + "\n";
    return out;
}

std::string two_column_csv(const std::string& x_name, const std::string& y_name,
                           const std::vector<double>& x,
                           const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("two_column_csv: column lengths differ");
    std::string out = x_name + "," + y_name + "\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out += fmt(x[i]) + "," + fmt(y[i]) + "\n";
    return out;
}

std::string field_csv(const SpectralField& c) {
    std::string out = "j,n,k,re,im\n";
    for (int j = 0; j < c.n_nodes; ++j)
        for (int n = 0; n <= c.n_hermite; ++n)
            for (int k = c.k_min(); k <= c.k_max(); ++k) {
                const cplx& z = c.at(j, n, k);
                out += std::to_string(j) + "," + std::to_string(n) + "," +
                       std::to_string(k) + "," + fmt(z.real()) + "," +
                       fmt(z.imag()) + "\n";
            }
    return out;
}

std::string snapshot_bytes(const SpectralField& c, const SnapshotMeta& meta) {
    std::string out;
    out.reserve(3 * 8 + 4 * 8 + c.data.size() * 16);
    append_i64(out, c.n_theta);
    append_i64(out, c.n_hermite);
    append_i64(out, c.n_nodes);
    append_f64(out, meta.sigma_t);
    append_f64(out, meta.kappa_t);
    append_f64(out, meta.m);
    append_f64(out, meta.time);
    for (int j = 0; j < c.n_nodes; ++j)
        for (int n = 0; n <= c.n_hermite; ++n)
            for (int k = c.k_min(); k <= c.k_max(); ++k) {
                const cplx& z = c.at(j, n, k);
                append_f64(out, z.real());
                append_f64(out, z.imag());
            }
    return out;
}

void write_snapshot(const std::string& path, const SpectralField& c,
                    const SnapshotMeta& meta) {
    write_text_file(path, snapshot_bytes(c, meta));
}

Snapshot parse_snapshot(const std::string& bytes) {
    Reader r{bytes};
    const std::int64_t n_theta = r.i64();
    const std::int64_t n_hermite = r.i64();
    const std::int64_t n_nodes = r.i64();
    if (n_theta < 4 || n_theta % 2 != 0 || n_hermite < 0 || n_nodes < 1 ||
        n_theta > 65536 || n_hermite > 65536 || n_nodes > 65536)
        throw std::runtime_error("snapshot: implausible header");
    Snapshot snap;
    snap.meta.sigma_t = r.f64();
    snap.meta.kappa_t = r.f64();
    snap.meta.m = r.f64();
    snap.meta.time = r.f64();
    snap.field = SpectralField(static_cast<int>(n_nodes), static_cast<int>(n_hermite),
                               static_cast<int>(n_theta));
    for (int j = 0; j < snap.field.n_nodes; ++j)
        for (int n = 0; n <= snap.field.n_hermite; ++n)
            for (int k = snap.field.k_min(); k <= snap.field.k_max(); ++k) {
                const double re = r.f64();
                const double im = r.f64();
                snap.field.at(j, n, k) = cplx{re, im};
            }
    if (r.pos != bytes.size())
        throw std::runtime_error("snapshot: trailing bytes after coefficients");
    return snap;
}

Snapshot read_snapshot(const std::string& path) {
    return parse_snapshot(read_text_file(path));
}

std::string Manifest::text() const {
    std::string out;
    out += "tool_version = " + tool_version + "\n";
    out += "config_hash = " + config_hash + "\n";
    out += "seed = " + std::to_string(seed) + "\n";
    out += "wall_seconds = " + fmt(wall_seconds) + "\n";
    for (const ManifestEntry& f : files)
        out += "file " + f.name + " " + f.hash + "\n";
    return out;
}

} // namespace ksfp
