#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksfp/diffusion.hpp"
#include "ksfp/field.hpp"
#include "ksfp/solver.hpp"

namespace ksfp {

// ---------------------------------------------------------------------------
// Hashing and files
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

void make_dirs(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// ---------------------------------------------------------------------------
// CSV emitters (%.17g throughout, so reruns are byte-identical)
// ---------------------------------------------------------------------------

// Columns t,mass,l2gamma_sq,I,A,E,N_err_sq; scale-separated trajectories
// append micro_err,l2_minv,dtheta_l2_minv.
std::string energy_csv(const Trajectory& traj);

// Columns eps,err_hminus1,micro_err.
std::string sweep_csv(const EpsSweepResult& r);

std::string two_column_csv(const std::string& x_name, const std::string& y_name,
                           const std::vector<double>& x,
                           const std::vector<double>& y);

// One coefficient per row: j,n,k,re,im.
std::string field_csv(const SpectralField& c);

// ---------------------------------------------------------------------------
// Snapshot files
// ---------------------------------------------------------------------------
// Binary layout, little-endian: int64 n_theta, n_hermite, n_nodes; float64
// sigma_t, kappa_t, m, time; then coefficients j-major, Hermite level, then
// ascending k, real/imaginary interleaved float64.

struct SnapshotMeta {
    double sigma_t = 0.0;
    double kappa_t = 0.0;
    double m = 0.0;
    double time = 0.0;
};

std::string snapshot_bytes(const SpectralField& c, const SnapshotMeta& meta);
void write_snapshot(const std::string& path, const SpectralField& c,
                    const SnapshotMeta& meta);

struct Snapshot {
    SpectralField field;
    SnapshotMeta meta;
};

Snapshot parse_snapshot(const std::string& bytes);
Snapshot read_snapshot(const std::string& path);

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

struct ManifestEntry {
    std::string name;
    std::string hash; // fnv1a64 of the file content, hex
};

struct Manifest {
    std::string tool_version;
    std::string config_hash;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<ManifestEntry> files;

    std::string text() const;
};

} // namespace ksfp
