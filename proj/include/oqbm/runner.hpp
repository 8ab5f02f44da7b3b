#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oqbm {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
    std::string scenario;
    std::uint64_t config_hash = 0;
    std::string version = kVersion;
    double wall_time_s = 0.0;
    std::vector<std::string> outputs; // file names relative to the run directory
};

void write_manifest(const std::string& path, const RunManifest& m);

// Full transport run: snapshots, time series, per-snapshot diagnostics,
// manifest. Overrides <= 0 (or empty) fall back to the config values; the
// default output directory is out/<config stem>.
RunManifest run(const std::string& config_path, const std::string& out_dir = "",
                double dt_override = 0.0, std::size_t grid_n_override = 0);

// Truncated-hierarchy run; writes moments_n{n}.csv for n <= min(4, nmax) and,
// when the config carries a grid section, the transport cross-check columns
// moments_pde_n{n}.csv on the snapshot times.
RunManifest moments_run(const std::string& config_path, int nmax_override = 0,
                        const std::string& out_dir = "", double dt_override = 0.0);

// Adiabatic-elimination study driven by the config's [elimination] section;
// writes elimination_report.csv.
RunManifest phase_validate(const std::string& config_path, const std::vector<double>& gammas,
                           std::size_t grid_n_override = 0, const std::string& out_dir = "");

// Invariant self-checks at reduced resolution; prints an aligned residual
// table and returns the number of failed checks.
int run_suite(bool parallel = true);

} // namespace oqbm
