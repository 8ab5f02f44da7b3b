#include "oqbm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oqbm/config.hpp"
#include "oqbm/csv.hpp"
#include "oqbm/errors.hpp"
#include "oqbm/moments.hpp"
#include "oqbm/phase2d.hpp"
#include "oqbm/rhs.hpp"

namespace oqbm {

namespace {

namespace fs = std::filesystem;

std::string resolve_out_dir(const RunConfig& cfg, const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (!cfg.scenario.out_dir.empty()) return cfg.scenario.out_dir;
    return "out/" + cfg.scenario.name;
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw config_error("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

struct WallClock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

} // namespace

void write_manifest(const std::string& path, const RunManifest& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.config_hash));
    out << "scenario = " << m.scenario << "\n";
    out << "config_hash = " << hash << "\n";
    out << "version = " << m.version << "\n";
    out << "wall_time_s = " << format_g17(m.wall_time_s) << "\n";
    for (const std::string& f : m.outputs) out << "output = " << f << "\n";
}

RunManifest run(const std::string& config_path, const std::string& out_dir, double dt_override,
                std::size_t grid_n_override) {
    WallClock clock;
    RunConfig cfg = parse_config_file(config_path);
    if (!cfg.has_grid)
        throw config_error("config '" + cfg.scenario.name +
                           "': a transport run needs a [grid] section");
    if (dt_override > 0.0) cfg.scenario.integrator.dt = dt_override;
    if (grid_n_override > 0) cfg.scenario.N = grid_n_override;

    const fs::path dir = prepare_dir(resolve_out_dir(cfg, out_dir));
    const Trajectory traj = evolve(cfg.scenario);

    RunManifest m;
    m.scenario = cfg.scenario.name;
    m.config_hash = config_hash(cfg);

    std::vector<DiagnosticsRow> diag;
    const SpatialGrid& g = traj.snapshots.front().grid;
    for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
        const std::string name = snapshot_filename(traj.snapshot_times[j]);
        write_snapshot_csv((dir / name).string(), traj.snapshots[j]);
        m.outputs.push_back(name);
        DiagnosticsRow row;
        row.t = traj.snapshot_times[j];
        row.peaks = peak_census(g, traj.snapshots[j].wp).size();
        row.gaussian_residual = gaussian_residual(g, traj.snapshots[j].wp).residual;
        diag.push_back(row);
    }
    write_series_csv((dir / "series.csv").string(), traj.series);
    m.outputs.push_back("series.csv");
    write_diagnostics_csv((dir / "diagnostics.csv").string(), diag);
    m.outputs.push_back("diagnostics.csv");

    m.wall_time_s = clock.seconds();
    write_manifest((dir / "manifest.txt").string(), m);
    return m;
}

RunManifest moments_run(const std::string& config_path, int nmax_override,
                        const std::string& out_dir, double dt_override) {
    WallClock clock;
    RunConfig cfg = parse_config_file(config_path);
    const int nmax = nmax_override > 0 ? nmax_override : cfg.nmax;
    cfg.scenario.coefficients.validate();
    const MomentSystem sys = build_system(cfg.scenario.coefficients, nmax);
    const MomentHistory hist =
        evolve_moments(sys, cfg.scenario.state, dt_override, cfg.scenario.integrator.t_final,
                       cfg.scenario.integrator.series_stride);

    const fs::path dir = prepare_dir(resolve_out_dir(cfg, out_dir));
    RunManifest m;
    m.scenario = cfg.scenario.name;
    m.config_hash = config_hash(cfg);

    const int top = std::min(4, nmax);
    for (int n = 0; n <= top; ++n) {
        std::vector<Vec4> rows;
        rows.reserve(hist.t.size());
        for (const std::vector<Vec4>& sample : hist.r)
            rows.push_back(sample[static_cast<std::size_t>(n)]);
        char name[48];
        std::snprintf(name, sizeof name, "moments_n%d.csv", n);
        write_moments_csv((dir / name).string(), hist.t, rows);
        m.outputs.push_back(name);
    }

    // Transport cross-check on the snapshot schedule when a grid is given.
    if (cfg.has_grid) {
        ScenarioConfig sc = cfg.scenario;
        if (cfg.pde_dt > 0.0) sc.integrator.dt = cfg.pde_dt;
        const Trajectory traj = evolve(sc);
        for (int n = 0; n <= top; ++n) {
            const PdeMoments pm = moments_from_pde(traj, n);
            char name[48];
            std::snprintf(name, sizeof name, "moments_pde_n%d.csv", n);
            write_moments_csv((dir / name).string(), pm.t, pm.m);
            m.outputs.push_back(name);
        }
    }

    m.wall_time_s = clock.seconds();
    write_manifest((dir / "manifest.txt").string(), m);
    return m;
}

RunManifest phase_validate(const std::string& config_path, const std::vector<double>& gammas,
                           std::size_t grid_n_override, const std::string& out_dir) {
    WallClock clock;
    RunConfig cfg = parse_config_file(config_path);
    if (!cfg.has_elimination)
        throw config_error("config '" + cfg.scenario.name +
                           "': phase validation needs an [elimination] section");
    if (!cfg.has_grid)
        throw config_error("config '" + cfg.scenario.name +
                           "': phase validation needs a [grid] section");

    ElimSettings settings;
    settings.base = cfg.scenario.coefficients;
    settings.alpha = cfg.elim_alpha;
    settings.kind = cfg.scenario.kind;
    settings.k = cfg.scenario.k;
    settings.state = cfg.scenario.state;
    settings.Lx = cfg.scenario.L;
    settings.Nx = grid_n_override > 0 ? grid_n_override : cfg.scenario.N;
    settings.Np = cfg.elim_np;
    settings.t_end = cfg.elim_t_end;
    settings.sample_times = cfg.elim_samples;

    const std::vector<ElimRow> rows =
        validate_elimination(settings, gammas, cfg.scenario.integrator.parallel);

    const fs::path dir = prepare_dir(resolve_out_dir(cfg, out_dir));
    RunManifest m;
    m.scenario = cfg.scenario.name;
    m.config_hash = config_hash(cfg);
    write_elimination_csv((dir / "elimination_report.csv").string(), rows);
    m.outputs.push_back("elimination_report.csv");

    m.wall_time_s = clock.seconds();
    write_manifest((dir / "manifest.txt").string(), m);
    return m;
}

} // namespace oqbm
