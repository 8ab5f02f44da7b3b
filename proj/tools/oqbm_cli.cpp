#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "oqbm/errors.hpp"
#include "oqbm/runner.hpp"

namespace {

std::vector<double> parse_schedule(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos
                                                                          : comma - pos);
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size() || !(v > 0.0))
            throw oqbm::config_error("--gamma-schedule entries must be positive numbers");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void report(const char* verb, const oqbm::RunManifest& m) {
    std::printf("%s %s: %zu outputs (%.2f s)\n", verb, m.scenario.c_str(), m.outputs.size(),
                m.wall_time_s);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid quantum-classical transport simulator"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 suite failure.\n"
               "OMP_NUM_THREADS is the only environment variable consulted.");

    std::string config, out_dir, schedule = "10,40,160";
    double dt = 0.0;
    std::size_t grid_n = 0;
    int nmax = 0;
    bool serial = false;

    CLI::App* c_run = app.add_subcommand("run", "Integrate a transport scenario, write CSVs");
    c_run->add_option("--config", config, "scenario config file")->required();
    c_run->add_option("--out", out_dir, "output directory (default out/<config stem>)");
    c_run->add_option("--dt", dt, "override the integrator step");
    c_run->add_option("--grid-n", grid_n, "override the grid node count");

    CLI::App* c_mom = app.add_subcommand("moments", "Integrate the truncated moment hierarchy");
    c_mom->add_option("--config", config, "scenario config file")->required();
    c_mom->add_option("--out", out_dir, "output directory");
    c_mom->add_option("--nmax", nmax, "override the truncation order (>= 2)");
    c_mom->add_option("--dt", dt, "override the hierarchy step (default: spectral bound)");

    CLI::App* c_phase = app.add_subcommand(
        "phase-validate", "Compare the full phase-space model against the reduced one");
    c_phase->add_option("--config", config, "config with an [elimination] section")->required();
    c_phase->add_option("--out", out_dir, "output directory");
    c_phase->add_option("--gamma-schedule", schedule, "comma list of gamma_eff values");
    c_phase->add_option("--grid-n", grid_n, "override the position node count");

    CLI::App* c_suite = app.add_subcommand("suite", "Run the invariant self-checks");
    c_suite->add_flag("--serial", serial, "run the checks on the serial kernels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_run->parsed()) {
            report("run", oqbm::run(config, out_dir, dt, grid_n));
        } else if (c_mom->parsed()) {
            report("moments", oqbm::moments_run(config, nmax, out_dir, dt));
        } else if (c_phase->parsed()) {
            report("phase-validate",
                   oqbm::phase_validate(config, parse_schedule(schedule), grid_n, out_dir));
        } else if (c_suite->parsed()) {
            return oqbm::run_suite(!serial) == 0 ? 0 : 4;
        }
    } catch (const oqbm::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const oqbm::numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
