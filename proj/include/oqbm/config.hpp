#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oqbm/scenario.hpp"

namespace oqbm {

// Parsed run description. The scenario covers the transport model; the extra
// fields carry the moment-hierarchy and elimination-study settings that have
// no place in ScenarioConfig.
struct RunConfig {
    ScenarioConfig scenario;
    bool has_grid = false; // [grid] present; moment runs use it for the cross-check
    double pde_dt = 0.0;   // cross-check step override, 0 = scenario dt
    int nmax = 8;          // hierarchy truncation order

    bool has_elimination = false;
    double elim_alpha = 8.0;
    double elim_t_end = 20.0;
    std::size_t elim_np = 48;
    std::vector<double> elim_samples = {0.0, 2.0, 5.0, 10.0, 20.0};
};

// Flat key-value text with '#' comments and [section] headers. Sections:
// coefficients, initial, grid, integrator, output, elimination. Unknown keys
// and malformed lines are reported with their line number; a missing required
// key is reported by name.
RunConfig parse_config_text(const std::string& text, const std::string& name);
RunConfig parse_config_file(const std::string& path); // name = file stem

// Canonical form: fixed section and key order, floats at 17 significant
// digits. parse(serialize(parse(text))) == parse(text).
std::string serialize_config(const RunConfig& cfg);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const RunConfig& cfg);

} // namespace oqbm
