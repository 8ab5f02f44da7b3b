#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "oqbm/coefficients.hpp"
#include "oqbm/field.hpp"

namespace oqbm {

struct IntegratorConfig {
    double dt = 0.0;      // must pass cfl_check
    double t_final = 200.0;
    std::vector<double> snapshot_times = {0.0, 50.0, 100.0, 150.0, 200.0};
    std::size_t series_stride = 1; // record the series every this many steps
    bool parallel = true;          // serial path kept as reference
};

struct ScenarioConfig {
    std::string name = "scenario";
    CoefficientSet coefficients;
    ProfileKind kind = ProfileKind::single;
    double k = 2.0;
    InternalState state;
    double L = 20.0;
    std::size_t N = 1024;
    IntegratorConfig integrator;
    std::string out_dir; // empty: runner chooses

    void validate() const; // throws config_error / invalid_argument
};

} // namespace oqbm
