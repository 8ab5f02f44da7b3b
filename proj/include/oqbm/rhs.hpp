#pragma once

#include <vector>

#include "oqbm/coefficients.hpp"
#include "oqbm/field.hpp"
#include "oqbm/observables.hpp"
#include "oqbm/scenario.hpp"

namespace oqbm {

struct CflReport {
    bool ok = false;
    double dt = 0.0;
    double dt_max = 0.0;          // min of the two bounds
    double diffusion_bound = 0.0; // 0.4 dx^2 / (2 alpha_bar)
    double rate_bound = 0.0;      // 0.4 / (beta_bar L / dx + rate_max)
    const char* binding = "";     // "diffusion" | "advection+rates" | "none"
};

// Explicit-step bound for the 1-D system: both the diffusive limit and the
// drift/local-rate limit must hold. rate_max is the largest row sum of
// zeroth-order couplings evaluated at |x| = L.
CflReport cfl_check(const CoefficientSet& c, const SpatialGrid& g, double dt);

// One right-hand-side evaluation of the four-field system. drift_sign exists
// solely so the self-check suite can corrupt the confining drift and watch
// the trace detector fire; production paths leave it +1.
void rhs(const WignerField& f, const CoefficientSet& c, WignerField& out,
         bool parallel = true, double drift_sign = 1.0);

// Classical RK4 step. Boundary nodes are re-pinned to zero afterwards and
// every value is checked finite; failure throws numerical_error carrying the
// simulation time.
void step_rk4(WignerField& f, const CoefficientSet& c, double dt,
              bool parallel = true, double drift_sign = 1.0);

struct Trajectory {
    std::vector<double> snapshot_times; // configured labels
    std::vector<WignerField> snapshots;
    TimeSeries series;
};

// Fixed-step integration to t_final with snapshots at the nearest step to
// each configured time. drift_sign as in rhs.
Trajectory evolve(const ScenarioConfig& cfg, double drift_sign = 1.0);

} // namespace oqbm
