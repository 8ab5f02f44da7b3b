#pragma once

#include <string>
#include <vector>

#include "oqbm/grid.hpp"

namespace oqbm {

// Qubit Bloch angles of the initial product state.
struct InternalState {
    double theta = 0.0; // [0, pi)
    double phi = 0.0;   // [0, 2 pi)
};

// Four-field decomposition of the hybrid state over the qubit basis:
// rho = (W+/2) I + (W-/2) sigma_z + C_R sigma_x - C_I sigma_y.
// Invariant after initial_field: integral of wp is 1 on the grid.
struct WignerField {
    SpatialGrid grid;
    double t = 0.0;
    std::vector<double> wp, wm, cr, ci;

    WignerField() = default;
    explicit WignerField(const SpatialGrid& g)
        : grid(g), wp(g.N, 0.0), wm(g.N, 0.0), cr(g.N, 0.0), ci(g.N, 0.0) {}
};

enum class ProfileKind { single, double_center };

ProfileKind profile_kind_from_string(const std::string& s); // "single" | "double"

// exp(-x^k) (or the two-center sum with centers at +-3), normalized on the
// grid, weighted by the Bloch angles:
//   wp = profile, wm = cos(2 theta) profile,
//   cr = (1/2) sin(2 theta) cos(phi) profile,
//   ci = -(1/2) sin(2 theta) sin(phi) profile.
// k must be positive; for k that is not a positive even integer the profile
// is read as exp(-|x|^k) and a one-line stderr notice flags the substitution.
WignerField initial_field(ProfileKind kind, double k, const InternalState& s,
                          const SpatialGrid& g);

} // namespace oqbm
