#pragma once

#include <array>
#include <vector>

#include "oqbm/coefficients.hpp"
#include "oqbm/field.hpp"
#include "oqbm/rhs.hpp"

namespace oqbm {

using Vec4 = std::array<double, 4>; // (x^n W+, x^n W-, x^n C_R, x^n C_I)
using Mat4 = std::array<std::array<double, 4>, 4>;

// Closed moment hierarchy dR_n/dt = M_n R_n + A_n R_{n-1} + B_n R_{n-2}
// + C R_{n+1}, truncated with R_{nmax+1} = 0.
struct MomentSystem {
    int nmax = 8;
    CoefficientSet c;
    std::vector<Mat4> M; // n = 0..nmax
    std::vector<Mat4> A;
    std::vector<double> B; // scalar alpha_bar n (n-1)
    Mat4 C{};

    std::size_t dim() const { return 4u * static_cast<std::size_t>(nmax + 1); }
    void apply(const std::vector<double>& r, std::vector<double>& out) const;
};

MomentSystem build_system(const CoefficientSet& c, int nmax); // nmax >= 2

// Moments of the Gaussian initial state exp(-x^2)/sqrt(pi) weighted by the
// Bloch angles; odd n vanish identically.
Vec4 initial_moments(int n, const InternalState& s);

// RK4 step bound 2.5 / sigma_max with sigma_max from power iteration on
// the Gram matrix of the flattened system (an upper bound on |lambda|_max).
double hierarchy_spectral_bound(const MomentSystem& sys);

struct MomentHistory {
    std::vector<double> t;
    // r[sample][order] = Vec4 at that order
    std::vector<std::vector<Vec4>> r;
    double dt = 0.0;
};

// Fixed-step RK4 on the truncated hierarchy. dt <= 0 picks 2.0 / sigma_max;
// an explicit dt above the 2.5 / sigma_max bound or runaway growth aborts
// with a diagnostic. Samples are recorded every `stride` steps.
MomentHistory evolve_moments(const MomentSystem& sys, const InternalState& s,
                             double dt, double t_final, std::size_t stride = 1);

struct PdeMoments {
    std::vector<double> t;
    std::vector<Vec4> m;
};

// x^n quadrature of each field over trajectory snapshots. Rejects n for
// which x^n overflows at the domain edge.
PdeMoments moments_from_pde(const Trajectory& traj, int n);

} // namespace oqbm
