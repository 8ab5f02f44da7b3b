#pragma once

#include <cstddef>
#include <vector>

#include "oqbm/coefficients.hpp"
#include "oqbm/field.hpp"
#include "oqbm/grid.hpp"
#include "oqbm/moments.hpp"

namespace oqbm {

// Two-dimensional phase-space state, four qubit components, row-major
// [ix * Np + ip].
struct PhaseSpaceField {
    PhaseGrid grid;
    double t = 0.0;
    std::vector<double> wp, wm, cr, ci;

    PhaseSpaceField() = default;
    explicit PhaseSpaceField(const PhaseGrid& g)
        : grid(g), wp(g.nodes(), 0.0), wm(g.nodes(), 0.0), cr(g.nodes(), 0.0),
          ci(g.nodes(), 0.0) {}
    std::size_t idx(std::size_t ix, std::size_t ip) const { return ix * grid.p.N + ip; }
};

// Real 4x4 representations of the qubit superoperators coupling the
// translational and internal degrees of freedom, in the component order
// (W+, W-, C_R, C_I).
struct MSuperOperators {
    Mat4 m1{}, m2{}, m3{}, m4{};
};

MSuperOperators expand_m_operators(const CoefficientSet& c);

// Qubit dissipator + Hamiltonian shift as a real 4x4 generator. The
// emission-absorption asymmetry fixes the population transfer rate at
// lambda2 - lambda3; no independent linewidth parameter survives here.
Mat4 two_level_generator(const CoefficientSet& c);

// Full 2-D generator at trap frequency omega = 1:
//   gamma_eff (alpha d2_p + d1_p p .) + (x/2) d1_p - (p/2) d1_x
//   + d1_p m1 + d1_x m2 + x m3 + p m4 + two_level_generator.
// alpha comes from the grid.
void rhs_2d(const PhaseSpaceField& f, const CoefficientSet& c, double gamma_eff,
            PhaseSpaceField& out, bool parallel = true);

// RK4 step with all four domain edges re-pinned to zero; non-finite values
// abort with the simulation time.
void step_rk4_2d(PhaseSpaceField& f, const CoefficientSet& c, double gamma_eff,
                 double dt, bool parallel = true);

double trace_2d(const PhaseSpaceField& f); // double trapezoid of W+

// Product state w_s(p) * (1-D initial field), trace 1 up to the p-tail.
PhaseSpaceField product_state(const PhaseGrid& g, ProfileKind kind, double k,
                              const InternalState& s);

// Stationary Gaussian of the momentum relaxation generator.
double stationary_weight(double alpha, double p);

// Relative residual || L1 P_n + n P_n ||_2 / || P_n ||_2 of the n-th
// eigenfunction on the given p-grid (alpha from the grid), n <= 6.
double hermite_eigencheck(int n, const PhaseGrid& g);

// P f = w_s(p) * (trapezoid over p of f), applied to all four components.
void projector_apply(const PhaseSpaceField& f, PhaseSpaceField& out);

// max over a small test-field basis of ||P(Pf) - Pf|| / ||Pf||.
double projector_idempotence_residual(const PhaseGrid& g);

// max over x-profile test fields of ||P L2 P f|| / ||P f||; the streaming
// generator maps the projected subspace to odd-in-p fields, so the exact
// value is zero.
double pl2p_check(const PhaseGrid& g);

struct ElimSettings {
    CoefficientSet base;    // beta/lambda rates shared by both models
    double alpha = 8.0;     // thermal width of the momentum Gaussian
    ProfileKind kind = ProfileKind::single;
    double k = 2.0;
    InternalState state;
    double Lx = 12.0;
    std::size_t Nx = 128;
    std::size_t Np = 48;
    double t_end = 20.0;
    std::vector<double> sample_times = {0.0, 2.0, 5.0, 10.0, 20.0};
};

struct ElimRow {
    double gamma_eff = 0.0;
    double t = 0.0;
    double l1 = 0.0;
};

// For each gamma_eff: evolve the 2-D model from the product state, evolve
// the 1-D model with alpha_bar = alpha/(4 gamma_eff), beta_bar =
// 1/(4 gamma_eff) on the same x-grid, and record the L1 distance of the
// position marginals of W+ at the sample times. A numerical failure retries
// once at half the step and aborts if it persists.
std::vector<ElimRow> validate_elimination(const ElimSettings& cfg,
                                          const std::vector<double>& gammas,
                                          bool parallel = true);

} // namespace oqbm
