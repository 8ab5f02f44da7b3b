#pragma once

#include <vector>

#include "oqbm/coefficients.hpp"

namespace oqbm {

// Physical inputs in a unit system with hbar = k_B = 1. Frequencies are
// absolute here; conversion to CoefficientSet rescales time by the trap
// frequency omega.
struct PhysicalParams {
    double m = 1.0;      // particle mass
    double omega = 1.0;  // trap frequency
    double Omega = 1.0;  // two-level splitting
    double gamma = 0.0;  // damping coefficient
    double Lambda = 0.0; // spectral cutoff
    double T = 0.0;      // bath temperature
    double a0 = 0.0;     // dimensionless qubit-bath coupling

    void validate() const;

    double x0() const;                  // oscillator length sqrt(1/(2 m omega))
    double p0() const;                  // sqrt(m omega / 2)
    double alpha() const;               // k_B T / (hbar omega)
    double matsubara(int n) const;      // 2 pi n k_B T / hbar, n >= 1
    bool high_damping() const;          // gamma/omega >= 10
    bool high_temperature() const;      // T/Lambda >= 10 and Lambda/omega >= 10
};

// Ohmic spectral density with Lorentz-Drude cutoff:
// J(w) = (2 m gamma / pi) w Lambda^2 / (Lambda^2 + w^2). Rejects w < 0.
double spectral_density(const PhysicalParams& p, double w);

struct ThermalKernels {
    double nu = 0.0;  // noise kernel
    double eta = 0.0; // dissipation kernel
};

// High-temperature closed forms; requires the high_temperature() regime.
ThermalKernels thermal_kernels(const PhysicalParams& p, double tau);

struct QhoCoefficients {
    double Dx = 0.0, Cx = 0.0, Dp = 0.0, Cp = 0.0;
};

// Exact one-pole forms, or the large-cutoff limit when `limit` is set.
QhoCoefficients qho_coefficients(const PhysicalParams& p, bool limit);

// Planck occupation via expm1: accurate for w << T.
double bose_occupation(double w, double T);

struct TwoLevelRates {
    double lambda1 = 0.0; // Lamb-type shift from the principal-value integral
    double lambda2 = 0.0; // Gamma (n+1)
    double lambda3 = 0.0; // Gamma n
    double gamma_omega = 0.0; // spontaneous emission rate 2 pi a0^2 J(Omega)
};

TwoLevelRates two_level_rates(const PhysicalParams& p);

struct CrossRates {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
};

// Resonance Omega = omega is assumed by the rotating-wave reduction;
// off-resonant inputs produce a one-line stderr warning.
CrossRates cross_rates(const PhysicalParams& p);

// Full conversion into trap-frequency units. Requires high_damping();
// alpha_bar = k_B T omega / (4 gamma hbar), beta_bar = omega^2 / (4 gamma),
// every rate divided by omega.
CoefficientSet coefficients_from_physical(const PhysicalParams& p);

} // namespace oqbm
