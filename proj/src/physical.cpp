#include "oqbm/physical.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "oqbm/errors.hpp"
#include "oqbm/pv.hpp"

namespace oqbm {

void CoefficientSet::validate() const {
    std::ostringstream bad;
    auto req = [&](bool ok, const char* what) {
        if (!ok) bad << (bad.tellp() > 0 ? ", " : "") << what;
    };
    req(alpha_bar > 0.0, "alpha_bar must be > 0");
    req(beta_bar >= 0.0, "beta_bar must be >= 0");
    req(lambda2 >= 0.0, "lambda2 must be >= 0");
    req(lambda3 >= 0.0, "lambda3 must be >= 0");
    req(gamma_omega >= 0.0, "gamma_omega must be >= 0");
    req(std::isfinite(alpha_bar) && std::isfinite(beta_bar) && std::isfinite(beta1) &&
            std::isfinite(beta2) && std::isfinite(beta3) && std::isfinite(lambda1) &&
            std::isfinite(lambda2) && std::isfinite(lambda3) && std::isfinite(gamma_omega),
        "all coefficients must be finite");
    if (bad.tellp() > 0) throw std::invalid_argument("CoefficientSet: " + bad.str());
}

void PhysicalParams::validate() const {
    if (!(m > 0.0 && omega > 0.0 && Omega > 0.0 && gamma > 0.0 && Lambda > 0.0 && T > 0.0))
        throw std::invalid_argument("PhysicalParams: m, omega, Omega, gamma, Lambda, T must be positive");
    if (!(a0 >= 0.0)) throw std::invalid_argument("PhysicalParams: a0 must be >= 0");
}

double PhysicalParams::x0() const { return std::sqrt(1.0 / (2.0 * m * omega)); }
double PhysicalParams::p0() const { return std::sqrt(m * omega / 2.0); }
double PhysicalParams::alpha() const { return T / omega; }

double PhysicalParams::matsubara(int n) const {
    if (n < 1) throw std::invalid_argument("matsubara: index must be >= 1");
    return 2.0 * std::numbers::pi * n * T;
}

bool PhysicalParams::high_damping() const { return gamma / omega >= 10.0; }

bool PhysicalParams::high_temperature() const {
    return T / Lambda >= 10.0 && Lambda / omega >= 10.0;
}

double spectral_density(const PhysicalParams& p, double w) {
    if (w < 0.0) throw std::invalid_argument("spectral_density: negative frequency");
    const double L2 = p.Lambda * p.Lambda;
    return (2.0 * p.m * p.gamma / std::numbers::pi) * w * L2 / (L2 + w * w);
}

ThermalKernels thermal_kernels(const PhysicalParams& p, double tau) {
    if (!p.high_temperature())
        throw std::invalid_argument(
            "thermal_kernels: closed forms require k_B T / Lambda >= 10 and Lambda / omega >= 10");
    const double decay = std::exp(-p.Lambda * std::abs(tau));
    const double sgn = (tau > 0.0) - (tau < 0.0);
    return {2.0 * p.m * p.gamma * p.T * p.Lambda * decay,
            p.m * p.gamma * p.Lambda * p.Lambda * sgn * decay};
}

QhoCoefficients qho_coefficients(const PhysicalParams& p, bool limit) {
    const double mgT2 = 2.0 * p.m * p.gamma * p.T;
    const double mg = p.m * p.gamma;
    if (limit) {
        return {mgT2, mg * p.Lambda, mgT2 * p.omega / p.Lambda, mg * p.omega};
    }
    const double L2 = p.Lambda * p.Lambda;
    const double denom = L2 + p.omega * p.omega;
    return {mgT2 * L2 / denom,
            mg * L2 * p.Lambda / denom,
            mgT2 * p.Lambda * p.omega / denom,
            mg * L2 * p.omega / denom};
}

double bose_occupation(double w, double T) {
    if (!(w > 0.0 && T > 0.0)) throw std::invalid_argument("bose_occupation: need w > 0 and T > 0");
    return 1.0 / std::expm1(w / T);
}

namespace {

// Principal-value integrals over the spectral density run on [0, K*Lambda]
// with K doubled until the tail is negligible. The tail of J-weighted
// integrands decays like 1/K, so convergence is judged on the Richardson
// extrapolation of the doubling sequence, which removes that leading term.
double pv_with_tail(const PhysicalParams& p, const std::function<double(double)>& f) {
    double K = 20.0;
    double i0 = principal_value_integral(f, p.Omega, 0.0, K * p.Lambda).value;
    double i1 = principal_value_integral(f, p.Omega, 0.0, 2.0 * K * p.Lambda).value;
    double e_prev = 2.0 * i1 - i0;
    for (int it = 0; it < 16; ++it) {
        K *= 2.0;
        i0 = i1;
        i1 = principal_value_integral(f, p.Omega, 0.0, 2.0 * K * p.Lambda).value;
        const double e_next = 2.0 * i1 - i0;
        if (std::abs(e_next - e_prev) <= 1e-9 * (1.0 + std::abs(e_next))) return e_next;
        e_prev = e_next;
    }
    throw numerical_error("pv_with_tail: spectral tail not converging under domain doubling");
}

} // namespace

TwoLevelRates two_level_rates(const PhysicalParams& p) {
    p.validate();
    const double J = spectral_density(p, p.Omega);
    const double n = bose_occupation(p.Omega, p.T);
    const double G = 2.0 * std::numbers::pi * p.a0 * p.a0 * J;
    const double pv = pv_with_tail(p, [&](double w) {
        // J(w) (n(w) + 1/2) written through w n(w) = w / expm1(w/T), which
        // stays finite at the w = 0 endpoint (limit T).
        const double wn = w == 0.0 ? p.T : w / std::expm1(w / p.T);
        const double L2 = p.Lambda * p.Lambda;
        return (2.0 * p.m * p.gamma / std::numbers::pi) * L2 / (L2 + w * w) * (wn + 0.5 * w) /
               (w - p.Omega);
    });
    return {p.a0 * p.a0 * pv - 0.5 * p.Omega, G * (n + 1.0), G * n, G};
}

CrossRates cross_rates(const PhysicalParams& p) {
    p.validate();
    if (std::abs(p.Omega - p.omega) > 1e-12 * p.omega)
        std::cerr << "cross_rates: rotating-wave reduction assumes resonance Omega = omega "
                  << "(got Omega/omega = " << p.Omega / p.omega << ")\n";
    const double ax = p.a0 * p.x0();
    const double J = spectral_density(p, p.Omega);
    const double n = bose_occupation(p.Omega, p.T);
    const double twoPi = 2.0 * std::numbers::pi;
    const double pv = pv_with_tail(p, [&](double w) {
        return spectral_density(p, w) / (w - p.Omega);
    });
    return {twoPi * ax * J * n, twoPi * ax * J, ax * pv};
}

CoefficientSet coefficients_from_physical(const PhysicalParams& p) {
    p.validate();
    if (!p.high_damping())
        throw std::invalid_argument("coefficients_from_physical: requires gamma/omega >= 10");
    const TwoLevelRates tl = two_level_rates(p);
    const CrossRates cr = cross_rates(p);
    CoefficientSet c;
    c.alpha_bar = p.T * p.omega / (4.0 * p.gamma) / p.omega;
    c.beta_bar = p.omega * p.omega / (4.0 * p.gamma) / p.omega;
    c.beta1 = cr.beta1 / p.omega;
    c.beta2 = cr.beta2 / p.omega;
    c.beta3 = cr.beta3 / p.omega;
    c.lambda1 = tl.lambda1 / p.omega;
    c.lambda2 = tl.lambda2 / p.omega;
    c.lambda3 = tl.lambda3 / p.omega;
    c.gamma_omega = tl.gamma_omega / p.omega;
    c.validate();
    return c;
}

} // namespace oqbm
