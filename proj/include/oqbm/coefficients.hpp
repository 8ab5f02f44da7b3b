#pragma once

namespace oqbm {

// Rates of the hybrid master equation, in units of the trap frequency
// (hbar = k_B = 1). lambda1 and beta3 may be negative; the rest must satisfy
// the sign constraints checked by validate().
struct CoefficientSet {
    double alpha_bar = 0.0; // position diffusion, > 0
    double beta_bar = 0.0;  // confining drift, >= 0
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0; // emission rate, >= 0
    double lambda3 = 0.0; // absorption rate, >= 0
    double gamma_omega = 0.0; // two-level linewidth, >= 0

    void validate() const; // throws std::invalid_argument on violation
};

} // namespace oqbm
