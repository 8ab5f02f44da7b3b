#pragma once

#include <functional>

namespace oqbm {

struct PvResult {
    double value = 0.0;
    double error = 0.0; // extrapolation residual estimate
};

// Cauchy principal value of integral f over [a, b] with a simple pole at
// `pole` strictly inside (a, b). f is the full integrand including the pole
// factor. Symmetric exclusion windows of half-width eps, eps/2, eps/4 are
// removed and the sequence Richardson-extrapolated; a non-convergent
// extrapolation throws numerical_error carrying the residual sequence.
// eps0 <= 0 selects the default 1e-2 * (b - a), clamped below a quarter of
// the pole-to-endpoint distance.
PvResult principal_value_integral(const std::function<double(double)>& f,
                                  double pole, double a, double b,
                                  double eps0 = -1.0);

} // namespace oqbm
