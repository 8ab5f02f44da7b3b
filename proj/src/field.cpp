#include "oqbm/field.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "oqbm/errors.hpp"

namespace oqbm {

ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "single") return ProfileKind::single;
    if (s == "double") return ProfileKind::double_center;
    throw config_error("initial profile kind must be 'single' or 'double', got '" + s + "'");
}

namespace {

bool is_positive_even_integer(double k) {
    const double r = std::round(k);
    return r >= 2.0 && std::abs(k - r) <= 1e-12 && std::fmod(r, 2.0) == 0.0;
}

} // namespace

WignerField initial_field(ProfileKind kind, double k, const InternalState& s,
                          const SpatialGrid& g) {
    if (!(k > 0.0)) throw std::invalid_argument("initial_field: profile exponent must be positive");
    if (!std::isfinite(s.theta) || !std::isfinite(s.phi))
        throw std::invalid_argument("initial_field: Bloch angles must be finite");
    if (!is_positive_even_integer(k))
        std::cerr << "initial_field: exponent k = " << k
                  << " is not a positive even integer; using exp(-|x|^k)\n";

    WignerField f(g);
    // pow(|x|, k) equals x^k for even integer k and implements the |x|^k
    // substitution otherwise.
    if (kind == ProfileKind::single) {
        for (std::size_t i = 0; i < g.N; ++i)
            f.wp[i] = std::exp(-std::pow(std::abs(g.x[i]), k));
    } else {
        for (std::size_t i = 0; i < g.N; ++i)
            f.wp[i] = std::exp(-std::pow(std::abs(g.x[i] + 3.0), k)) +
                      std::exp(-std::pow(std::abs(g.x[i] - 3.0), k));
    }
    const double norm = integrate(g, f.wp);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw numerical_error("initial_field: profile has no mass on the grid");

    // The state depends on theta only through cos(2 theta) and sin(2 theta)
    // with theta -> theta + pi leaving both unchanged, so theta is folded
    // into [0, pi) exactly.
    const double pi = std::acos(-1.0);
    double th = std::fmod(s.theta, pi);
    if (th < 0.0) th += pi;
    const double c2 = std::cos(2.0 * th);
    const double sr = 0.5 * std::sin(2.0 * th) * std::cos(s.phi);
    const double si = -0.5 * std::sin(2.0 * th) * std::sin(s.phi);
    for (std::size_t i = 0; i < g.N; ++i) {
        const double w = f.wp[i] / norm;
        f.wp[i] = w;
        f.wm[i] = c2 * w;
        f.cr[i] = sr * w;
        f.ci[i] = si * w;
    }
    return f;
}

} // namespace oqbm
