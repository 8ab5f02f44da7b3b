#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oqbm/errors.hpp"
#include "oqbm/field.hpp"
#include "oqbm/observables.hpp"

using namespace oqbm;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("initial field: kind parsing") {
    CHECK(profile_kind_from_string("single") == ProfileKind::single);
    CHECK(profile_kind_from_string("double") == ProfileKind::double_center);
    CHECK_THROWS_AS(profile_kind_from_string("triple"), config_error);
    CHECK_THROWS_AS(profile_kind_from_string(""), config_error);
}

TEST_CASE("initial field: unit mass for every profile") {
    const SpatialGrid g;
    const InternalState s{pi / 6.0, pi / 4.0};
    for (ProfileKind kind : {ProfileKind::single, ProfileKind::double_center}) {
        for (double k : {2.0, 10.0}) {
            const WignerField f = initial_field(kind, k, s, g);
            CHECK(std::abs(integrate(g, f.wp) - 1.0) <= 1e-13);
        }
    }
}

TEST_CASE("initial field: Bloch weights scale the shared profile") {
    const SpatialGrid g(10.0, 256);
    const InternalState s{pi / 6.0, pi / 4.0};
    const WignerField f = initial_field(ProfileKind::single, 2.0, s, g);

    // wm/wp = cos(pi/3), cr/wp = sqrt(6)/8, ci/wp = -sqrt(6)/8.
    const double c2 = 0.5;
    const double cw = std::sqrt(6.0) / 8.0;
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(std::abs(f.wm[i] - c2 * f.wp[i]) <= 1e-15);
        CHECK(std::abs(f.cr[i] - cw * f.wp[i]) <= 1e-15);
        CHECK(std::abs(f.ci[i] + cw * f.wp[i]) <= 1e-15);
    }
    CHECK(std::abs(sigma_z_total(g, f) - 0.5) <= 1e-12);
    CHECK(std::abs(coherence_total(g, f) + cw) <= 1e-12);
}

TEST_CASE("initial field: polar angles hit the poles of the Bloch sphere") {
    const SpatialGrid g(10.0, 256);
    const WignerField up = initial_field(ProfileKind::single, 2.0, {0.0, 0.0}, g);
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(up.wm[i] == up.wp[i]);
        CHECK(up.cr[i] == 0.0);
        CHECK(up.ci[i] == 0.0);
    }

    const WignerField down = initial_field(ProfileKind::single, 2.0, {pi / 2.0, 0.3}, g);
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(down.wm[i] == -down.wp[i]);
        CHECK(std::abs(down.cr[i]) <= 1e-15);
        CHECK(std::abs(down.ci[i]) <= 1e-15);
    }
    CHECK(std::abs(sigma_z_total(g, down) + 1.0) <= 1e-12);

    // Equator: populations balance, coherence carries the phase.
    const WignerField eq = initial_field(ProfileKind::single, 2.0, {pi / 4.0, 0.0}, g);
    CHECK(std::abs(sigma_z_total(g, eq)) <= 1e-12);
    CHECK(std::abs(integrate(g, eq.cr) - 0.5) <= 1e-12);
}

TEST_CASE("initial field: theta is periodic under a half turn") {
    const SpatialGrid g(10.0, 128);
    const WignerField a = initial_field(ProfileKind::single, 2.0, {pi / 6.0, 0.2}, g);
    const WignerField b = initial_field(ProfileKind::single, 2.0, {pi / 6.0 + pi, 0.2}, g);
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(std::abs(a.wm[i] - b.wm[i]) <= 1e-14);
        CHECK(std::abs(a.cr[i] - b.cr[i]) <= 1e-14);
        CHECK(std::abs(a.ci[i] - b.ci[i]) <= 1e-14);
    }
}

TEST_CASE("initial field: profile variances") {
    const SpatialGrid g;
    const InternalState s{0.3, 0.0};

    const WignerField g2 = initial_field(ProfileKind::single, 2.0, s, g);
    CHECK(std::abs(variance(g, g2.wp) - 0.5) <= 1e-10);

    // Two unit-variance lobes at +-3: mixture variance 1/2 + 9.
    const WignerField d2 = initial_field(ProfileKind::double_center, 2.0, s, g);
    CHECK(std::abs(variance(g, d2.wp) - 9.5) <= 1e-8);

    // Flat-top exponent: Gamma(3/10) / Gamma(1/10).
    const WignerField g10 = initial_field(ProfileKind::single, 10.0, s, g);
    const double want = std::tgamma(0.3) / std::tgamma(0.1);
    CHECK(std::abs(variance(g, g10.wp) - want) <= 1e-9);

    // Mirror-symmetric profiles center at the origin.
    std::vector<double> xw(g.N);
    for (std::size_t i = 0; i < g.N; ++i) xw[i] = g.x[i] * d2.wp[i];
    CHECK(std::abs(integrate(g, xw)) <= 1e-12);
}

TEST_CASE("initial field: odd exponents fall back to |x|^k") {
    const SpatialGrid g(10.0, 256);
    const WignerField f = initial_field(ProfileKind::single, 3.0, {0.0, 0.0}, g);
    CHECK(std::abs(integrate(g, f.wp) - 1.0) <= 1e-13);
    // Symmetric by construction.
    for (std::size_t i = 0; i < g.N; ++i) CHECK(f.wp[i] == f.wp[g.N - 1 - i]);
}

TEST_CASE("initial field: input validation") {
    const SpatialGrid g(10.0, 64);
    CHECK_THROWS_AS(initial_field(ProfileKind::single, 0.0, {0.0, 0.0}, g),
                    std::invalid_argument);
    CHECK_THROWS_AS(initial_field(ProfileKind::single, -2.0, {0.0, 0.0}, g),
                    std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS(initial_field(ProfileKind::single, 2.0, {nan, 0.0}, g),
                    std::invalid_argument);
    CHECK_THROWS_AS(initial_field(ProfileKind::single, 2.0, {0.0, nan}, g),
                    std::invalid_argument);
}
