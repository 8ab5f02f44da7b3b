#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "oqbm/grid.hpp"

using namespace oqbm;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("grid: nodes mirror to the last bit") {
    const SpatialGrid g; // default 20 x 1024
    REQUIRE(g.x.size() == g.N);
    CHECK(g.L == 20.0);
    CHECK(g.N == 1024);
    CHECK(g.x[0] == -20.0);
    CHECK(g.x[g.N - 1] == 20.0);
    CHECK(g.dx == 2.0 * g.L / static_cast<double>(g.N - 1));
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(g.x[g.N - 1 - i] == -g.x[i]); // bitwise mirror
        if (i > 0) CHECK(g.x[i] > g.x[i - 1]);
    }
    // Even node count: the origin falls between the two center nodes.
    CHECK(g.x[g.N / 2 - 1] == -0.5 * g.dx);
    CHECK(g.x[g.N / 2] == 0.5 * g.dx);
}

TEST_CASE("grid: constructor validation") {
    CHECK_THROWS_AS(SpatialGrid(0.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(SpatialGrid(-1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(SpatialGrid(1.0, 15), std::invalid_argument);
    CHECK_NOTHROW(SpatialGrid(1.0, 16));
}

TEST_CASE("grid: operators reject size mismatch") {
    const SpatialGrid g(5.0, 32);
    const std::vector<double> wrong(31, 0.0);
    CHECK_THROWS_AS(d1(g, wrong), std::invalid_argument);
    CHECK_THROWS_AS(d2(g, wrong), std::invalid_argument);
    CHECK_THROWS_AS(drift(g, wrong), std::invalid_argument);
    CHECK_THROWS_AS(integrate(g, wrong), std::invalid_argument);
}

TEST_CASE("grid: d1 is exact on quadratics including the one-sided ends") {
    const SpatialGrid g(5.0, 97);
    std::vector<double> f(g.N), want(g.N);
    for (std::size_t i = 0; i < g.N; ++i) {
        const double x = g.x[i];
        f[i] = 3.0 * x * x - 2.0 * x + 1.0;
        want[i] = 6.0 * x - 2.0;
    }
    CHECK(max_abs_diff(d1(g, f), want) <= 1e-9);
}

TEST_CASE("grid: d2 is exact on cubics including the one-sided ends") {
    const SpatialGrid g(5.0, 97);
    std::vector<double> f(g.N), want(g.N);
    for (std::size_t i = 0; i < g.N; ++i) {
        const double x = g.x[i];
        f[i] = x * x * x;
        want[i] = 6.0 * x;
    }
    CHECK(max_abs_diff(d2(g, f), want) <= 1e-9);
}

TEST_CASE("grid: d2 second-order accuracy on sin") {
    const SpatialGrid g(std::numbers::pi, 401);
    std::vector<double> f(g.N), want(g.N);
    for (std::size_t i = 0; i < g.N; ++i) {
        f[i] = std::sin(g.x[i]);
        want[i] = -std::sin(g.x[i]);
    }
    CHECK(max_abs_diff(d2(g, f), want) <= 1e-4);
}

TEST_CASE("grid: drift equals d1 of the pointwise product") {
    const SpatialGrid g(2.0, 64);
    std::vector<double> f(g.N), xf(g.N), want(g.N);
    for (std::size_t i = 0; i < g.N; ++i) {
        f[i] = std::exp(-g.x[i] * g.x[i]);
        xf[i] = g.x[i] * f[i];
    }
    const std::vector<double> a = drift(g, f);
    const std::vector<double> b = d1(g, xf);
    for (std::size_t i = 0; i < g.N; ++i) CHECK(a[i] == b[i]);

    // Linear field: x*f is quadratic, so the result is exact.
    for (std::size_t i = 0; i < g.N; ++i) {
        f[i] = g.x[i];
        want[i] = 2.0 * g.x[i];
    }
    CHECK(max_abs_diff(drift(g, f), want) <= 1e-10);
}

TEST_CASE("grid: trapezoid integrates a Gaussian to sqrt(pi)") {
    const SpatialGrid g(10.0, 1001);
    std::vector<double> f(g.N);
    for (std::size_t i = 0; i < g.N; ++i) f[i] = std::exp(-g.x[i] * g.x[i]);
    CHECK(std::abs(integrate(g, f) - std::sqrt(std::numbers::pi)) <= 1e-8);
}

TEST_CASE("grid: trapezoid is exact on affine fields") {
    const SpatialGrid g(7.0, 64);
    std::vector<double> f(g.N);
    for (std::size_t i = 0; i < g.N; ++i) f[i] = 2.0 + 3.0 * g.x[i];
    CHECK(std::abs(integrate(g, f) - 28.0) <= 1e-12 * 28.0);
}

TEST_CASE("phase grid: default momentum half-width covers the thermal tail") {
    const PhaseGrid a(4.0);
    CHECK(a.p.L == 16.0); // 8 sigma
    CHECK(a.p.N == 512); // keeps relaxation-eigenfunction residuals below 1e-3

    CHECK(a.x.N == 1024);
    CHECK(a.nodes() == a.x.N * a.p.N);

    const PhaseGrid floor(0.1);
    CHECK(floor.p.L == 6.0); // floor for narrow thermal states

    // Stationary Gaussian mass on the default grid stays unit to 1e-10.
    const PhaseGrid pg(1.0);
    std::vector<double> ws(pg.p.N);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * pg.alpha);
    for (std::size_t i = 0; i < pg.p.N; ++i)
        ws[i] = norm * std::exp(-pg.p.x[i] * pg.p.x[i] / (2.0 * pg.alpha));
    CHECK(std::abs(integrate(pg.p, ws) - 1.0) <= 1e-10);
}

TEST_CASE("phase grid: validation") {
    CHECK_THROWS_AS(PhaseGrid(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGrid(-2.0), std::invalid_argument);
    // Explicit p grid must still cover 8 sigma.
    CHECK_THROWS_AS(PhaseGrid(4.0, SpatialGrid(5.0, 32), SpatialGrid(10.0, 32)),
                    std::invalid_argument);
    CHECK_NOTHROW(PhaseGrid(4.0, SpatialGrid(5.0, 32), SpatialGrid(16.0, 32)));
}
