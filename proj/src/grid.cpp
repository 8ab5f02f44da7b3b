#include "oqbm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oqbm/errors.hpp"

namespace oqbm {

void SpatialGrid::build() {
    if (!(L > 0.0)) throw std::invalid_argument("SpatialGrid: half-width must be positive");
    if (N < 16) throw std::invalid_argument("SpatialGrid: need at least 16 nodes");
    dx = 2.0 * L / static_cast<double>(N - 1);
    x.assign(N, 0.0);
    const double half = 0.5 * dx;
    for (std::size_t i = 0; i < N; ++i) {
        // 2i-(N-1) is an exact integer, so x[N-1-i] == -x[i] to the last bit.
        x[i] = static_cast<double>(2.0 * static_cast<double>(i) - static_cast<double>(N - 1)) * half;
    }
    x[0] = -L;
    x[N - 1] = L;
}

static void check_size(const SpatialGrid& g, const std::vector<double>& f, const char* op) {
    if (f.size() != g.N) throw std::invalid_argument(std::string(op) + ": field size does not match grid");
}

std::vector<double> d1(const SpatialGrid& g, const std::vector<double>& f) {
    check_size(g, f, "d1");
    const std::size_t n = g.N;
    const double inv2dx = 1.0 / (2.0 * g.dx);
    std::vector<double> out(n);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2dx;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2dx;
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2dx;
    return out;
}

std::vector<double> d2(const SpatialGrid& g, const std::vector<double>& f) {
    check_size(g, f, "d2");
    const std::size_t n = g.N;
    const double invdx2 = 1.0 / (g.dx * g.dx);
    std::vector<double> out(n);
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * invdx2;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * invdx2;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * invdx2;
    return out;
}

std::vector<double> drift(const SpatialGrid& g, const std::vector<double>& f) {
    check_size(g, f, "drift");
    std::vector<double> xf(g.N);
    for (std::size_t i = 0; i < g.N; ++i) xf[i] = g.x[i] * f[i];
    return d1(g, xf);
}

double integrate(const SpatialGrid& g, const std::vector<double>& f) {
    check_size(g, f, "integrate");
    double acc = 0.5 * (f[0] + f[g.N - 1]);
    for (std::size_t i = 1; i + 1 < g.N; ++i) acc += f[i];
    return acc * g.dx;
}

static SpatialGrid default_p_grid(double alpha, std::size_t np) {
    if (!(alpha > 0.0)) throw std::invalid_argument("PhaseGrid: alpha must be positive");
    // 8 sigma half-width keeps the Gaussian tail mass below 1e-10 (erfc(8/sqrt(2)) ~ 1e-15).
    const double pmax = std::max(8.0 * std::sqrt(alpha), 6.0);
    return SpatialGrid(pmax, np);
}

PhaseGrid::PhaseGrid(double alpha_, std::size_t np)
    : x(), p(default_p_grid(alpha_, np)), alpha(alpha_) {}

PhaseGrid::PhaseGrid(double alpha_, SpatialGrid x_, std::size_t np)
    : x(std::move(x_)), p(default_p_grid(alpha_, np)), alpha(alpha_) {}

PhaseGrid::PhaseGrid(double alpha_, SpatialGrid x_, SpatialGrid p_)
    : x(std::move(x_)), p(std::move(p_)), alpha(alpha_) {
    if (!(alpha > 0.0)) throw std::invalid_argument("PhaseGrid: alpha must be positive");
    if (p.L < 8.0 * std::sqrt(alpha))
        throw std::invalid_argument("PhaseGrid: p half-width must cover 8*sqrt(alpha)");
}

} // namespace oqbm
