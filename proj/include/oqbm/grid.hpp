#pragma once

#include <cstddef>
#include <vector>

namespace oqbm {

// Uniform grid on [-L, L]. Nodes are built mirror-symmetrically:
// x[N-1-i] == -x[i] exactly in floating point, x[0] == -L, x[N-1] == +L.
struct SpatialGrid {
    double L = 20.0;
    std::size_t N = 1024;
    double dx = 0.0;
    std::vector<double> x;

    SpatialGrid() { build(); }
    SpatialGrid(double half_width, std::size_t nodes) : L(half_width), N(nodes) { build(); }

    void build(); // validates L > 0, N >= 16
};

// First derivative: central interior, one-sided second-order at the ends.
std::vector<double> d1(const SpatialGrid& g, const std::vector<double>& f);

// Second derivative: 3-point interior, one-sided second-order at the ends.
std::vector<double> d2(const SpatialGrid& g, const std::vector<double>& f);

// d/dx (x * f), evaluated as d1 of the pointwise product.
std::vector<double> drift(const SpatialGrid& g, const std::vector<double>& f);

// Trapezoid rule over [-L, L]. Serial accumulation: byte-reproducible.
double integrate(const SpatialGrid& g, const std::vector<double>& f);

// Phase-space grid: x as above, p wide enough that the stationary Gaussian
// w_s(p) = (2*pi*alpha)^{-1/2} exp(-p^2/2alpha) has mass outside below 1e-10.
struct PhaseGrid {
    SpatialGrid x;
    SpatialGrid p;
    double alpha = 1.0;

    PhaseGrid() : PhaseGrid(1.0) {}
    explicit PhaseGrid(double alpha_, std::size_t np = 512);
    PhaseGrid(double alpha_, SpatialGrid x_, std::size_t np = 512);
    PhaseGrid(double alpha_, SpatialGrid x_, SpatialGrid p_);

    std::size_t nodes() const { return x.N * p.N; }
};

} // namespace oqbm
