#pragma once

#include <cstddef>
#include <vector>

#include "oqbm/field.hpp"
#include "oqbm/grid.hpp"

namespace oqbm {

// Per-step diagnostics recorded by evolve.
struct TimeSeries {
    std::vector<double> t, norm, mean_x, variance, ci_total, sigma_z;
    std::size_t size() const { return t.size(); }
};

// Variance of the normalized position distribution P = W+ / int W+.
double variance(const SpatialGrid& g, const std::vector<double>& wp);

double sigma_z_total(const SpatialGrid& g, const WignerField& f);     // int W-
double coherence_total(const SpatialGrid& g, const WignerField& f);   // int C_I

struct Peak {
    double x = 0.0;
    double height = 0.0;
    std::size_t index = 0; // node index of the peak (run midpoint for plateaus)
};

struct PeakOptions {
    double rel_threshold = 1e-2; // height cut as a fraction of max(f)
    double abs_threshold = -1.0; // overrides rel_threshold when >= 0
    double min_sep = -1.0;       // merge radius; < 0 selects 10*dx
};

// Strict interior local maxima of f above the threshold; a run of equal
// values bounded by strictly smaller neighbors counts once, at its midpoint.
// Peaks closer than min_sep are merged, keeping the higher one.
std::vector<Peak> peak_census(const SpatialGrid& g, const std::vector<double>& f,
                              const PeakOptions& opt = {});

struct GaussianFit {
    double amplitude = 0.0;
    double mean = 0.0;
    double sigma = 0.0;
    double residual = 0.0; // L2 misfit / L2 norm of f on the fitted range
};

// Least-squares single-Gaussian fit of f over the full grid or a node range
// [i0, i1] inclusive.
GaussianFit gaussian_residual(const SpatialGrid& g, const std::vector<double>& f);
GaussianFit gaussian_residual(const SpatialGrid& g, const std::vector<double>& f,
                              std::size_t i0, std::size_t i1);

// Node indices of the minima separating adjacent peaks; empty for < 2 peaks.
std::vector<std::size_t> lobe_splits(const SpatialGrid& g, const std::vector<double>& f,
                                     const std::vector<Peak>& peaks);

// Log-log least-squares slope of sigma^2(t) - sigma^2(0) for samples with
// t inside [t0, t1]. Requires the series to start at t = 0 and the variance
// gain to be positive on the window.
double growth_exponent(const TimeSeries& s, double t0, double t1);

} // namespace oqbm
