#include "oqbm/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oqbm/errors.hpp"

namespace oqbm {

double variance(const SpatialGrid& g, const std::vector<double>& wp) {
    if (wp.size() != g.N) throw std::invalid_argument("variance: field size does not match grid");
    const double norm = integrate(g, wp);
    if (!(norm > 0.0)) throw numerical_error("variance: distribution has no mass");
    std::vector<double> tmp(g.N);
    for (std::size_t i = 0; i < g.N; ++i) tmp[i] = g.x[i] * wp[i];
    const double mean = integrate(g, tmp) / norm;
    for (std::size_t i = 0; i < g.N; ++i) {
        const double d = g.x[i] - mean;
        tmp[i] = d * d * wp[i];
    }
    return integrate(g, tmp) / norm;
}

double sigma_z_total(const SpatialGrid& g, const WignerField& f) { return integrate(g, f.wm); }

double coherence_total(const SpatialGrid& g, const WignerField& f) { return integrate(g, f.ci); }

std::vector<Peak> peak_census(const SpatialGrid& g, const std::vector<double>& f,
                              const PeakOptions& opt) {
    if (f.size() != g.N) throw std::invalid_argument("peak_census: field size does not match grid");
    const double fmax = *std::max_element(f.begin(), f.end());
    const double threshold = opt.abs_threshold >= 0.0 ? opt.abs_threshold
                                                      : opt.rel_threshold * fmax;
    const double min_sep = opt.min_sep >= 0.0 ? opt.min_sep : 10.0 * g.dx;

    std::vector<Peak> peaks;
    std::size_t i = 1;
    while (i + 1 < g.N) {
        if (f[i] <= f[i - 1]) {
            ++i;
            continue;
        }
        // Ascent into node i; extend across any flat run of equal values.
        std::size_t j = i;
        while (j + 1 < g.N && f[j + 1] == f[j]) ++j;
        if (j + 1 < g.N && f[j + 1] < f[j] && f[i] >= threshold) {
            const std::size_t mid = (i + j) / 2;
            peaks.push_back({g.x[mid], f[mid], mid});
        }
        i = j + 1;
    }

    // Merge peaks closer than min_sep, keeping the higher of each pair.
    bool merged = true;
    while (merged && peaks.size() > 1) {
        merged = false;
        for (std::size_t k = 0; k + 1 < peaks.size(); ++k) {
            if (peaks[k + 1].x - peaks[k].x < min_sep) {
                peaks.erase(peaks.begin() +
                            static_cast<std::ptrdiff_t>(peaks[k + 1].height > peaks[k].height ? k : k + 1));
                merged = true;
                break;
            }
        }
    }
    return peaks;
}

std::vector<std::size_t> lobe_splits(const SpatialGrid& g, const std::vector<double>& f,
                                     const std::vector<Peak>& peaks) {
    (void)g;
    std::vector<std::size_t> splits;
    for (std::size_t k = 0; k + 1 < peaks.size(); ++k) {
        std::size_t lo = peaks[k].index, hi = peaks[k + 1].index, best = lo;
        for (std::size_t i = lo; i <= hi; ++i)
            if (f[i] < f[best]) best = i;
        splits.push_back(best);
    }
    return splits;
}

namespace {

struct FitData {
    const double* x;
    const double* y;
    std::size_t n;
};

double ssr(const FitData& d, double A, double mu, double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        const double z = (d.x[i] - mu) / s;
        const double r = d.y[i] - A * std::exp(-0.5 * z * z);
        acc += r * r;
    }
    return acc;
}

bool solve3(double m[3][3], double b[3], double out[3]) {
    int piv[3] = {0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int best = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m[piv[r]][c]) > std::abs(m[piv[best]][c])) best = r;
        std::swap(piv[c], piv[best]);
        const double p = m[piv[c]][c];
        if (std::abs(p) < 1e-300) return false;
        for (int r = c + 1; r < 3; ++r) {
            const double f = m[piv[r]][c] / p;
            for (int k = c; k < 3; ++k) m[piv[r]][k] -= f * m[piv[c]][k];
            b[piv[r]] -= f * b[piv[c]];
        }
    }
    for (int c = 2; c >= 0; --c) {
        double acc = b[piv[c]];
        for (int k = c + 1; k < 3; ++k) acc -= m[piv[c]][k] * out[k];
        out[c] = acc / m[piv[c]][c];
    }
    return true;
}

} // namespace

GaussianFit gaussian_residual(const SpatialGrid& g, const std::vector<double>& f,
                              std::size_t i0, std::size_t i1) {
    if (f.size() != g.N || i1 >= g.N || i0 > i1 || i1 - i0 < 4)
        throw std::invalid_argument("gaussian_residual: bad node range");
    const std::size_t n = i1 - i0 + 1;
    FitData d{g.x.data() + i0, f.data() + i0, n};

    // Moment-based start: mean and standard deviation of the windowed mass.
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, ymax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::max(d.y[i], 0.0);
        m0 += w;
        m1 += w * d.x[i];
        ymax = std::max(ymax, d.y[i]);
    }
    if (!(m0 > 0.0) || !(ymax > 0.0))
        throw numerical_error("gaussian_residual: window carries no positive mass");
    const double mu0 = m1 / m0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::max(d.y[i], 0.0);
        m2 += w * (d.x[i] - mu0) * (d.x[i] - mu0);
    }
    double A = ymax, mu = mu0, s = std::max(std::sqrt(m2 / m0), 2.0 * g.dx);

    double cur = ssr(d, A, mu, s);
    for (int it = 0; it < 200; ++it) {
        // Gauss-Newton normal equations over (A, mu, s).
        double JtJ[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double Jtr[3] = {0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (d.x[i] - mu) / s;
            const double e = std::exp(-0.5 * z * z);
            const double r = d.y[i] - A * e;
            const double j0 = e;
            const double j1 = A * e * z / s;
            const double j2 = A * e * z * z / s;
            const double j[3] = {j0, j1, j2};
            for (int a = 0; a < 3; ++a) {
                Jtr[a] += j[a] * r;
                for (int b = 0; b < 3; ++b) JtJ[a][b] += j[a] * j[b];
            }
        }
        for (int a = 0; a < 3; ++a) JtJ[a][a] *= 1.0 + 1e-12;
        double step[3];
        if (!solve3(JtJ, Jtr, step)) break;
        double scale = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 25; ++ls) {
            const double An = A + scale * step[0];
            const double mn = mu + scale * step[1];
            const double sn = s + scale * step[2];
            if (sn > 1e-12 * g.dx) {
                const double next = ssr(d, An, mn, sn);
                if (next <= cur) {
                    const double gain = cur - next;
                    A = An;
                    mu = mn;
                    s = sn;
                    cur = next;
                    accepted = true;
                    if (gain <= 1e-14 * (cur + 1e-300)) it = 200;
                    break;
                }
            }
            scale *= 0.5;
        }
        if (!accepted) break;
    }

    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm2 += d.y[i] * d.y[i];
    GaussianFit fit;
    fit.amplitude = A;
    fit.mean = mu;
    fit.sigma = std::abs(s);
    fit.residual = norm2 > 0.0 ? std::sqrt(cur / norm2) : 0.0;
    return fit;
}

GaussianFit gaussian_residual(const SpatialGrid& g, const std::vector<double>& f) {
    return gaussian_residual(g, f, 0, g.N - 1);
}

double growth_exponent(const TimeSeries& s, double t0, double t1) {
    if (s.size() < 3 || s.t.empty() || s.t.front() != 0.0)
        throw std::invalid_argument("growth_exponent: series must start at t = 0");
    if (!(t0 > 0.0 && t1 > t0)) throw std::invalid_argument("growth_exponent: bad window");
    const double s2_0 = s.variance.front();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double t = s.t[i];
        if (t < t0 || t > t1) continue;
        const double gain = s.variance[i] - s2_0;
        if (!(gain > 0.0))
            throw numerical_error("growth_exponent: variance gain not positive inside window");
        const double lx = std::log(t);
        const double ly = std::log(gain);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("growth_exponent: window contains fewer than 2 samples");
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw numerical_error("growth_exponent: degenerate window");
    return (n * sxy - sx * sy) / denom;
}

} // namespace oqbm
