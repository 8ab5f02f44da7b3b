#include "oqbm/rhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oqbm/errors.hpp"

namespace oqbm {

void ScenarioConfig::validate() const {
    coefficients.validate();
    if (!(k > 0.0)) throw config_error("scenario '" + name + "': profile exponent k must be positive");
    if (!(L > 0.0)) throw config_error("scenario '" + name + "': grid half-width must be positive");
    if (N < 16) throw config_error("scenario '" + name + "': grid needs at least 16 nodes");
    if (integrator.t_final < 0.0)
        throw config_error("scenario '" + name + "': t_final must be >= 0");
    if (integrator.t_final > 0.0 && !(integrator.dt > 0.0))
        throw config_error("scenario '" + name + "': dt must be positive");
    if (integrator.series_stride < 1)
        throw config_error("scenario '" + name + "': series stride must be >= 1");
    if (integrator.t_final > 0.0)
        for (double ts : integrator.snapshot_times)
            if (ts < -1e-12 || ts > integrator.t_final + 1e-9)
                throw config_error("scenario '" + name + "': snapshot times must lie in [0, t_final]");
}

CflReport cfl_check(const CoefficientSet& c, const SpatialGrid& g, double dt) {
    c.validate();
    const double inf = std::numeric_limits<double>::infinity();
    const double s = 0.4;
    const double diff = c.alpha_bar > 0.0 ? s * g.dx * g.dx / (2.0 * c.alpha_bar) : inf;

    // Largest row sum of zeroth-order couplings, taken at |x| = L.
    const double L = g.L;
    const double row_wm = std::abs(c.gamma_omega) + std::abs(2.0 * c.lambda3 + c.gamma_omega) +
                          std::abs(c.beta2) * L + 2.0 * std::abs(c.beta3) * L;
    const double row_cr = 0.5 * (c.lambda2 + c.lambda3) + 0.25 * std::abs(c.beta2) * L;
    const double row_ci = 0.5 * std::abs(4.0 * c.lambda1 - c.lambda2 - c.lambda3) +
                          0.5 * std::abs(c.beta3) * L;
    const double rate_max = std::max({row_wm, row_cr, row_ci});
    const double denom = c.beta_bar * L / g.dx + rate_max;
    const double rate = denom > 0.0 ? s / denom : inf;

    CflReport rep;
    rep.dt = dt;
    rep.diffusion_bound = diff;
    rep.rate_bound = rate;
    rep.dt_max = std::min(diff, rate);
    rep.binding = rep.dt_max == inf ? "none" : (diff <= rate ? "diffusion" : "advection+rates");
    rep.ok = dt > 0.0 && dt <= rep.dt_max;
    return rep;
}

namespace {

// Per-node stencils mirroring the grid module's expression trees exactly, so
// rhs agrees bit-for-bit with a composition of d1/d2/drift (the library is
// compiled with contraction off).
inline double node_d1(const double* f, std::size_t i, std::size_t n, double inv2dx) {
    if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2dx;
    if (i == n - 1) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2dx;
    return (f[i + 1] - f[i - 1]) * inv2dx;
}

inline double node_d2(const double* f, std::size_t i, std::size_t n, double invdx2) {
    if (i == 0) return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * invdx2;
    if (i == n - 1)
        return (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * invdx2;
    return (f[i + 1] - 2.0 * f[i] + f[i - 1]) * invdx2;
}

inline double node_drift(const double* f, const double* x, std::size_t i, std::size_t n,
                         double inv2dx) {
    if (i == 0) return (-3.0 * (x[0] * f[0]) + 4.0 * (x[1] * f[1]) - x[2] * f[2]) * inv2dx;
    if (i == n - 1)
        return (3.0 * (x[n - 1] * f[n - 1]) - 4.0 * (x[n - 2] * f[n - 2]) + x[n - 3] * f[n - 3]) *
               inv2dx;
    return (x[i + 1] * f[i + 1] - x[i - 1] * f[i - 1]) * inv2dx;
}

} // namespace

void rhs(const WignerField& f, const CoefficientSet& c, WignerField& out,
         bool parallel, double drift_sign) {
    const std::size_t n = f.grid.N;
    if (out.grid.N != n) out = WignerField(f.grid);
    out.t = f.t;

    const double* wp = f.wp.data();
    const double* wm = f.wm.data();
    const double* cr = f.cr.data();
    const double* ci = f.ci.data();
    const double* x = f.grid.x.data();
    double* owp = out.wp.data();
    double* owm = out.wm.data();
    double* ocr = out.cr.data();
    double* oci = out.ci.data();

    const double inv2dx = 1.0 / (2.0 * f.grid.dx);
    const double invdx2 = 1.0 / (f.grid.dx * f.grid.dx);
    const double a = c.alpha_bar;
    const double b = drift_sign * c.beta_bar;
    const double half_b2 = 0.5 * c.beta2;
    const double b3 = c.beta3;
    const double two_b1_b2 = 2.0 * c.beta1 + c.beta2;
    const double q_b1_b2 = 0.25 * (2.0 * c.beta1 + c.beta2);
    const double b2_8 = c.beta2 / 8.0;
    const double b2_4 = 0.25 * c.beta2;
    const double b3_4 = 0.25 * c.beta3;
    const double b3_2 = 0.5 * c.beta3;
    const double two_b3 = 2.0 * c.beta3;
    const double b2 = c.beta2;
    const double r_wm = 2.0 * c.lambda3 + c.gamma_omega;
    const double g_om = c.gamma_omega;
    const double r_cr = 0.5 * (c.lambda2 + c.lambda3);
    const double r_ci = 0.5 * (4.0 * c.lambda1 - c.lambda2 - c.lambda3);

    auto node = [=](std::size_t i) {
        const double d1cr = node_d1(cr, i, n, inv2dx);
        const double d1ci = node_d1(ci, i, n, inv2dx);
        const double d1wp = node_d1(wp, i, n, inv2dx);
        const double d1wm = node_d1(wm, i, n, inv2dx);
        const double xi = x[i];
        owp[i] = a * node_d2(wp, i, n, invdx2) + b * node_drift(wp, x, i, n, inv2dx) +
                 half_b2 * d1cr + b3 * d1ci;
        owm[i] = a * node_d2(wm, i, n, invdx2) + b * node_drift(wm, x, i, n, inv2dx) -
                 two_b1_b2 * d1cr - b2 * (xi * cr[i]) + two_b3 * (xi * ci[i]) -
                 r_wm * wm[i] - g_om * wp[i];
        ocr[i] = a * node_d2(cr, i, n, invdx2) + b * node_drift(cr, x, i, n, inv2dx) +
                 q_b1_b2 * d1wm + b2_8 * d1wp + b2_4 * (xi * wm[i]) - r_cr * cr[i];
        oci[i] = a * node_d2(ci, i, n, invdx2) + b * node_drift(ci, x, i, n, inv2dx) +
                 b3_4 * d1wp - b3_2 * (xi * wm[i]) + r_ci * ci[i];
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            node(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) node(i);
    }
}

namespace {

struct StepWorkspace {
    WignerField k1, k2, k3, k4, tmp;
    explicit StepWorkspace(const SpatialGrid& g) : k1(g), k2(g), k3(g), k4(g), tmp(g) {}
};

inline void axpy_fields(const WignerField& f, double h, const WignerField& k, WignerField& out,
                        bool parallel) {
    const std::size_t n = f.grid.N;
    const double* src[4] = {f.wp.data(), f.wm.data(), f.cr.data(), f.ci.data()};
    const double* kk[4] = {k.wp.data(), k.wm.data(), k.cr.data(), k.ci.data()};
    double* dst[4] = {out.wp.data(), out.wm.data(), out.cr.data(), out.ci.data()};
    auto node = [=](std::size_t i) {
        for (int q = 0; q < 4; ++q) dst[q][i] = src[q][i] + h * kk[q][i];
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            node(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) node(i);
    }
}

void step_rk4_ws(WignerField& f, const CoefficientSet& c, double dt, StepWorkspace& ws,
                 bool parallel, double drift_sign) {
    rhs(f, c, ws.k1, parallel, drift_sign);
    axpy_fields(f, 0.5 * dt, ws.k1, ws.tmp, parallel);
    rhs(ws.tmp, c, ws.k2, parallel, drift_sign);
    axpy_fields(f, 0.5 * dt, ws.k2, ws.tmp, parallel);
    rhs(ws.tmp, c, ws.k3, parallel, drift_sign);
    axpy_fields(f, dt, ws.k3, ws.tmp, parallel);
    rhs(ws.tmp, c, ws.k4, parallel, drift_sign);

    const std::size_t n = f.grid.N;
    const double h6 = dt / 6.0;
    double* dst[4] = {f.wp.data(), f.wm.data(), f.cr.data(), f.ci.data()};
    const double* k1[4] = {ws.k1.wp.data(), ws.k1.wm.data(), ws.k1.cr.data(), ws.k1.ci.data()};
    const double* k2[4] = {ws.k2.wp.data(), ws.k2.wm.data(), ws.k2.cr.data(), ws.k2.ci.data()};
    const double* k3[4] = {ws.k3.wp.data(), ws.k3.wm.data(), ws.k3.cr.data(), ws.k3.ci.data()};
    const double* k4[4] = {ws.k4.wp.data(), ws.k4.wm.data(), ws.k4.cr.data(), ws.k4.ci.data()};
    auto node = [=](std::size_t i) {
        for (int q = 0; q < 4; ++q)
            dst[q][i] += h6 * (k1[q][i] + 2.0 * k2[q][i] + 2.0 * k3[q][i] + k4[q][i]);
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            node(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) node(i);
    }

    // Dirichlet pin: mass reaching the artificial boundary is clamped out.
    for (int q = 0; q < 4; ++q) {
        dst[q][0] = 0.0;
        dst[q][n - 1] = 0.0;
    }
    f.t += dt;

    for (int q = 0; q < 4; ++q) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(dst[q][i])) {
                std::ostringstream msg;
                msg << "step_rk4: non-finite value in field " << q << " at node " << i
                    << ", t = " << f.t;
                throw numerical_error(msg.str());
            }
        }
    }
}

} // namespace

void step_rk4(WignerField& f, const CoefficientSet& c, double dt, bool parallel,
              double drift_sign) {
    StepWorkspace ws(f.grid);
    step_rk4_ws(f, c, dt, ws, parallel, drift_sign);
}

Trajectory evolve(const ScenarioConfig& cfg, double drift_sign) {
    cfg.validate();
    const CoefficientSet& c = cfg.coefficients;
    SpatialGrid g(cfg.L, cfg.N);
    WignerField f = initial_field(cfg.kind, cfg.k, cfg.state, g);

    Trajectory traj;
    const double dt = cfg.integrator.dt;
    const double t_final = cfg.integrator.t_final;

    long long nsteps = 0;
    if (t_final > 0.0) {
        const CflReport rep = cfl_check(c, g, dt);
        if (!rep.ok) {
            std::ostringstream msg;
            msg << "evolve: dt = " << dt << " violates the step bound " << rep.dt_max
                << " (diffusion " << rep.diffusion_bound << ", advection+rates "
                << rep.rate_bound << ", binding " << rep.binding << ")";
            throw numerical_error(msg.str());
        }
        nsteps = static_cast<long long>(std::ceil(t_final / dt - 1e-9));
    }

    // Snapshots land on the nearest step to each configured time; a zero-length
    // run collapses to the single t = 0 snapshot.
    const std::vector<double> labels =
        t_final > 0.0 ? cfg.integrator.snapshot_times : std::vector<double>{0.0};
    std::vector<long long> snap_steps;
    for (double ts : labels) snap_steps.push_back(t_final > 0.0 ? std::llround(ts / dt) : 0);

    auto capture = [&](long long k) {
        for (std::size_t j = 0; j < snap_steps.size(); ++j) {
            if (snap_steps[j] == k) {
                traj.snapshots.push_back(f);
                traj.snapshot_times.push_back(labels[j]);
            }
        }
    };
    auto record = [&](long long k) {
        traj.series.t.push_back(f.t);
        traj.series.norm.push_back(integrate(g, f.wp));
        traj.series.mean_x.push_back([&] {
            std::vector<double> xw(g.N);
            for (std::size_t i = 0; i < g.N; ++i) xw[i] = g.x[i] * f.wp[i];
            const double nrm = traj.series.norm.back();
            return nrm != 0.0 ? integrate(g, xw) / nrm : 0.0;
        }());
        traj.series.variance.push_back(variance(g, f.wp));
        traj.series.ci_total.push_back(integrate(g, f.ci));
        traj.series.sigma_z.push_back(integrate(g, f.wm));
        (void)k;
    };

    capture(0);
    record(0);
    StepWorkspace ws(g);
    for (long long k = 1; k <= nsteps; ++k) {
        step_rk4_ws(f, c, dt, ws, cfg.integrator.parallel, drift_sign);
        f.t = static_cast<double>(k) * dt;
        capture(k);
        if (k % static_cast<long long>(cfg.integrator.series_stride) == 0 || k == nsteps)
            record(k);
    }
    return traj;
}

} // namespace oqbm
