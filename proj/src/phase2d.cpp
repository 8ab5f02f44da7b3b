#include "oqbm/phase2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "oqbm/errors.hpp"
#include "oqbm/rhs.hpp"

namespace oqbm {

MSuperOperators expand_m_operators(const CoefficientSet& c) {
    // Real 4x4 forms of the momentum- and position-coupling superoperators on
    // (W+, W-, C_R, C_I). Each is the expansion of a fixed combination of
    // commutators and anticommutators with sigma_x, sigma_y, sigma_+ acting on
    // rho = (W+/2) I + (W-/2) sigma_z + C_R sigma_x - C_I sigma_y.
    const double b1 = c.beta1, b2 = c.beta2, b3 = c.beta3;
    MSuperOperators m;
    m.m1[0][2] = -b3;
    m.m1[0][3] = 0.5 * b2;
    m.m1[1][3] = -(2.0 * b1 + b2);
    m.m1[2][0] = -0.25 * b3;
    m.m1[3][0] = b2 / 8.0;
    m.m1[3][1] = 0.5 * b1 + 0.25 * b2;

    m.m2[0][2] = 0.5 * b2;
    m.m2[0][3] = b3;
    m.m2[1][2] = -(2.0 * b1 + b2);
    m.m2[2][0] = b2 / 8.0;
    m.m2[2][1] = 0.5 * b1 + 0.25 * b2;
    m.m2[3][0] = 0.25 * b3;

    m.m3[1][2] = -b2;
    m.m3[1][3] = 2.0 * b3;
    m.m3[2][1] = 0.25 * b2;
    m.m3[3][1] = -0.5 * b3;

    m.m4[1][2] = -2.0 * b3;
    m.m4[1][3] = -b2;
    m.m4[2][1] = 0.5 * b3;
    m.m4[3][1] = 0.25 * b2;
    return m;
}

Mat4 two_level_generator(const CoefficientSet& c) {
    const double r = 0.5 * (c.lambda2 + c.lambda3);
    Mat4 g{};
    g[1][0] = c.lambda3 - c.lambda2;
    g[1][1] = -(c.lambda2 + c.lambda3);
    g[2][2] = -r;
    g[2][3] = -2.0 * c.lambda1;
    g[3][2] = 2.0 * c.lambda1;
    g[3][3] = -r;
    return g;
}

namespace {

// Per-node stencils mirroring the grid module's expression trees (library is
// compiled with contraction off, so serial and parallel agree bit for bit).
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

// Strided first derivative along x at fixed p; base points at column ip.
inline double node_d1_s(const double* base, std::size_t stride, std::size_t i, std::size_t n,
                        double inv2dx) {
    if (i == 0) return (-3.0 * base[0] + 4.0 * base[stride] - base[2 * stride]) * inv2dx;
    if (i == n - 1)
        return (3.0 * base[(n - 1) * stride] - 4.0 * base[(n - 2) * stride] +
                base[(n - 3) * stride]) *
               inv2dx;
    return (base[(i + 1) * stride] - base[(i - 1) * stride]) * inv2dx;
}

} // namespace

void rhs_2d(const PhaseSpaceField& f, const CoefficientSet& c, double gamma_eff,
            PhaseSpaceField& out, bool parallel) {
    const std::size_t nx = f.grid.x.N;
    const std::size_t np = f.grid.p.N;
    if (out.wp.size() != f.wp.size()) out = PhaseSpaceField(f.grid);
    out.t = f.t;

    const double* F[4] = {f.wp.data(), f.wm.data(), f.cr.data(), f.ci.data()};
    double* O[4] = {out.wp.data(), out.wm.data(), out.cr.data(), out.ci.data()};
    const double* xs = f.grid.x.x.data();
    const double* ps = f.grid.p.x.data();

    const double inv2dp = 1.0 / (2.0 * f.grid.p.dx);
    const double invdp2 = 1.0 / (f.grid.p.dx * f.grid.p.dx);
    const double inv2dx = 1.0 / (2.0 * f.grid.x.dx);
    const double ga = gamma_eff * f.grid.alpha;
    const double g = gamma_eff;

    const double b2_2 = 0.5 * c.beta2;
    const double b3 = c.beta3;
    const double two_b1_b2 = 2.0 * c.beta1 + c.beta2;
    const double b3_4 = 0.25 * c.beta3;
    const double b2_8 = c.beta2 / 8.0;
    const double b1_2_b2_4 = 0.5 * c.beta1 + 0.25 * c.beta2;
    const double b2 = c.beta2;
    const double two_b3 = 2.0 * c.beta3;
    const double b2_4 = 0.25 * c.beta2;
    const double b3_2 = 0.5 * c.beta3;
    const double g_down = c.lambda3 - c.lambda2;
    const double g_sum = c.lambda2 + c.lambda3;
    const double r = 0.5 * (c.lambda2 + c.lambda3);
    const double two_l1 = 2.0 * c.lambda1;

    auto row = [=](std::size_t ix) {
        const double x = xs[ix];
        const double hx = 0.5 * x;
        const std::size_t off = ix * np;
        const double* rw[4] = {F[0] + off, F[1] + off, F[2] + off, F[3] + off};
        for (std::size_t ip = 0; ip < np; ++ip) {
            const double p = ps[ip];
            const double hp = 0.5 * p;
            double v[4], dp1[4], dx1[4], base[4];
            for (int q = 0; q < 4; ++q) {
                v[q] = rw[q][ip];
                dp1[q] = node_d1(rw[q], ip, np, inv2dp);
                dx1[q] = node_d1_s(F[q] + ip, np, ix, nx, inv2dx);
                base[q] = ga * node_d2(rw[q], ip, np, invdp2) +
                          g * node_drift(rw[q], ps, ip, np, inv2dp) + hx * dp1[q] - hp * dx1[q];
            }
            const std::size_t i = off + ip;
            O[0][i] = base[0] - b3 * dp1[2] + b2_2 * dp1[3] + b2_2 * dx1[2] + b3 * dx1[3];
            O[1][i] = base[1] - two_b1_b2 * dp1[3] - two_b1_b2 * dx1[2] +
                      x * (-b2 * v[2] + two_b3 * v[3]) + p * (-two_b3 * v[2] - b2 * v[3]) +
                      g_down * v[0] - g_sum * v[1];
            O[2][i] = base[2] - b3_4 * dp1[0] + b2_8 * dx1[0] + b1_2_b2_4 * dx1[1] +
                      x * (b2_4 * v[1]) + p * (b3_2 * v[1]) - r * v[2] - two_l1 * v[3];
            O[3][i] = base[3] + b2_8 * dp1[0] + b1_2_b2_4 * dp1[1] + b3_4 * dx1[0] +
                      x * (-b3_2 * v[1]) + p * (b2_4 * v[1]) - r * v[3] + two_l1 * v[2];
        }
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t ix = 0; ix < static_cast<std::ptrdiff_t>(nx); ++ix)
            row(static_cast<std::size_t>(ix));
    } else {
        for (std::size_t ix = 0; ix < nx; ++ix) row(ix);
    }
}

namespace {

struct StepWorkspace2d {
    PhaseSpaceField k1, k2, k3, k4, tmp;
    explicit StepWorkspace2d(const PhaseGrid& g) : k1(g), k2(g), k3(g), k4(g), tmp(g) {}
};

inline void axpy_2d(const PhaseSpaceField& f, double h, const PhaseSpaceField& k,
                    PhaseSpaceField& out, bool parallel) {
    const std::size_t n = f.wp.size();
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

void step_rk4_2d_ws(PhaseSpaceField& f, const CoefficientSet& c, double gamma_eff, double dt,
                    StepWorkspace2d& ws, bool parallel) {
    rhs_2d(f, c, gamma_eff, ws.k1, parallel);
    axpy_2d(f, 0.5 * dt, ws.k1, ws.tmp, parallel);
    rhs_2d(ws.tmp, c, gamma_eff, ws.k2, parallel);
    axpy_2d(f, 0.5 * dt, ws.k2, ws.tmp, parallel);
    rhs_2d(ws.tmp, c, gamma_eff, ws.k3, parallel);
    axpy_2d(f, dt, ws.k3, ws.tmp, parallel);
    rhs_2d(ws.tmp, c, gamma_eff, ws.k4, parallel);

    const std::size_t n = f.wp.size();
    const std::size_t nx = f.grid.x.N;
    const std::size_t np = f.grid.p.N;
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

    // Dirichlet pin on all four domain edges.
    for (int q = 0; q < 4; ++q) {
        for (std::size_t ip = 0; ip < np; ++ip) {
            dst[q][ip] = 0.0;
            dst[q][(nx - 1) * np + ip] = 0.0;
        }
        for (std::size_t ix = 0; ix < nx; ++ix) {
            dst[q][ix * np] = 0.0;
            dst[q][ix * np + np - 1] = 0.0;
        }
    }
    f.t += dt;

    for (int q = 0; q < 4; ++q) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(dst[q][i])) {
                std::ostringstream msg;
                msg << "step_rk4_2d: non-finite value in field " << q << " at node " << i
                    << ", t = " << f.t;
                throw numerical_error(msg.str());
            }
        }
    }
}

} // namespace

void step_rk4_2d(PhaseSpaceField& f, const CoefficientSet& c, double gamma_eff, double dt,
                 bool parallel) {
    StepWorkspace2d ws(f.grid);
    step_rk4_2d_ws(f, c, gamma_eff, dt, ws, parallel);
}

double trace_2d(const PhaseSpaceField& f) {
    const std::size_t nx = f.grid.x.N;
    const std::size_t np = f.grid.p.N;
    std::vector<double> row(np), marg(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        std::copy(f.wp.begin() + ix * np, f.wp.begin() + (ix + 1) * np, row.begin());
        marg[ix] = integrate(f.grid.p, row);
    }
    return integrate(f.grid.x, marg);
}

double stationary_weight(double alpha, double p) {
    return std::exp(-p * p / (2.0 * alpha)) / std::sqrt(2.0 * M_PI * alpha);
}

PhaseSpaceField product_state(const PhaseGrid& g, ProfileKind kind, double k,
                              const InternalState& s) {
    const WignerField base = initial_field(kind, k, s, g.x);
    PhaseSpaceField f(g);
    std::vector<double> ws(g.p.N);
    for (std::size_t ip = 0; ip < g.p.N; ++ip) ws[ip] = stationary_weight(g.alpha, g.p.x[ip]);
    for (std::size_t ix = 0; ix < g.x.N; ++ix) {
        for (std::size_t ip = 0; ip < g.p.N; ++ip) {
            const std::size_t i = ix * g.p.N + ip;
            f.wp[i] = base.wp[ix] * ws[ip];
            f.wm[i] = base.wm[ix] * ws[ip];
            f.cr[i] = base.cr[ix] * ws[ip];
            f.ci[i] = base.ci[ix] * ws[ip];
        }
    }
    return f;
}

double hermite_eigencheck(int n, const PhaseGrid& g) {
    if (n < 0 || n > 6)
        throw std::invalid_argument("hermite_eigencheck: n must lie in [0, 6]");
    const std::size_t np = g.p.N;
    const double a = g.alpha;
    const double sq = std::sqrt(2.0 * a);

    // Eigenfunction of the momentum relaxation generator with eigenvalue -n:
    // Gaussian times the n-th (physicists') Hermite polynomial in p/sqrt(2a).
    double fct = 1.0;
    for (int j = 1; j <= n; ++j) fct *= static_cast<double>(j);
    const double norm = 1.0 / (std::sqrt(2.0 * M_PI * a) * std::sqrt(std::ldexp(fct, n)));
    std::vector<double> f(np);
    for (std::size_t ip = 0; ip < np; ++ip) {
        const double p = g.p.x[ip];
        const double xi = p / sq;
        double h0 = 1.0, h1 = 2.0 * xi;
        double h = n == 0 ? h0 : h1;
        for (int j = 1; j < n; ++j) {
            const double h2 = 2.0 * xi * h1 - 2.0 * static_cast<double>(j) * h0;
            h0 = h1;
            h1 = h2;
            h = h2;
        }
        f[ip] = norm * std::exp(-p * p / (2.0 * a)) * h;
    }

    const std::vector<double> lap = d2(g.p, f);
    const std::vector<double> drf = drift(g.p, f);
    double num = 0.0, den = 0.0;
    for (std::size_t ip = 0; ip < np; ++ip) {
        const double res = a * lap[ip] + drf[ip] + static_cast<double>(n) * f[ip];
        num += res * res;
        den += f[ip] * f[ip];
    }
    return std::sqrt(num / den);
}

void projector_apply(const PhaseSpaceField& f, PhaseSpaceField& out) {
    const std::size_t nx = f.grid.x.N;
    const std::size_t np = f.grid.p.N;
    if (out.wp.size() != f.wp.size()) out = PhaseSpaceField(f.grid);
    out.t = f.t;
    std::vector<double> ws(np), row(np);
    for (std::size_t ip = 0; ip < np; ++ip) ws[ip] = stationary_weight(f.grid.alpha, f.grid.p.x[ip]);
    const std::vector<double>* src[4] = {&f.wp, &f.wm, &f.cr, &f.ci};
    std::vector<double>* dst[4] = {&out.wp, &out.wm, &out.cr, &out.ci};
    for (int q = 0; q < 4; ++q) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            std::copy(src[q]->begin() + ix * np, src[q]->begin() + (ix + 1) * np, row.begin());
            const double s = integrate(f.grid.p, row);
            for (std::size_t ip = 0; ip < np; ++ip) (*dst[q])[ix * np + ip] = ws[ip] * s;
        }
    }
}

namespace {

double field_norm(const PhaseSpaceField& f) {
    double acc = 0.0;
    for (const std::vector<double>* v : {&f.wp, &f.wm, &f.cr, &f.ci})
        for (double y : *v) acc += y * y;
    return std::sqrt(acc);
}

double field_dist(const PhaseSpaceField& a, const PhaseSpaceField& b) {
    double acc = 0.0;
    const std::vector<double>* va[4] = {&a.wp, &a.wm, &a.cr, &a.ci};
    const std::vector<double>* vb[4] = {&b.wp, &b.wm, &b.cr, &b.ci};
    for (int q = 0; q < 4; ++q)
        for (std::size_t i = 0; i < va[q]->size(); ++i) {
            const double d = (*va[q])[i] - (*vb[q])[i];
            acc += d * d;
        }
    return std::sqrt(acc);
}

// Deterministic test fields with structure in both directions and all four
// components populated.
std::vector<PhaseSpaceField> projector_test_fields(const PhaseGrid& g) {
    std::vector<PhaseSpaceField> fields;
    auto fill = [&](auto&& fx, auto&& fp) {
        PhaseSpaceField f(g);
        for (std::size_t ix = 0; ix < g.x.N; ++ix) {
            const double gx = fx(g.x.x[ix]);
            for (std::size_t ip = 0; ip < g.p.N; ++ip) {
                const double gp = fp(g.p.x[ip]);
                const std::size_t i = ix * g.p.N + ip;
                f.wp[i] = gx * gp;
                f.wm[i] = 0.5 * gx * gp;
                f.cr[i] = 0.25 * gx * gp;
                f.ci[i] = -0.25 * gx * gp;
            }
        }
        return f;
    };
    const double a = g.alpha;
    fields.push_back(fill([](double x) { return std::exp(-0.5 * x * x); },
                          [a](double p) { return std::exp(-p * p / a); }));
    fields.push_back(fill([&](double x) { return 1.0 + 0.3 * std::sin(M_PI * x / g.x.L); },
                          [](double p) { return std::exp(-0.5 * (p - 1.0) * (p - 1.0)); }));
    fields.push_back(fill([](double x) { return x * std::exp(-0.25 * x * x); },
                          [a](double p) { return (1.0 + p) * std::exp(-p * p / (2.0 * a)); }));
    return fields;
}

} // namespace

double projector_idempotence_residual(const PhaseGrid& g) {
    double worst = 0.0;
    PhaseSpaceField u(g), v(g);
    for (const PhaseSpaceField& f : projector_test_fields(g)) {
        projector_apply(f, u);
        projector_apply(u, v);
        const double nu = field_norm(u);
        if (nu == 0.0) continue;
        worst = std::max(worst, field_dist(v, u) / nu);
    }
    return worst;
}

double pl2p_check(const PhaseGrid& g) {
    const std::size_t nx = g.x.N;
    const std::size_t np = g.p.N;

    // Streaming generator at omega = 1: -(p/2) d/dx + (x/2) d/dp.
    auto apply_streaming = [&](const PhaseSpaceField& f, PhaseSpaceField& out) {
        const std::vector<double>* src[4] = {&f.wp, &f.wm, &f.cr, &f.ci};
        std::vector<double>* dst[4] = {&out.wp, &out.wm, &out.cr, &out.ci};
        std::vector<double> row(np), col(nx);
        for (int q = 0; q < 4; ++q) {
            for (std::size_t ix = 0; ix < nx; ++ix) {
                std::copy(src[q]->begin() + ix * np, src[q]->begin() + (ix + 1) * np, row.begin());
                const std::vector<double> dp = d1(g.p, row);
                for (std::size_t ip = 0; ip < np; ++ip)
                    (*dst[q])[ix * np + ip] = 0.5 * g.x.x[ix] * dp[ip];
            }
            for (std::size_t ip = 0; ip < np; ++ip) {
                for (std::size_t ix = 0; ix < nx; ++ix) col[ix] = (*src[q])[ix * np + ip];
                const std::vector<double> dx = d1(g.x, col);
                for (std::size_t ix = 0; ix < nx; ++ix)
                    (*dst[q])[ix * np + ip] -= 0.5 * g.p.x[ip] * dx[ix];
            }
        }
    };

    double worst = 0.0;
    PhaseSpaceField pf(g), lf(g), plf(g);
    for (const PhaseSpaceField& f : projector_test_fields(g)) {
        projector_apply(f, pf);
        const double npf = field_norm(pf);
        if (npf == 0.0) continue;
        apply_streaming(pf, lf);
        projector_apply(lf, plf);
        worst = std::max(worst, field_norm(plf) / npf);
    }
    return worst;
}

namespace {

// Explicit-step bound for the 2-D generator, same safety factor as the 1-D
// bound: diffusion in p, advection in both directions, local rates at the
// domain corners.
double dt_bound_2d(const CoefficientSet& c, const PhaseGrid& g, double gamma_eff) {
    const double s = 0.4;
    const double dp = g.p.dx;
    const double dx = g.x.dx;
    const double pmax = g.p.L;
    const double lx = g.x.L;
    const double diff = s * dp * dp / (2.0 * gamma_eff * g.alpha);
    const double adv_p = s * dp / (gamma_eff * pmax + 0.5 * lx);
    const double adv_x = s * dx / (0.5 * pmax);
    const double row_wm = std::abs(c.lambda3 - c.lambda2) + (c.lambda2 + c.lambda3) +
                          lx * (std::abs(c.beta2) + 2.0 * std::abs(c.beta3)) +
                          pmax * (2.0 * std::abs(c.beta3) + std::abs(c.beta2));
    const double r = 0.5 * (c.lambda2 + c.lambda3) + 2.0 * std::abs(c.lambda1);
    const double row_cr = r + 0.25 * lx * std::abs(c.beta2) + 0.5 * pmax * std::abs(c.beta3);
    const double row_ci = r + 0.5 * lx * std::abs(c.beta3) + 0.25 * pmax * std::abs(c.beta2);
    const double rate_max = std::max({row_wm, row_cr, row_ci});
    const double rate = rate_max > 0.0 ? s / rate_max : std::numeric_limits<double>::infinity();
    return std::min(std::min(diff, adv_p), std::min(adv_x, rate));
}

} // namespace

std::vector<ElimRow> validate_elimination(const ElimSettings& cfg,
                                          const std::vector<double>& gammas,
                                          bool parallel) {
    cfg.base.validate();
    if (!(cfg.alpha > 0.0))
        throw config_error("validate_elimination: alpha must be positive");
    if (!(cfg.t_end > 0.0))
        throw config_error("validate_elimination: t_end must be positive");
    for (double ts : cfg.sample_times)
        if (ts < 0.0 || ts > cfg.t_end + 1e-9)
            throw config_error("validate_elimination: sample times must lie in [0, t_end]");
    for (double gm : gammas)
        if (!(gm > 0.0))
            throw config_error("validate_elimination: gamma_eff values must be positive");
    if (cfg.base.lambda1 != 0.0)
        std::fprintf(stderr,
                     "validate_elimination: lambda1 = %g; the reduced model carries a different "
                     "coherence rotation, so the distance includes a model offset\n",
                     cfg.base.lambda1);

    const PhaseGrid pg(cfg.alpha, SpatialGrid(cfg.Lx, cfg.Nx),
                       SpatialGrid(8.0 * std::sqrt(cfg.alpha), cfg.Np));
    const std::size_t nx = pg.x.N;
    const std::size_t np = pg.p.N;

    std::vector<ElimRow> rows;
    for (double gm : gammas) {
        // Reduced model on the same x-grid; the population transfer rate is
        // pinned to the dissipator asymmetry so both models share one qubit.
        ScenarioConfig ref;
        ref.name = "elimination-reference";
        ref.coefficients = cfg.base;
        ref.coefficients.alpha_bar = cfg.alpha / (4.0 * gm);
        ref.coefficients.beta_bar = 1.0 / (4.0 * gm);
        ref.coefficients.gamma_omega = cfg.base.lambda2 - cfg.base.lambda3;
        ref.kind = cfg.kind;
        ref.k = cfg.k;
        ref.state = cfg.state;
        ref.L = cfg.Lx;
        ref.N = cfg.Nx;
        ref.integrator.t_final = cfg.t_end;
        ref.integrator.snapshot_times = cfg.sample_times;
        ref.integrator.series_stride = 1u << 20;
        ref.integrator.parallel = parallel;
        long long n1 = 1600;
        ref.integrator.dt = cfg.t_end / static_cast<double>(n1);
        while (!cfl_check(ref.coefficients, pg.x, ref.integrator.dt).ok && n1 < (1 << 24)) {
            n1 *= 2;
            ref.integrator.dt = cfg.t_end / static_cast<double>(n1);
        }
        const Trajectory traj = evolve(ref);

        // Full model, retried once at half the step if the run goes non-finite.
        const double bound = dt_bound_2d(cfg.base, pg, gm);
        long long nsteps = 20 * static_cast<long long>(std::ceil(cfg.t_end / (20.0 * bound)));
        for (int attempt = 0;; ++attempt) {
            const double dt = cfg.t_end / static_cast<double>(nsteps);
            PhaseSpaceField f = product_state(pg, cfg.kind, cfg.k, cfg.state);
            StepWorkspace2d ws(pg);
            std::vector<long long> sample_steps;
            for (double ts : cfg.sample_times)
                sample_steps.push_back(std::llround(ts / cfg.t_end * static_cast<double>(nsteps)));

            std::vector<ElimRow> got;
            try {
                std::vector<double> row(np), marg(nx);
                auto compare = [&](std::size_t sample) {
                    for (std::size_t ix = 0; ix < nx; ++ix) {
                        std::copy(f.wp.begin() + ix * np, f.wp.begin() + (ix + 1) * np,
                                  row.begin());
                        marg[ix] = integrate(pg.p, row);
                    }
                    const WignerField& snap = traj.snapshots[sample];
                    std::vector<double> diff(nx);
                    for (std::size_t ix = 0; ix < nx; ++ix)
                        diff[ix] = std::abs(marg[ix] - snap.wp[ix]);
                    got.push_back({gm, cfg.sample_times[sample], integrate(pg.x, diff)});
                };
                for (std::size_t s = 0; s < sample_steps.size(); ++s)
                    if (sample_steps[s] == 0) compare(s);
                for (long long k = 1; k <= nsteps; ++k) {
                    step_rk4_2d_ws(f, cfg.base, gm, dt, ws, parallel);
                    f.t = static_cast<double>(k) * dt;
                    for (std::size_t s = 0; s < sample_steps.size(); ++s)
                        if (sample_steps[s] == k) compare(s);
                }
            } catch (const numerical_error& e) {
                if (attempt == 0) {
                    nsteps *= 2;
                    continue;
                }
                throw numerical_error(std::string(e.what()) +
                                      " (gamma_eff run failed twice, step already halved)");
            }
            rows.insert(rows.end(), got.begin(), got.end());
            break;
        }
    }
    return rows;
}

} // namespace oqbm
