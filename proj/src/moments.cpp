#include "oqbm/moments.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "oqbm/errors.hpp"

namespace oqbm {

void MomentSystem::apply(const std::vector<double>& r, std::vector<double>& out) const {
    const int N = nmax;
    out.assign(dim(), 0.0);
    for (int n = 0; n <= N; ++n) {
        const double* rn = r.data() + 4 * n;
        double* on = out.data() + 4 * n;
        const Mat4& Mn = M[static_cast<std::size_t>(n)];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) on[i] += Mn[i][j] * rn[j];
        if (n >= 1) {
            const double* rm = r.data() + 4 * (n - 1);
            const Mat4& An = A[static_cast<std::size_t>(n)];
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) on[i] += An[i][j] * rm[j];
        }
        if (n >= 2) {
            const double* rm = r.data() + 4 * (n - 2);
            const double b = B[static_cast<std::size_t>(n)];
            for (int i = 0; i < 4; ++i) on[i] += b * rm[i];
        }
        if (n + 1 <= N) {
            const double* rp = r.data() + 4 * (n + 1);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) on[i] += C[i][j] * rp[j];
        }
        // truncation closure: R_{nmax+1} = 0
    }
}

MomentSystem build_system(const CoefficientSet& c, int nmax) {
    c.validate();
    if (nmax < 2) throw std::invalid_argument("build_system: nmax must be >= 2");
    MomentSystem sys;
    sys.nmax = nmax;
    sys.c = c;
    sys.M.resize(static_cast<std::size_t>(nmax) + 1);
    sys.A.resize(static_cast<std::size_t>(nmax) + 1);
    sys.B.resize(static_cast<std::size_t>(nmax) + 1);

    const double d3 = 2.0 * c.beta1 + c.beta2;
    for (int n = 0; n <= nmax; ++n) {
        const double nn = n;
        const double d1 = 2.0 * c.beta_bar * nn + c.lambda2 + c.lambda3;
        const double d2 = 4.0 * c.lambda1 - 2.0 * c.beta_bar * nn - c.lambda2 - c.lambda3;
        Mat4 M{};
        M[0][0] = -c.beta_bar * nn;
        M[1][0] = -c.gamma_omega;
        M[1][1] = -(c.beta_bar + 2.0 * c.lambda3);
        M[2][2] = -0.5 * d1;
        M[3][3] = 0.5 * d2;
        sys.M[static_cast<std::size_t>(n)] = M;

        Mat4 A{};
        A[0][2] = -0.5 * nn * c.beta2;
        A[0][3] = -nn * c.beta3;
        A[1][2] = nn * d3;
        A[2][0] = -nn * c.beta2 / 8.0;
        A[2][1] = -0.25 * nn * d3;
        A[3][0] = -0.25 * nn * c.beta3;
        sys.A[static_cast<std::size_t>(n)] = A;

        sys.B[static_cast<std::size_t>(n)] = c.alpha_bar * nn * (nn - 1.0);
    }
    Mat4 C{};
    C[1][2] = -c.beta2;
    C[1][3] = 2.0 * c.beta3;
    C[2][1] = 0.25 * c.beta2;
    C[3][1] = -0.5 * c.beta3;
    sys.C = C;
    return sys;
}

Vec4 initial_moments(int n, const InternalState& s) {
    if (n < 0) throw std::invalid_argument("initial_moments: order must be >= 0");
    if (n % 2 == 1) return {0.0, 0.0, 0.0, 0.0};
    const double w = std::tgamma(0.5 * (1.0 + n)) / std::sqrt(std::numbers::pi);
    const double c2 = std::cos(2.0 * s.theta);
    const double pr = 0.5 * std::sin(2.0 * s.theta) * std::cos(s.phi);
    const double pi_ = -0.5 * std::sin(2.0 * s.theta) * std::sin(s.phi);
    return {w, w * c2, w * pr, w * pi_};
}

double hierarchy_spectral_bound(const MomentSystem& sys) {
    const std::size_t d = sys.dim();
    std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
    std::vector<double> av(d), aav(d), atu(d);

    // Power iteration on G = L^T L: converges to sigma_max^2 >= |lambda|_max^2.
    // L^T x computed by accumulating column contributions of apply.
    auto apply_t = [&](const std::vector<double>& x, std::vector<double>& out) {
        const int N = sys.nmax;
        out.assign(d, 0.0);
        for (int n = 0; n <= N; ++n) {
            const double* xn = x.data() + 4 * n;
            for (int i = 0; i < 4; ++i) {
                const double xi = xn[i];
                if (xi == 0.0) continue;
                const Mat4& Mn = sys.M[static_cast<std::size_t>(n)];
                for (int j = 0; j < 4; ++j) out[4 * n + j] += Mn[i][j] * xi;
                if (n >= 1) {
                    const Mat4& An = sys.A[static_cast<std::size_t>(n)];
                    for (int j = 0; j < 4; ++j) out[4 * (n - 1) + j] += An[i][j] * xi;
                }
                if (n >= 2) out[4 * (n - 2) + i] += sys.B[static_cast<std::size_t>(n)] * xi;
                if (n + 1 <= N)
                    for (int j = 0; j < 4; ++j) out[4 * (n + 1) + j] += sys.C[i][j] * xi;
            }
        }
    };

    double sigma2 = 0.0;
    for (int it = 0; it < 200; ++it) {
        sys.apply(v, av);
        apply_t(av, atu);
        double nrm = 0.0;
        for (double q : atu) nrm += q * q;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return 0.0;
        double ray = 0.0;
        for (std::size_t i = 0; i < d; ++i) ray += v[i] * atu[i];
        sigma2 = std::abs(ray);
        for (std::size_t i = 0; i < d; ++i) v[i] = atu[i] / nrm;
    }
    return std::sqrt(sigma2);
}

MomentHistory evolve_moments(const MomentSystem& sys, const InternalState& s,
                             double dt, double t_final, std::size_t stride) {
    if (t_final < 0.0) throw std::invalid_argument("evolve_moments: t_final must be >= 0");
    if (stride < 1) throw std::invalid_argument("evolve_moments: stride must be >= 1");
    const double sigma = hierarchy_spectral_bound(sys);
    const double bound = sigma > 0.0 ? 2.5 / sigma : std::numeric_limits<double>::infinity();
    if (dt <= 0.0) dt = sigma > 0.0 ? 2.0 / sigma : t_final;
    if (dt > bound) {
        std::ostringstream msg;
        msg << "evolve_moments: dt = " << dt << " exceeds the RK4 stability bound 2.5/sigma = "
            << bound << " (sigma_max = " << sigma << ")";
        throw numerical_error(msg.str());
    }

    const std::size_t d = sys.dim();
    std::vector<double> r(d), k1(d), k2(d), k3(d), k4(d), tmp(d);
    double r0max = 0.0;
    for (int n = 0; n <= sys.nmax; ++n) {
        const Vec4 m = initial_moments(n, s);
        for (int i = 0; i < 4; ++i) {
            r[4 * n + i] = m[static_cast<std::size_t>(i)];
            r0max = std::max(r0max, std::abs(m[static_cast<std::size_t>(i)]));
        }
    }

    MomentHistory hist;
    hist.dt = dt;
    auto record = [&](double t) {
        hist.t.push_back(t);
        std::vector<Vec4> row(static_cast<std::size_t>(sys.nmax) + 1);
        for (int n = 0; n <= sys.nmax; ++n)
            row[static_cast<std::size_t>(n)] = {r[4 * n], r[4 * n + 1], r[4 * n + 2], r[4 * n + 3]};
        hist.r.push_back(std::move(row));
    };

    const long long nsteps =
        t_final > 0.0 ? static_cast<long long>(std::ceil(t_final / dt - 1e-9)) : 0;
    record(0.0);
    for (long long k = 1; k <= nsteps; ++k) {
        sys.apply(r, k1);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = r[i] + 0.5 * dt * k1[i];
        sys.apply(tmp, k2);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = r[i] + 0.5 * dt * k2[i];
        sys.apply(tmp, k3);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = r[i] + dt * k3[i];
        sys.apply(tmp, k4);
        for (std::size_t i = 0; i < d; ++i)
            r[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        double rmax = 0.0;
        for (double q : r) rmax = std::max(rmax, std::abs(q));
        if (!std::isfinite(rmax) || rmax > 1e9 * (1.0 + r0max)) {
            std::ostringstream msg;
            msg << "evolve_moments: hierarchy diverging at t = " << k * dt
                << " (|R|_inf = " << rmax << ", sigma_max = " << sigma
                << "); the truncated system is unstable for these coefficients";
            throw numerical_error(msg.str());
        }
        if (k % static_cast<long long>(stride) == 0 || k == nsteps) record(k * dt);
    }
    return hist;
}

PdeMoments moments_from_pde(const Trajectory& traj, int n) {
    if (n < 0) throw std::invalid_argument("moments_from_pde: order must be >= 0");
    PdeMoments out;
    for (std::size_t si = 0; si < traj.snapshots.size(); ++si) {
        const WignerField& f = traj.snapshots[si];
        const SpatialGrid& g = f.grid;
        const double edge = std::pow(g.L, n);
        if (!std::isfinite(edge))
            throw std::invalid_argument(
                "moments_from_pde: x^n overflows at the domain edge; reduce n");
        std::vector<double> xn(g.N);
        for (std::size_t i = 0; i < g.N; ++i) xn[i] = std::pow(g.x[i], n);
        Vec4 m{};
        const std::vector<double>* fields[4] = {&f.wp, &f.wm, &f.cr, &f.ci};
        std::vector<double> tmp(g.N);
        for (int q = 0; q < 4; ++q) {
            for (std::size_t i = 0; i < g.N; ++i) tmp[i] = xn[i] * (*fields[q])[i];
            m[static_cast<std::size_t>(q)] = integrate(g, tmp);
        }
        out.t.push_back(traj.snapshot_times[si]);
        out.m.push_back(m);
    }
    return out;
}

} // namespace oqbm
