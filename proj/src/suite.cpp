#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "oqbm/config.hpp"
#include "oqbm/errors.hpp"
#include "oqbm/moments.hpp"
#include "oqbm/phase2d.hpp"
#include "oqbm/physical.hpp"
#include "oqbm/pv.hpp"
#include "oqbm/rhs.hpp"
#include "oqbm/runner.hpp"

namespace oqbm {

namespace {

struct Row {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
};

CoefficientSet fig1a_coefficients() {
    CoefficientSet c;
    c.alpha_bar = 8e-3;
    c.beta_bar = 1e-3;
    c.beta1 = 3e-3;
    c.beta2 = 5e-2;
    c.beta3 = 1e-2;
    c.lambda1 = 5e-3;
    c.lambda2 = 8e-3;
    c.lambda3 = 1e-3;
    c.gamma_omega = 1e-4;
    return c;
}

ScenarioConfig reduced_scenario(const CoefficientSet& c, double theta, double phi, double dt,
                                bool parallel) {
    ScenarioConfig sc;
    sc.name = "suite-reduced";
    sc.coefficients = c;
    sc.k = 2.0;
    sc.state.theta = theta;
    sc.state.phi = phi;
    sc.L = 20.0;
    sc.N = 256;
    sc.integrator.dt = dt;
    sc.integrator.t_final = 25.0;
    sc.integrator.snapshot_times = {0.0, 25.0};
    sc.integrator.series_stride = 16;
    sc.integrator.parallel = parallel;
    return sc;
}

} // namespace

int run_suite(bool parallel) {
    std::vector<Row> rows;
    auto add = [&](const std::string& name, double residual, double tol) {
        rows.push_back({name, residual, tol});
    };

    { // grid construction and stencil exactness
        SpatialGrid g(20.0, 256);
        double mirror = 0.0;
        for (std::size_t i = 0; i < g.N; ++i)
            mirror = std::max(mirror, std::abs(g.x[i] + g.x[g.N - 1 - i]));
        add("grid mirror symmetry", mirror, 0.0);

        std::vector<double> f(g.N);
        for (std::size_t i = 0; i < g.N; ++i) f[i] = g.x[i] * g.x[i];
        const std::vector<double> df = d1(g, f);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.N; ++i)
            worst = std::max(worst, std::abs(df[i] - 2.0 * g.x[i]));
        add("first derivative exact on x^2", worst, 1e-10);
    }
    { // trapezoid on a decaying Gaussian
        SpatialGrid g(10.0, 1001);
        std::vector<double> f(g.N);
        for (std::size_t i = 0; i < g.N; ++i) f[i] = std::exp(-g.x[i] * g.x[i]);
        add("quadrature of exp(-x^2)", std::abs(integrate(g, f) - std::sqrt(M_PI)), 1e-8);
    }
    { // principal value: removable pole and odd integrand
        const PvResult r1 = principal_value_integral(
            [](double w) { return (w - 1.0) / (w - 1.0); }, 1.0, 0.0, 3.0);
        add("principal value, removable pole", std::abs(r1.value - 3.0), 1e-10);
        const PvResult r2 = principal_value_integral([](double w) { return 1.0 / (w - 2.0); },
                                                     2.0, 1.0, 3.0);
        add("principal value, odd integrand", std::abs(r2.value), 1e-12);
    }
    { // emission-absorption split of the qubit rates
        PhysicalParams p;
        p.gamma = 20.0;
        p.Lambda = 100.0;
        p.T = 50.0;
        p.a0 = 0.1;
        const TwoLevelRates r = two_level_rates(p);
        add("rate split lambda2 - lambda3 = Gamma",
            std::abs(r.lambda2 - r.lambda3 - r.gamma_omega) / r.gamma_omega, 1e-12);
    }
    { // initial data normalization, both profile kinds
        SpatialGrid g(20.0, 256);
        InternalState s{M_PI / 6.0, M_PI / 4.0};
        double worst = 0.0;
        worst = std::max(worst,
                         std::abs(integrate(g, initial_field(ProfileKind::single, 2.0, s, g).wp) - 1.0));
        worst = std::max(
            worst,
            std::abs(integrate(g, initial_field(ProfileKind::double_center, 10.0, s, g).wp) - 1.0));
        add("initial field normalization", worst, 1e-12);
    }

    const ScenarioConfig fig1a_red =
        reduced_scenario(fig1a_coefficients(), M_PI / 6.0, M_PI, 25.0 / 128.0, parallel);
    { // trace conservation on the reduced transport run
        const Trajectory traj = evolve(fig1a_red);
        double worst = 0.0;
        for (double nrm : traj.series.norm) worst = std::max(worst, std::abs(nrm - 1.0));
        add("transport trace conservation", worst, 1e-6);
    }
    { // mirror symmetry of the density when the coherence weight vanishes
        CoefficientSet c = fig1a_coefficients();
        c.beta2 = 6e-2;
        c.beta3 = 6e-2;
        c.lambda1 = 1e-4;
        c.lambda2 = 1e-2;
        c.lambda3 = 1e-2;
        const ScenarioConfig sc = reduced_scenario(c, M_PI / 2.0, M_PI, 25.0 / 512.0, parallel);
        const Trajectory traj = evolve(sc);
        double worst = 0.0;
        for (const WignerField& f : traj.snapshots)
            for (std::size_t i = 0; i < f.grid.N; ++i)
                worst = std::max(worst, std::abs(f.wp[i] - f.wp[f.grid.N - 1 - i]));
        add("even-state reflection symmetry", worst, 1e-8);
    }
    { // serial and parallel kernels agree bit for bit
        SpatialGrid g(20.0, 256);
        WignerField f = initial_field(ProfileKind::single, 2.0, {M_PI / 6.0, M_PI}, g);
        WignerField a = f, b = f;
        const CoefficientSet c = fig1a_coefficients();
        step_rk4(a, c, 0.1, false);
        step_rk4(b, c, 0.1, true);
        double worst = 0.0;
        const std::vector<double>* va[4] = {&a.wp, &a.wm, &a.cr, &a.ci};
        const std::vector<double>* vb[4] = {&b.wp, &b.wm, &b.cr, &b.ci};
        for (int q = 0; q < 4; ++q)
            for (std::size_t i = 0; i < g.N; ++i)
                worst = std::max(worst, std::abs((*va[q])[i] - (*vb[q])[i]));
        add("serial / parallel step identity", worst, 0.0);
    }
    { // moment hierarchy conserves the zeroth population moment
        CoefficientSet c;
        c.alpha_bar = 1.0;
        c.beta_bar = 5e-2;
        c.beta1 = 0.21;
        c.beta2 = 3e-2;
        c.beta3 = 2e-2;
        c.lambda1 = -2e-3;
        c.lambda2 = 4e-2;
        c.lambda3 = 1e-2;
        c.gamma_omega = 1e-2;
        const MomentSystem sys = build_system(c, 8);
        const MomentHistory hist = evolve_moments(sys, {M_PI / 4.0, M_PI / 4.0}, 0.0, 25.0, 64);
        double worst = 0.0;
        for (const std::vector<Vec4>& sample : hist.r)
            worst = std::max(worst, std::abs(sample[0][0] - 1.0));
        add("hierarchy zeroth-moment conservation", worst, 1e-9);
    }
    { // momentum relaxation eigenfunctions under grid refinement
        double worst = 0.0;
        for (int n = 0; n <= 2; ++n) {
            const double coarse =
                hermite_eigencheck(n, PhaseGrid(1.0, SpatialGrid(6.0, 16), SpatialGrid(8.0, 512)));
            const double fine =
                hermite_eigencheck(n, PhaseGrid(1.0, SpatialGrid(6.0, 16), SpatialGrid(8.0, 1024)));
            worst = std::max(worst, fine);
            if (fine > 0.3 * coarse) worst = std::max(worst, 1.0); // not second order
        }
        add("relaxation eigenfunctions, refined grid", worst, 3e-4);
    }
    { // projector algebra
        const PhaseGrid g(1.0, SpatialGrid(6.0, 64), SpatialGrid(8.0, 128));
        add("projector idempotence", projector_idempotence_residual(g), 1e-12);
        add("projected streaming cancellation", pl2p_check(g), 1e-10);
    }
    { // phase-space trace conservation on a short full-model run
        CoefficientSet c = fig1a_coefficients();
        c.lambda1 = 0.0;
        c.gamma_omega = c.lambda2 - c.lambda3;
        const PhaseGrid g(1.0, SpatialGrid(6.0, 64), SpatialGrid(8.0, 48));
        PhaseSpaceField f = product_state(g, ProfileKind::single, 2.0, {M_PI / 6.0, M_PI});
        const double tr0 = trace_2d(f);
        const double gamma_eff = 5.0;
        const double dt = 1.0 / 1024.0;
        for (int k = 0; k < 1024; ++k) step_rk4_2d(f, c, gamma_eff, dt, parallel);
        add("phase-space trace conservation", std::abs(trace_2d(f) - tr0), 1e-5);
    }
    { // injected defect: anti-confining drift must trip the trace detector
        // Strong confinement, so the reversed drift floods the boundary well
        // inside the run window (variance doubles every 1/(2 beta_bar) = 1).
        CoefficientSet c = fig1a_coefficients();
        c.beta_bar = 0.5;
        ScenarioConfig sc = reduced_scenario(c, M_PI / 6.0, M_PI, 25.0 / 8192.0, parallel);
        bool fired = false;
        try {
            const Trajectory bad = evolve(sc, -1.0);
            for (double nrm : bad.series.norm)
                if (std::abs(nrm - 1.0) > 1e-6) fired = true;
        } catch (const numerical_error&) {
            fired = true;
        }
        add("drift-mutation detector fires", fired ? 0.0 : 1.0, 0.5);
    }
    { // determinism of a repeated run
        const Trajectory t1 = evolve(fig1a_red);
        const Trajectory t2 = evolve(fig1a_red);
        double worst = (t1.series.norm == t2.series.norm &&
                        t1.series.variance == t2.series.variance &&
                        t1.snapshots.back().wp == t2.snapshots.back().wp)
                           ? 0.0
                           : 1.0;
        add("repeated run determinism", worst, 0.0);
    }
    { // config canonical round trip
        RunConfig cfg;
        cfg.scenario.coefficients = fig1a_coefficients();
        cfg.scenario.state = {M_PI / 6.0, M_PI};
        cfg.has_grid = true;
        cfg.scenario.integrator.dt = 50.0 / 1536.0;
        const std::string s1 = serialize_config(cfg);
        const std::string s2 = serialize_config(parse_config_text(s1, "roundtrip"));
        add("config round trip", s1 == s2 ? 0.0 : 1.0, 0.0);
    }

    int failures = 0;
    std::printf("%-42s %13s %10s  %s\n", "check", "residual", "tolerance", "status");
    for (const Row& r : rows) {
        const bool ok = r.residual <= r.tol;
        if (!ok) ++failures;
        std::printf("%-42s %13.3e %10.1e  %s\n", r.name.c_str(), r.residual, r.tol,
                    ok ? "pass" : "FAIL");
    }
    std::printf("suite: %zu checks, %d failed\n", rows.size(), failures);
    return failures;
}

} // namespace oqbm
