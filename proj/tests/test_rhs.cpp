#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "oqbm/errors.hpp"
#include "oqbm/field.hpp"
#include "oqbm/grid.hpp"
#include "oqbm/observables.hpp"
#include "oqbm/rhs.hpp"

using namespace oqbm;

namespace {

constexpr double pi = std::numbers::pi;

CoefficientSet mixed_coefficients() {
    CoefficientSet c;
    c.alpha_bar = 1e-2;
    c.beta_bar = 2e-2;
    c.beta1 = 3e-3;
    c.beta2 = 5e-3;
    c.beta3 = 4e-3;
    c.lambda1 = 2e-3;
    c.lambda2 = 6e-3;
    c.lambda3 = 1e-3;
    c.gamma_omega = 3e-3;
    return c;
}

WignerField test_state(const SpatialGrid& g) {
    // All four components populated and structurally distinct.
    WignerField f = initial_field(ProfileKind::single, 2.0, {pi / 6.0, pi / 4.0}, g);
    for (std::size_t i = 0; i < g.N; ++i) {
        f.wm[i] *= 1.0 + 0.2 * std::sin(0.7 * g.x[i]);
        f.cr[i] *= 1.0 + 0.1 * std::cos(1.3 * g.x[i]);
        f.ci[i] += 0.03 * g.x[i] * f.wp[i];
    }
    return f;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST_CASE("rhs: fused kernel equals the operator composition") {
    const SpatialGrid g(8.0, 128);
    const CoefficientSet c = mixed_coefficients();
    const WignerField f = test_state(g);

    WignerField out(g);
    rhs(f, c, out, false);

    const std::vector<double> d2wp = d2(g, f.wp), drwp = drift(g, f.wp);
    const std::vector<double> d2wm = d2(g, f.wm), drwm = drift(g, f.wm);
    const std::vector<double> d2cr = d2(g, f.cr), drcr = drift(g, f.cr);
    const std::vector<double> d2ci = d2(g, f.ci), drci = drift(g, f.ci);
    const std::vector<double> d1wp = d1(g, f.wp), d1wm = d1(g, f.wm);
    const std::vector<double> d1cr = d1(g, f.cr), d1ci = d1(g, f.ci);

    const double scale = std::max({max_abs(out.wp), max_abs(out.wm),
                                   max_abs(out.cr), max_abs(out.ci)});
    for (std::size_t i = 0; i < g.N; ++i) {
        const double x = g.x[i];
        const double wp = c.alpha_bar * d2wp[i] + c.beta_bar * drwp[i] +
                          0.5 * c.beta2 * d1cr[i] + c.beta3 * d1ci[i];
        const double wm = c.alpha_bar * d2wm[i] + c.beta_bar * drwm[i] -
                          (2.0 * c.beta1 + c.beta2) * d1cr[i] - c.beta2 * x * f.cr[i] +
                          2.0 * c.beta3 * x * f.ci[i] -
                          (2.0 * c.lambda3 + c.gamma_omega) * f.wm[i] -
                          c.gamma_omega * f.wp[i];
        const double cr = c.alpha_bar * d2cr[i] + c.beta_bar * drcr[i] +
                          0.25 * (2.0 * c.beta1 + c.beta2) * d1wm[i] +
                          0.125 * c.beta2 * d1wp[i] + 0.25 * c.beta2 * x * f.wm[i] -
                          0.5 * (c.lambda2 + c.lambda3) * f.cr[i];
        const double ci = c.alpha_bar * d2ci[i] + c.beta_bar * drci[i] +
                          0.25 * c.beta3 * d1wp[i] - 0.5 * c.beta3 * x * f.wm[i] +
                          0.5 * (4.0 * c.lambda1 - c.lambda2 - c.lambda3) * f.ci[i];
        CHECK(std::abs(out.wp[i] - wp) <= 1e-12 * scale);
        CHECK(std::abs(out.wm[i] - wm) <= 1e-12 * scale);
        CHECK(std::abs(out.cr[i] - cr) <= 1e-12 * scale);
        CHECK(std::abs(out.ci[i] - ci) <= 1e-12 * scale);
    }
}

TEST_CASE("rhs: parallel path reproduces the serial reference bitwise") {
    const SpatialGrid g(8.0, 256);
    const CoefficientSet c = mixed_coefficients();
    const WignerField f = test_state(g);

    WignerField serial(g), parallel(g);
    rhs(f, c, serial, false);
    rhs(f, c, parallel, true);
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(serial.wp[i] == parallel.wp[i]);
        CHECK(serial.wm[i] == parallel.wm[i]);
        CHECK(serial.cr[i] == parallel.cr[i]);
        CHECK(serial.ci[i] == parallel.ci[i]);
    }

    WignerField a = test_state(g), b = test_state(g);
    for (int k = 0; k < 10; ++k) {
        step_rk4(a, c, 0.01, false);
        step_rk4(b, c, 0.01, true);
    }
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(a.wp[i] == b.wp[i]);
        CHECK(a.wm[i] == b.wm[i]);
        CHECK(a.cr[i] == b.cr[i]);
        CHECK(a.ci[i] == b.ci[i]);
    }
}

TEST_CASE("rhs: drift corruption hook changes the confining term only") {
    const SpatialGrid g(8.0, 128);
    CoefficientSet c = mixed_coefficients();
    const WignerField f = test_state(g);

    WignerField plus(g), minus(g);
    rhs(f, c, plus, false, 1.0);
    rhs(f, c, minus, false, -1.0);
    CHECK(max_abs(plus.wp) > 0.0);
    bool differs = false;
    for (std::size_t i = 0; i < g.N && !differs; ++i) differs = plus.wp[i] != minus.wp[i];
    CHECK(differs);

    // With beta_bar = 0 the hook has nothing to corrupt.
    c.beta_bar = 0.0;
    rhs(f, c, plus, false, 1.0);
    rhs(f, c, minus, false, -1.0);
    for (std::size_t i = 0; i < g.N; ++i) CHECK(plus.wp[i] == minus.wp[i]);
}

TEST_CASE("rk4 step: exact homogeneity under power-of-two scaling") {
    const SpatialGrid g(8.0, 128);
    const CoefficientSet c = mixed_coefficients();
    WignerField f = test_state(g);
    WignerField f2 = f;
    for (std::size_t i = 0; i < g.N; ++i) {
        f2.wp[i] *= 2.0;
        f2.wm[i] *= 2.0;
        f2.cr[i] *= 2.0;
        f2.ci[i] *= 2.0;
    }
    step_rk4(f, c, 0.01, false);
    step_rk4(f2, c, 0.01, false);
    for (std::size_t i = 0; i < g.N; ++i) {
        CHECK(f2.wp[i] == 2.0 * f.wp[i]);
        CHECK(f2.wm[i] == 2.0 * f.wm[i]);
        CHECK(f2.cr[i] == 2.0 * f.cr[i]);
        CHECK(f2.ci[i] == 2.0 * f.ci[i]);
    }
}

TEST_CASE("rk4 step: pins the boundary and detects non-finite values") {
    const SpatialGrid g(8.0, 128);
    const CoefficientSet c = mixed_coefficients();
    WignerField f = test_state(g);
    step_rk4(f, c, 0.01, false);
    CHECK(f.wp[0] == 0.0);
    CHECK(f.wp[g.N - 1] == 0.0);
    CHECK(f.ci[0] == 0.0);

    f.wm[5] = std::numeric_limits<double>::quiet_NaN();
    try {
        step_rk4(f, c, 0.01, false);
        CHECK(false);
    } catch (const numerical_error& e) {
        // The defect spreads through the coupling within one step; the
        // report names whichever field the scan reaches first.
        const std::string msg = e.what();
        CHECK(msg.find("non-finite") != std::string::npos);
        CHECK(msg.find("t = ") != std::string::npos);
    }
}

TEST_CASE("rk4 step: fourth-order convergence in time") {
    // Same grid for every run, so spatial error cancels in differences and
    // the classical O(dt^4) remainder is what varies. The rates are pushed
    // well above the transport scenarios to lift that remainder off the
    // rounding floor.
    ScenarioConfig cfg;
    cfg.coefficients.alpha_bar = 5e-2;
    cfg.coefficients.beta_bar = 0.3;
    cfg.coefficients.beta1 = 0.1;
    cfg.coefficients.beta2 = 0.4;
    cfg.coefficients.beta3 = 0.3;
    cfg.coefficients.lambda1 = 0.2;
    cfg.coefficients.lambda2 = 0.5;
    cfg.coefficients.lambda3 = 0.1;
    cfg.coefficients.gamma_omega = 0.4;
    cfg.k = 2.0;
    cfg.state = {pi / 6.0, pi / 4.0};
    cfg.L = 8.0;
    cfg.N = 64;
    cfg.integrator.t_final = 1.0;
    cfg.integrator.snapshot_times = {1.0};
    cfg.integrator.series_stride = 1u << 20;
    cfg.integrator.parallel = false;

    // Largest power-of-two step inside the stability bound.
    const SpatialGrid g(cfg.L, cfg.N);
    const double bound = cfl_check(cfg.coefficients, g, 1e-9).dt_max;
    const double dt1 = std::exp2(std::floor(std::log2(0.8 * bound)));

    auto run = [&](double dt) {
        ScenarioConfig c2 = cfg;
        c2.integrator.dt = dt;
        return evolve(c2).snapshots.front();
    };
    const WignerField ref = run(dt1 / 64.0);
    auto err = [&](const WignerField& f) {
        double m = 0.0;
        for (std::size_t i = 0; i < f.wp.size(); ++i) {
            m = std::max(m, std::abs(f.wp[i] - ref.wp[i]));
            m = std::max(m, std::abs(f.wm[i] - ref.wm[i]));
            m = std::max(m, std::abs(f.cr[i] - ref.cr[i]));
            m = std::max(m, std::abs(f.ci[i] - ref.ci[i]));
        }
        return m;
    };
    const double e1 = err(run(dt1));
    const double e2 = err(run(dt1 / 2.0));
    const double e3 = err(run(dt1 / 4.0));
    CHECK(e1 > 1e-13); // not at the rounding floor
    CHECK(e1 / e2 >= 11.0);
    CHECK(e1 / e2 <= 24.0);
    CHECK(e2 / e3 >= 11.0);
    CHECK(e2 / e3 <= 24.0);
}

TEST_CASE("cfl check: bound structure and binding label") {
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
    const SpatialGrid g;

    const CflReport rep = cfl_check(c, g, 0.015625);
    const double diffusion = 0.4 * g.dx * g.dx / (2.0 * c.alpha_bar);
    CHECK(std::abs(rep.diffusion_bound - diffusion) <= 1e-15);
    CHECK(rep.dt_max == std::min(rep.diffusion_bound, rep.rate_bound));
    CHECK(std::abs(rep.dt_max - 0.0382216) <= 1e-6); // diffusion-limited here
    CHECK(std::string(rep.binding) == "diffusion");
    CHECK(rep.ok);
    CHECK(rep.dt == 0.015625);

    CHECK_FALSE(cfl_check(c, g, 0.05).ok);

    // Strong local rates flip the binding side.
    CoefficientSet r = c;
    r.beta2 = 2.0;
    r.beta3 = 1.0;
    const CflReport rr = cfl_check(r, g, 1e-4);
    CHECK(std::string(rr.binding) == "advection+rates");
    CHECK(rr.rate_bound < rr.diffusion_bound);
}

TEST_CASE("evolve: rejects a step above the stability bound") {
    ScenarioConfig cfg;
    cfg.coefficients = mixed_coefficients();
    cfg.L = 8.0;
    cfg.N = 256;
    cfg.integrator.t_final = 1.0;
    cfg.integrator.dt = 0.5; // above the diffusive bound for dx ~ 0.063
    cfg.integrator.snapshot_times = {1.0};
    try {
        evolve(cfg);
        CHECK(false);
    } catch (const numerical_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("violates the step bound") != std::string::npos);
        CHECK(msg.find("binding") != std::string::npos);
    }
}

TEST_CASE("evolve: scenario validation") {
    ScenarioConfig cfg;
    cfg.coefficients = mixed_coefficients();
    cfg.integrator.dt = 0.01;

    ScenarioConfig bad = cfg;
    bad.k = 0.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = cfg;
    bad.N = 8;
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = cfg;
    bad.L = -2.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = cfg;
    bad.integrator.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = cfg;
    bad.integrator.series_stride = 0;
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = cfg;
    bad.integrator.snapshot_times = {250.0};
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = cfg;
    bad.integrator.snapshot_times = {-1.0};
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = cfg;
    bad.integrator.t_final = -1.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("evolve: conservation, sampling and symmetry") {
    ScenarioConfig cfg;
    cfg.coefficients = mixed_coefficients();
    cfg.kind = ProfileKind::double_center;
    cfg.k = 2.0;
    cfg.state = {pi / 2.0, pi / 6.0}; // symmetric, coherence-free start
    cfg.L = 10.0;
    cfg.N = 128;
    cfg.integrator.dt = 0.01;
    cfg.integrator.t_final = 2.0;
    cfg.integrator.snapshot_times = {0.0, 1.0, 2.0};
    cfg.integrator.series_stride = 7;
    cfg.integrator.parallel = false;

    const Trajectory traj = evolve(cfg);
    REQUIRE(traj.snapshots.size() == 3);
    CHECK(traj.snapshots[0].t == 0.0);
    CHECK(std::abs(traj.snapshots[1].t - 1.0) <= 1e-12);
    CHECK(std::abs(traj.snapshots[2].t - 2.0) <= 1e-12);

    // 200 steps, stride 7: samples at 0, 7, ..., 196, then the final step.
    CHECK(traj.series.size() == 200 / 7 + 2);
    CHECK(traj.series.t.front() == 0.0);
    CHECK(std::abs(traj.series.t.back() - 2.0) <= 1e-12);

    for (double n : traj.series.norm) CHECK(std::abs(n - 1.0) <= 1e-12);
    CHECK(std::abs(traj.series.sigma_z.front() + 1.0) <= 1e-12);
    for (double m : traj.series.mean_x) CHECK(std::abs(m) <= 1e-12);

    // Mirror parity is preserved: populations stay even, coherences odd.
    const SpatialGrid g(cfg.L, cfg.N);
    for (const WignerField& f : traj.snapshots) {
        double asym = 0.0;
        for (std::size_t i = 0; i < g.N; ++i) {
            const std::size_t j = g.N - 1 - i;
            asym = std::max(asym, std::abs(f.wp[i] - f.wp[j]));
            asym = std::max(asym, std::abs(f.wm[i] - f.wm[j]));
            asym = std::max(asym, std::abs(f.cr[i] + f.cr[j]));
            asym = std::max(asym, std::abs(f.ci[i] + f.ci[j]));
        }
        CHECK(asym <= 1e-13);
    }

    // The coherence channel is genuinely active in this configuration.
    double ci_peak = 0.0;
    for (double v : traj.snapshots[2].ci) ci_peak = std::max(ci_peak, std::abs(v));
    CHECK(ci_peak > 1e-8);
}

TEST_CASE("evolve: zero-length run returns the initial state") {
    ScenarioConfig cfg;
    cfg.coefficients = mixed_coefficients();
    cfg.L = 8.0;
    cfg.N = 64;
    cfg.integrator.t_final = 0.0;
    cfg.integrator.dt = 0.0; // unused
    cfg.integrator.snapshot_times = {0.0};

    const Trajectory traj = evolve(cfg);
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(traj.snapshots[0].t == 0.0);
    REQUIRE(traj.series.size() == 1);

    const SpatialGrid g(cfg.L, cfg.N);
    const WignerField init = initial_field(cfg.kind, cfg.k, cfg.state, g);
    for (std::size_t i = 0; i < g.N; ++i) CHECK(traj.snapshots[0].wp[i] == init.wp[i]);
}
