#include "oqbm/pv.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oqbm/errors.hpp"

namespace oqbm {
namespace {

using Fn = std::function<double(double)>;

// Composite Simpson with a fixed even panel count. Deterministic.
double simpson(const Fn& f, double a, double b, int panels) {
    if (b <= a) return 0.0;
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + i * h) * ((i & 1) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double adaptive(const Fn& f, double a, double m, double b,
                double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on a pole-free segment; tolerance scales with the
// segment's own magnitude so wide spectral tails stay cheap but accurate.
double smooth_integral(const Fn& f, double a, double b) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = 1e-12 * (1.0 + std::abs(whole));
    return adaptive(f, a, m, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

PvResult principal_value_integral(const Fn& f, double pole, double a, double b, double eps0) {
    if (!(a < pole && pole < b))
        throw std::invalid_argument("principal_value_integral: pole must lie strictly inside (a, b)");
    const double width = b - a;
    const double delta = std::min(pole - a, b - pole);
    double eps = eps0 > 0.0 ? eps0 : 1e-2 * width;
    eps = std::min(eps, 0.25 * delta);
    if (!(eps > 0.0))
        throw std::invalid_argument("principal_value_integral: degenerate exclusion width");

    // The symmetric pair h(s) = f(pole+s) + f(pole-s) is smooth through s -> 0
    // for a simple pole, so I(eps) = int_eps^delta h + pole-free outer parts.
    const Fn h = [&](double s) { return f(pole + s) + f(pole - s); };
    const double outer = smooth_integral(f, a, pole - delta) +
                         smooth_integral(f, pole + delta, b);

    double I[3];
    for (int k = 0; k < 3; ++k) {
        const double e = eps / (1 << k);
        I[k] = outer + simpson(h, e, delta, 4096);
    }
    // I(eps) is analytic in eps, so first-order Richardson in steps of 2.
    const double r1 = 2.0 * I[1] - I[0];
    const double r2 = 2.0 * I[2] - I[1];
    const double r3 = (4.0 * r2 - r1) / 3.0;

    const double d01 = std::abs(I[1] - I[0]);
    const double d12 = std::abs(I[2] - I[1]);
    const double dr = std::abs(r2 - r1);
    const double scale = 1.0 + std::abs(r3);
    const bool converged = (dr <= 0.75 * d01 + 1e-12 * scale) || (d12 <= 1e-12 * scale);
    if (!converged) {
        std::ostringstream msg;
        msg << "principal_value_integral: epsilon sequence not converging; "
            << "I(eps)=" << I[0] << " I(eps/2)=" << I[1] << " I(eps/4)=" << I[2]
            << " residuals " << d01 << ", " << d12 << ", extrapolation gap " << dr;
        throw numerical_error(msg.str());
    }
    return {r3, std::max(std::abs(r3 - r2), 1e-14 * scale)};
}

} // namespace oqbm
