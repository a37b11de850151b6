#pragma once
// small adaptive Simpson integrator shared by the kernel and bound-check code

#include <algorithm>
#include <cmath>

namespace mfbm::quad {

// Acceptance test carries a relative floor so intervals whose values dwarf
// the absolute target cannot recurse into rounding noise, and the halved
// tolerance is floored for the same reason.  Integrands must be finite on
// the closed interval; substitute away endpoint singularities before calling.
template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double err = left + right - whole;
    if (depth <= 0 || std::abs(err) < 15.0 * std::max(tol, 1e-14 * std::abs(whole)))
        return left + right + err / 15.0;
    double tol2 = std::max(0.5 * tol, 1e-15);
    return simpson_rec(f, a, m, fa, flm, fm, left, tol2, depth - 1)
         + simpson_rec(f, m, b, fm, frm, fb, right, tol2, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 28);
}

// integral of w(s) f(s) over [lo, hi] where w(s) = (s - lo)^{-a} is the only
// singular factor; substituting s = lo + tau^{1/(1-a)} absorbs it exactly
template <class F>
double integrate_left_singular(const F& f, double lo, double hi, double a, double tol) {
    if (!(hi > lo)) return 0.0;
    double p = 1.0 / (1.0 - a);
    double tmax = std::pow(hi - lo, 1.0 - a);
    return p * adaptive_simpson(
                   [&](double tau) {
                       double s = lo + std::pow(tau, p);
                       return f(s);
                   },
                   0.0, tmax, tol);
}

// same with w(s) = (hi - s)^{-a}
template <class F>
double integrate_right_singular(const F& f, double lo, double hi, double a, double tol) {
    if (!(hi > lo)) return 0.0;
    double p = 1.0 / (1.0 - a);
    double tmax = std::pow(hi - lo, 1.0 - a);
    return p * adaptive_simpson(
                   [&](double tau) {
                       double s = hi - std::pow(tau, p);
                       return f(s);
                   },
                   0.0, tmax, tol);
}

} // namespace mfbm::quad
