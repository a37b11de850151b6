#include "mfbm/volterra.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mfbm/quadrature.hpp"

namespace mfbm {

namespace {

using quad::adaptive_simpson;

void require_zero_start(const GridPath& p, const char* who) {
    if (p.times.empty() || p.times.front() != 0.0)
        throw std::invalid_argument(std::string(who) + ": grid must start at t=0");
}

// finite-difference derivative of one mode, centered inside, one-sided ends
std::vector<double> fd_derivative(const GridPath& u, int mode) {
    const auto& tt = u.times;
    size_t n = tt.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (u.at(1, mode) - u.at(0, mode)) / (tt[1] - tt[0]);
    d[n - 1] = (u.at(n - 1, mode) - u.at(n - 2, mode)) / (tt[n - 1] - tt[n - 2]);
    for (size_t i = 1; i + 1 < n; ++i)
        d[i] = (u.at(i + 1, mode) - u.at(i - 1, mode)) / (tt[i + 1] - tt[i - 1]);
    return d;
}

} // namespace

double volterra_kernel(const HurstParam& hurst, double t, double s) {
    if (!(s > 0.0))
        throw std::domain_error("volterra_kernel: s must be positive (kernel singular at s=0)");
    if (s >= t) return 0.0;
    if (hurst.is_classical()) return 1.0;
    const double H = hurst.H;
    // K(t,s) = c_H/Gamma(H+1/2) s^{1/2-H} [ ((t-s)t)^{H-1/2}
    //          - (H-1/2) int_s^t (u-s)^{H-1/2} u^{H-3/2} du ];
    // the integrand is continuous at u=s and the bracket tends to 1 as
    // H -> 1/2, which keeps the Brownian degeneracy exact to rounding
    double tail = adaptive_simpson(
        [&](double u) { return std::pow(u - s, H - 0.5) * std::pow(u, H - 1.5); }, s, t, 1e-12);
    double bracket = std::pow((t - s) * t, H - 0.5) - (H - 0.5) * tail;
    return hurst.c_h / std::tgamma(H + 0.5) * std::pow(s, 0.5 - H) * bracket;
}

double volterra_kernel_series(const HurstParam& hurst, double t, double s) {
    if (!(s > 0.0))
        throw std::domain_error("volterra_kernel_series: s must be positive");
    if (s >= t) return 0.0;
    if (hurst.is_classical()) return 1.0;
    const double H = hurst.H;
    const double w = 1.0 - s / t;
    const double a = H - 0.5, b = 2.0 * H, c = H + 0.5;
    double term = 1.0, sum = 1.0;
    for (long k = 0; k < 2000000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return hurst.c_h / std::tgamma(H + 0.5) * std::pow((t - s) * s / t, H - 0.5) * sum;
}

GridPath apply_KH(const HurstParam& hurst, const GridPath& hdot) {
    require_zero_start(hdot, "apply_KH");
    const auto& tt = hdot.times;
    const size_t n = tt.size();
    GridPath h(tt, hdot.dims);
    if (hurst.is_classical()) {
        // kernel identically 1 on the support: running trapezoid integral
        for (int mode = 0; mode < hdot.dims; ++mode) {
            double acc = 0.0;
            for (size_t j = 1; j < n; ++j) {
                acc += 0.5 * (hdot.at(j - 1, mode) + hdot.at(j, mode)) * (tt[j] - tt[j - 1]);
                h.set_value(j, mode, acc);
            }
        }
        return h;
    }
    const double H = hurst.H;
    const double pref = hurst.c_h / std::tgamma(H + 0.5);
    const double unit = hurst.c_h * std::tgamma(1.5 - H); // int_0^t K(t,s) ds = unit t^{H+1/2}/(H+1/2)
    std::vector<double> cell(n, 0.0);
    for (size_t j = 1; j < n; ++j) {
        const double t = tt[j];
        // per-cell weights against the midpoint value of hdot; the singular
        // kernel factors (s^{1/2-H} at the origin, (t-s)^{H-1/2} at s=t) are
        // integrated analytically on the cells where they live
        for (size_t i = 0; i < j; ++i) {
            double s0 = tt[i], s1 = tt[i + 1];
            double mid = 0.5 * (s0 + s1);
            double w;
            if (j == 1) {
                w = unit * std::pow(t, H + 0.5) / (H + 0.5); // exact for constant hdot
            } else if (i == 0) {
                // freeze the smooth part K(t,s) s^{H-1/2}, integrate s^{1/2-H}
                w = volterra_kernel(hurst, t, mid) * std::pow(mid, H - 0.5)
                    * std::pow(s1, 1.5 - H) / (1.5 - H);
            } else if (i == j - 1) {
                // leading kernel behaviour near s=t, (t-s)^{H-1/2} integrated exactly
                w = pref * std::pow(t, H - 0.5) * std::pow(mid, 0.5 - H)
                    * std::pow(s1 - s0, H + 0.5) / (H + 0.5);
            } else {
                w = volterra_kernel(hurst, t, mid) * (s1 - s0);
            }
            cell[i] = w;
        }
        for (int mode = 0; mode < hdot.dims; ++mode) {
            double acc = 0.0;
            for (size_t i = 0; i < j; ++i)
                acc += cell[i] * 0.5 * (hdot.at(i, mode) + hdot.at(i + 1, mode));
            h.set_value(j, mode, acc);
        }
    }
    return h;
}

GridPath cm_derivative(const HurstParam& hurst, const GridPath& hdot) {
    if (hurst.is_classical())
        throw std::domain_error("cm_derivative: needs H > 1/2 (at H = 1/2 the derivative is hdot itself)");
    require_zero_start(hdot, "cm_derivative");
    const auto& tt = hdot.times;
    const size_t n = tt.size();
    GridPath hp(tt, hdot.dims);
    const double H = hurst.H;
    const double cprime = hurst.c_h / std::tgamma(H - 0.5);
    const double beta_full = std::tgamma(1.5 - H) * std::tgamma(H - 0.5); // B(3/2-H, H-1/2)
    std::vector<double> cell(n, 0.0);
    for (size_t j = 1; j < n; ++j) {
        const double t = tt[j];
        const double outer = cprime * std::pow(t, H - 0.5);
        for (size_t i = 0; i < j; ++i) {
            double s0 = tt[i], s1 = tt[i + 1];
            double mid = 0.5 * (s0 + s1);
            double w;
            if (j == 1) {
                w = outer * beta_full; // exact Beta reduction for constant hdot
            } else if (i == 0) {
                w = outer * std::pow(t - mid, H - 1.5) * std::pow(s1, 1.5 - H) / (1.5 - H);
            } else if (i == j - 1) {
                w = outer * std::pow(mid, 0.5 - H) * std::pow(s1 - s0, H - 0.5) / (H - 0.5);
            } else {
                w = outer * std::pow(mid, 0.5 - H)
                    * (std::pow(t - s0, H - 0.5) - std::pow(t - s1, H - 0.5)) / (H - 0.5);
            }
            cell[i] = w;
        }
        for (int mode = 0; mode < hdot.dims; ++mode) {
            double acc = 0.0;
            for (size_t i = 0; i < j; ++i)
                acc += cell[i] * 0.5 * (hdot.at(i, mode) + hdot.at(i + 1, mode));
            hp.set_value(j, mode, acc);
        }
        // hp at t=0 stays 0: the t^{H-1/2} prefactor kills the limit for H>1/2
    }
    return hp;
}

GridPath apply_KH_inverse(const HurstParam& hurst, const GridPath& u, std::string* warning) {
    require_zero_start(u, "apply_KH_inverse");
    for (int mode = 0; mode < u.dims; ++mode)
        if (u.at(0, mode) != 0.0)
            throw std::invalid_argument("apply_KH_inverse: u(0) must be 0 (mode "
                                        + std::to_string(mode) + " is not)");
    const auto& tt = u.times;
    const size_t n = tt.size();
    if (warning && n < 8)
        *warning = "apply_KH_inverse: grid has fewer than 8 nodes; the singular "
                   "quadrature is first-order and this resolution is too coarse "
                   "for quantitative use";
    GridPath udot(tt, u.dims);
    if (hurst.is_classical()) {
        for (int mode = 0; mode < u.dims; ++mode) {
            auto d = fd_derivative(u, mode);
            for (size_t i = 0; i < n; ++i) udot.set_value(i, mode, d[i]);
        }
        return udot;
    }
    const double H = hurst.H;
    const double q = H + 0.5;
    const double unit = hurst.c_h * std::tgamma(1.5 - H);
    // kappa: the inverse of the straight line t is kappa s^{1/2-H}; from it the
    // exact constant-derivative weight of the first cell follows
    const double beta_tail = std::tgamma(2.0 - 2.0 * H) * std::tgamma(H - 0.5)
                             / std::tgamma(1.5 - H);                  // B(2-2H, H-1/2)
    const double cprime = hurst.c_h / std::tgamma(H - 0.5);
    const double kappa = 1.0 / (cprime * beta_tail);
    const double c0 = (kappa * unit - 1.0) / (H - 0.5); // singular-average of the line: S = c0 t^{1-2H} u'
    for (int mode = 0; mode < u.dims; ++mode) {
        std::vector<double> du = fd_derivative(u, mode);
        std::vector<double> psi(n, 0.0); // psi(s) = s^{1/2-H} u'(s), undefined at s=0
        for (size_t i = 1; i < n; ++i) psi[i] = std::pow(tt[i], 0.5 - H) * du[i];
        for (size_t j = 1; j < n; ++j) {
            const double t = tt[j];
            const double a = psi[j];
            double S = 0.0;
            if (j == 1) {
                S = c0 * std::pow(t, 1.0 - 2.0 * H) * 0.5 * (du[0] + du[1]);
            } else {
                for (size_t i = 0; i < j; ++i) {
                    double s0 = tt[i], s1 = tt[i + 1];
                    if (i == 0) {
                        // freeze (t-s)^{-q} mid-cell, integrate the s^{1/2-H} edge exactly
                        double mid = 0.5 * (s0 + s1);
                        double dmid = 0.5 * (du[0] + du[1]);
                        S += std::pow(t - mid, -q)
                             * (a * s1 - dmid * std::pow(s1, 1.5 - H) / (1.5 - H));
                    } else if (i == j - 1) {
                        // numerator vanishes linearly at s=t, integrate exactly
                        S += (a - psi[i]) * std::pow(s1 - s0, 0.5 - H) / (1.5 - H);
                    } else {
                        double w0 = t - s0, w1 = t - s1;
                        double i0 = (std::pow(w1, 1.0 - q) - std::pow(w0, 1.0 - q)) / (q - 1.0);
                        double i1 = w0 * i0 - (std::pow(w0, 2.0 - q) - std::pow(w1, 2.0 - q)) / (2.0 - q);
                        double dpsi = (psi[i + 1] - psi[i]) / (s1 - s0);
                        S += (a - psi[i]) * i0 - dpsi * i1;
                    }
                }
            }
            double v = (std::pow(t, 0.5 - H) * du[j] + (H - 0.5) * std::pow(t, H - 0.5) * S) / unit;
            udot.set_value(j, mode, v);
        }
        // the formula degenerates at t=0; extend by the first interior value
        udot.set_value(0, mode, udot.at(1, mode));
    }
    return udot;
}

} // namespace mfbm
