#include "mfbm/rs_integral.hpp"

#include <cmath>
#include <stdexcept>

#include "mfbm/quadrature.hpp"

namespace mfbm {

namespace {

double node_norm(const GridPath& p, int j) {
    double s = 0.0;
    for (int m = 0; m < p.dims; ++m) s += p.at(j, m) * p.at(j, m);
    return std::sqrt(s);
}

double diff_norm(const GridPath& p, int j, int i) {
    double s = 0.0;
    for (int m = 0; m < p.dims; ++m) {
        double d = p.at(j, m) - p.at(i, m);
        s += d * d;
    }
    return std::sqrt(s);
}

// I[j] = int_0^{t_j} |f(t_j)-f(s)| (t_j-s)^{-1-alpha} ds, the inner integral
// shared by three of the norms. |f(t_j)-f(.)| is taken piecewise linear
// through its node values; every cell then integrates in closed form, and the
// vanishing numerator kills the singularity on the cell touching t_j.
std::vector<double> inner_alpha_integrals(const GridPath& f, double al) {
    const auto& tt = f.times;
    const int n = f.nodes();
    std::vector<double> inner(n, 0.0);
    for (int j = 1; j < n; ++j) {
        const double t = tt[j];
        double sum = 0.0;
        for (int i = 0; i < j; ++i) {
            const double s0 = tt[i], s1 = tt[i + 1], dt = s1 - s0;
            const double gi = diff_norm(f, j, i);
            if (i == j - 1) {
                sum += gi * std::pow(dt, -al) / (1.0 - al);
                continue;
            }
            const double gi1 = diff_norm(f, j, i + 1);
            const double lam = (gi1 - gi) / dt;
            const double w0 = t - s0, w1 = t - s1;
            const double p0 = (std::pow(w1, -al) - std::pow(w0, -al)) / al;
            const double p1 = w0 * p0
                - (std::pow(w0, 1.0 - al) - std::pow(w1, 1.0 - al)) / (1.0 - al);
            sum += gi * p0 + lam * p1;
        }
        inner[j] = sum;
    }
    return inner;
}

} // namespace

NormReport path_norms(const GridPath& f, FracOrder order) {
    if (f.nodes() < 2)
        throw std::invalid_argument("path_norms: need at least two grid nodes");
    const double al = order.alpha;
    const auto& tt = f.times;
    const int n = f.nodes();
    NormReport rep;

    const std::vector<double> inner = inner_alpha_integrals(f, al);

    // sup norm and the two sup-based quantities
    double sup = 0.0, hold = 0.0;
    for (int j = 0; j < n; ++j) {
        sup = std::max(sup, node_norm(f, j));
        rep.w_alpha_inf = std::max(rep.w_alpha_inf, node_norm(f, j) + inner[j]);
        for (int i = 0; i < j; ++i)
            hold = std::max(hold, diff_norm(f, j, i) / std::pow(tt[j] - tt[i], 1.0 - al));
    }
    rep.holder = sup + hold;

    // ||f||_{alpha,1}: the weighted part per cell in closed form (the weight
    // s^{-alpha} is singular at the origin), the double-integral part by
    // trapezoid over the inner integrals
    double w1 = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double s0 = tt[i], s1 = tt[i + 1], dt = s1 - s0;
        const double n0 = node_norm(f, i);
        const double lam = (node_norm(f, i + 1) - n0) / dt;
        const double m0 = (std::pow(s1, 1.0 - al) - std::pow(s0, 1.0 - al)) / (1.0 - al);
        const double m1 = (std::pow(s1, 2.0 - al) - std::pow(s0, 2.0 - al)) / (2.0 - al) - s0 * m0;
        w1 += n0 * m0 + lam * m1;
        w1 += 0.5 * (inner[i] + inner[i + 1]) * dt;
    }
    rep.w_alpha_1 = w1;

    // sup over pairs s < t of |f(t)-f(s)|/(t-s)^{1-alpha}
    //   + int_s^t |f(z)-f(s)| (z-s)^{alpha-2} dz,
    // swept with a running integral per left endpoint to stay O(n^2)
    double lam_norm = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        double run = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double s0 = tt[j - 1], s1 = tt[j], dt = s1 - s0;
            const double gi = diff_norm(f, j - 1, i);
            if (j - 1 == i) {
                run += (diff_norm(f, j, i) / dt) * std::pow(dt, al) / al;
            } else {
                const double lam = (diff_norm(f, j, i) - gi) / dt;
                const double w0 = s0 - tt[i], w1b = s1 - tt[i];
                const double k0 =
                    (std::pow(w0, al - 1.0) - std::pow(w1b, al - 1.0)) / (1.0 - al);
                const double k1 = (std::pow(w1b, al) - std::pow(w0, al)) / al - w0 * k0;
                run += gi * k0 + lam * k1;
            }
            lam_norm = std::max(
                lam_norm, diff_norm(f, j, i) / std::pow(tt[j] - tt[i], 1.0 - al) + run);
        }
    }
    rep.lambda_g = lam_norm / (std::tgamma(1.0 - al) * std::tgamma(al));
    return rep;
}

double b_alpha2_norm(const GridPath& f, FracOrder order) {
    if (f.nodes() < 2)
        throw std::invalid_argument("b_alpha2_norm: need at least two grid nodes");
    const std::vector<double> inner = inner_alpha_integrals(f, order.alpha);
    double sup2 = 0.0, tail = 0.0;
    for (int j = 0; j < f.nodes(); ++j) {
        double nn = node_norm(f, j);
        sup2 = std::max(sup2, nn * nn);
        if (j > 0)
            tail += 0.5 * (inner[j - 1] * inner[j - 1] + inner[j] * inner[j])
                  * (f.times[j] - f.times[j - 1]);
    }
    return sup2 + tail;
}

namespace {

GridPath window_slice(const GridPath& p, int i0, int i1) {
    GridPath out(std::vector<double>(p.times.begin() + i0, p.times.begin() + i1 + 1), p.dims);
    for (int j = i0; j <= i1; ++j) {
        out.times[j - i0] -= p.times[i0];
        for (int m = 0; m < p.dims; ++m) out.at(j - i0, m) = p.at(j, m);
    }
    return out;
}

} // namespace

CoeffVector rs_integral(const GridPath& f, const GridPath& g, FracOrder order,
                        double s, double t, double norm_cap) {
    if (f.nodes() != g.nodes())
        throw std::invalid_argument("rs_integral: f and g must share the time grid");
    for (int j = 0; j < f.nodes(); ++j)
        if (std::abs(f.times[j] - g.times[j]) > 1e-9)
            throw std::invalid_argument("rs_integral: f and g must share the time grid");
    const int nf = f.dims, ng = g.dims;
    if (!(nf == ng || nf == 1 || ng == 1))
        throw std::invalid_argument("rs_integral: mode counts must match or be broadcastable");
    const int is = node_index(f, s), it = node_index(f, t);
    if (is >= it)
        throw std::invalid_argument("rs_integral: window must satisfy s < t");

    // existence check on the window: f needs a finite weighted alpha-norm,
    // g a finite (1-alpha)-type norm; values past the cap mean the
    // reconstruction is not integrable against this g
    const NormReport nf_rep = path_norms(window_slice(f, is, it), order);
    const NormReport ng_rep = path_norms(window_slice(g, is, it), order);
    if (!std::isfinite(nf_rep.w_alpha_1) || nf_rep.w_alpha_1 > norm_cap)
        throw std::range_error("rs_integral: ||f||_{alpha,1} over the window exceeds the cap");
    if (!std::isfinite(ng_rep.lambda_g) || ng_rep.lambda_g > norm_cap)
        throw std::range_error("rs_integral: Lambda_alpha(g) over the window exceeds the cap");

    const int nm = std::max(nf, ng);
    CoeffVector out(nm);
    for (int m = 0; m < nm; ++m) {
        const int mf = nf == 1 ? 0 : m, mg = ng == 1 ? 0 : m;
        double acc = 0.0;
        for (int i = is; i < it; ++i)
            acc += 0.5 * (f.at(i, mf) + f.at(i + 1, mf)) * (g.at(i + 1, mg) - g.at(i, mg));
        out[m] = acc;
    }
    return out;
}

CoeffVector rs_integral_operator(const std::function<CoeffVector(double, int)>& Gfam,
                                 const GridPath& u, FracOrder order) {
    if (u.nodes() < 2)
        throw std::invalid_argument("rs_integral_operator: need at least two grid nodes");
    const NormReport u_rep = path_norms(u, order);
    if (!std::isfinite(u_rep.lambda_g) || u_rep.lambda_g > kNormCap)
        throw std::range_error("rs_integral_operator: Lambda_alpha(u) exceeds the cap");

    const int n = u.nodes(), nm = u.dims;
    CoeffVector out;
    for (int m = 0; m < nm; ++m) {
        CoeffVector prev = Gfam(u.times[0], m);
        if (m == 0)
            out = CoeffVector(prev.dim());
        else if (prev.dim() != out.dim())
            throw std::invalid_argument("rs_integral_operator: operator range dimension mismatch");
        for (int i = 0; i + 1 < n; ++i) {
            CoeffVector cur = Gfam(u.times[i + 1], m);
            if (cur.dim() != out.dim())
                throw std::invalid_argument(
                    "rs_integral_operator: operator range dimension mismatch");
            const double du = u.at(i + 1, m) - u.at(i, m);
            for (int k = 0; k < out.dim(); ++k)
                out[k] += 0.5 * (prev[k] + cur[k]) * du;
            prev = std::move(cur);
        }
    }
    return out;
}

BetaBoundReport verify_beta_bounds(int samples, std::mt19937_64& rng, double exp_weight_cap) {
    if (samples < 1) throw std::invalid_argument("verify_beta_bounds: samples must be positive");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    BetaBoundReport rep;
    rep.exp_weight_cap = exp_weight_cap;
    rep.samples = samples;

    // convolution bounds on their admissible region a < 1, d < 1, a + d > 1
    for (int k = 0; k < samples; ++k) {
        const double a = 0.3 + 0.65 * uni(rng);
        const double dlo = std::max(1.02 - a, 0.05);
        const double d = dlo + (0.98 - dlo) * uni(rng);
        const double t = 0.2 + 1.8 * uni(rng);
        const double r = t * (0.05 + 0.9 * uni(rng));
        const double rhs = std::pow(t - r, 1.0 - a - d)
            * std::tgamma(1.0 - a) * std::tgamma(a + d - 1.0) / std::tgamma(d);

        const double lhs1 = quad::integrate_right_singular(
            [&](double s) { return std::pow(t - s, -d); }, 0.0, r, a, 1e-11);
        const double mid = 0.5 * (r + t);
        const double lhs2 = quad::integrate_left_singular(
                                [&](double s) { return std::pow(t - s, -d); }, r, mid, a, 1e-11)
            + quad::integrate_right_singular(
                  [&](double s) { return std::pow(s - r, -a); }, mid, t, d, 1e-11);

        rep.convolution_max_ratio =
            std::max({rep.convolution_max_ratio, lhs1 / rhs, lhs2 / rhs});
    }

    // exponentially weighted bound on a + d < 1; the integral is scale
    // invariant in (rho, t) jointly, so the cap has to hold uniformly in t
    auto exp_weighted = [](double a, double d, double rho, double t) {
        const double mid = 0.5 * t;
        double v = quad::integrate_right_singular(
            [&](double r) { return std::exp(-rho * (t - r)) * std::pow(r, -d); }, mid, t, a,
            1e-12);
        v += quad::integrate_left_singular(
            [&](double r) { return std::exp(-rho * (t - r)) * std::pow(t - r, -a); }, 0.0, mid,
            d, 1e-12);
        return v;
    };
    for (int k = 0; k < samples; ++k) {
        const double a = 0.45 * uni(rng);
        const double d = 0.45 * uni(rng);
        const double rho = std::pow(10.0, 3.0 * uni(rng));
        const double t = std::pow(2.0, -12.0 * uni(rng));
        const double val = exp_weighted(a, d, rho, t) * std::pow(rho, 1.0 - a - d);
        rep.exp_weight_max = std::max(rep.exp_weight_max, val);
    }

    // log-log slope of sup_t LHS against rho recovers the exponent a+d-1
    const double pairs[3][2] = {{0.0, 0.3}, {0.3, 0.0}, {0.25, 0.25}};
    for (const auto& pr : pairs) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const int nr = 4;
        for (int q = 0; q < nr; ++q) {
            const double rho = std::pow(4.0, q + 1);
            double sup = 0.0;
            for (int j = 0; j <= 12; ++j)
                sup = std::max(sup, exp_weighted(pr[0], pr[1], rho, std::pow(2.0, -j)));
            const double x = std::log(rho), y = std::log(sup);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double slope = (nr * sxy - sx * sy) / (nr * sxx - sx * sx);
        rep.slope_max_err =
            std::max(rep.slope_max_err, std::abs(slope - (pr[0] + pr[1] - 1.0)));
    }

    rep.passed = rep.convolution_max_ratio <= 1.0 + 1e-6
        && rep.exp_weight_max <= exp_weight_cap && rep.slope_max_err <= 0.1;
    return rep;
}

} // namespace mfbm
