#include "mfbm/weyl.hpp"

#include <cmath>
#include <stdexcept>

namespace mfbm {

FracOrder FracOrder::of(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("FracOrder: alpha must lie in (0, 1/2)");
    return FracOrder{alpha};
}

FracOrder FracOrder::from(const HurstParam& hurst) {
    double a = hurst.alpha;
    if (!(a > 1.0 - hurst.H && a < 0.5))
        throw std::invalid_argument("FracOrder: alpha must lie in (1-H, 1/2) for this Hurst index");
    return FracOrder{a};
}

namespace {

void require_scalar(const GridPath& p, const char* who) {
    if (p.dims != 1)
        throw std::invalid_argument(std::string(who) + ": path must be scalar (dims == 1)");
    if (p.nodes() < 2)
        throw std::invalid_argument(std::string(who) + ": need at least two grid nodes");
}

} // namespace

GridPath weyl_forward(const GridPath& f, FracOrder order, double a, std::string* warning) {
    require_scalar(f, "weyl_forward");
    const double al = order.alpha;
    const int ia = node_index(f, a);
    const int n = f.nodes();
    if (ia >= n - 1)
        throw std::invalid_argument("weyl_forward: no grid nodes to the right of a");
    if (warning)
        *warning = "weyl_forward: node at t=a dropped (derivative singular at the base point)";

    const auto& tt = f.times;
    GridPath out(std::vector<double>(tt.begin() + ia + 1, tt.end()), 1);
    const double pre = 1.0 / std::tgamma(1.0 - al);

    for (int j = ia + 1; j < n; ++j) {
        const double t = tt[j], fj = f.at(j, 0);
        double sum = 0.0;
        for (int i = ia; i < j; ++i) {
            const double s0 = tt[i], s1 = tt[i + 1], dt = s1 - s0;
            const double lam = (f.at(i + 1, 0) - f.at(i, 0)) / dt;
            if (i == j - 1) {
                // f(t)-f(s) = lam (t-s) kills the singularity on the last cell
                sum += lam * std::pow(dt, 1.0 - al) / (1.0 - al);
                continue;
            }
            // int (A - lam (s-s0)) (t-s)^{-1-al} ds in closed form,
            // written in w = t-s with w0 >= w1 > 0
            const double w0 = t - s0, w1 = t - s1;
            const double A = fj - f.at(i, 0);
            const double j0 = (std::pow(w1, -al) - std::pow(w0, -al)) / al;
            const double j1 = w0 * j0
                - (std::pow(w0, 1.0 - al) - std::pow(w1, 1.0 - al)) / (1.0 - al);
            sum += A * j0 - lam * j1;
        }
        out.at(j - ia - 1, 0) = pre * (fj * std::pow(t - a, -al) + al * sum);
    }
    return out;
}

GridPath weyl_backward(const GridPath& g, FracOrder order, double b, std::string* warning) {
    require_scalar(g, "weyl_backward");
    const double al = order.alpha;
    const int ib = node_index(g, b);
    if (ib < 1)
        throw std::invalid_argument("weyl_backward: no grid nodes to the left of b");
    if (warning)
        *warning = "weyl_backward: node at t=b dropped (derivative singular at the base point)";

    const auto& tt = g.times;
    GridPath out(std::vector<double>(tt.begin(), tt.begin() + ib), 1);
    const double pre = -1.0 / std::tgamma(al);
    const double gb = g.at(ib, 0);

    for (int j = 0; j < ib; ++j) {
        const double t = tt[j], gj = g.at(j, 0);
        double sum = 0.0;
        for (int i = j; i < ib; ++i) {
            const double s0 = tt[i], s1 = tt[i + 1], dt = s1 - s0;
            const double lam = (g.at(i + 1, 0) - g.at(i, 0)) / dt;
            if (i == j) {
                // g(t)-g(s) = -lam (s-t) on the first cell
                sum -= lam * std::pow(dt, al) / al;
                continue;
            }
            // int (A - lam (s-s0)) (s-t)^{al-2} ds, written in w = s-t
            const double w0 = s0 - t, w1 = s1 - t;
            const double A = gj - g.at(i, 0);
            const double k0 = (std::pow(w0, al - 1.0) - std::pow(w1, al - 1.0)) / (1.0 - al);
            const double k1 = (std::pow(w1, al) - std::pow(w0, al)) / al - w0 * k0;
            sum += A * k0 - lam * k1;
        }
        out.at(j, 0) = pre * ((gj - gb) * std::pow(b - t, al - 1.0) + (1.0 - al) * sum);
    }
    return out;
}

} // namespace mfbm
