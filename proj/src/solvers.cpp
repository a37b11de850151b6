#include "mfbm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfbm {
namespace {

constexpr double kDivergenceGuard = 1e12;
constexpr double kGridTol = 1e-9;

void require_vector(const char* who, const SpectralSpace& space, const CoeffVector& x,
                    const char* name) {
    if (x.dim() != space.dim())
        throw std::invalid_argument(std::string(who) + ": " + name + " has " +
                                    std::to_string(x.dim()) + " modes, space has " +
                                    std::to_string(space.dim()));
}

void require_path(const char* who, const SpectralSpace& space, const GridPath& p,
                  const char* name) {
    if (p.nodes() < 2)
        throw std::invalid_argument(std::string(who) + ": " + name + " needs at least 2 nodes");
    if (p.dim() != space.dim())
        throw std::invalid_argument(std::string(who) + ": " + name + " has " +
                                    std::to_string(p.dim()) + " modes, space has " +
                                    std::to_string(space.dim()));
}

void require_same_grid(const char* who, const GridPath& a, const GridPath& b, const char* name) {
    if (a.nodes() != b.nodes())
        throw std::invalid_argument(std::string(who) + ": " + name + " node count " +
                                    std::to_string(b.nodes()) + " does not match carrier grid " +
                                    std::to_string(a.nodes()));
    for (int i = 0; i < a.nodes(); ++i)
        if (std::abs(a.times[static_cast<std::size_t>(i)] - b.times[static_cast<std::size_t>(i)]) >
            kGridTol)
            throw std::invalid_argument(std::string(who) + ": " + name +
                                        " grid deviates from the carrier grid at node " +
                                        std::to_string(i));
}

void require_finite_path(const char* who, const GridPath& p, const char* name) {
    for (double v : p.data)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(who) + ": " + name +
                                        " has non-finite values (infinite control norm)");
}

// fast grid must contain every slow node; returns the fast index of each
// slow node and enforces the stiffness bound step <= delta/4
std::vector<int> align_grids(const char* who, const std::vector<double>& slow,
                             const std::vector<double>& fast, double delta) {
    if (std::abs(slow.front() - fast.front()) > kGridTol ||
        std::abs(slow.back() - fast.back()) > kGridTol)
        throw std::invalid_argument(std::string(who) + ": slow and fast grids span different intervals");
    double max_step = 0.0;
    for (std::size_t j = 0; j + 1 < fast.size(); ++j) {
        const double h = fast[j + 1] - fast[j];
        if (h <= 0.0)
            throw std::invalid_argument(std::string(who) + ": fast grid not strictly increasing");
        max_step = std::max(max_step, h);
    }
    if (max_step > 0.25 * delta + 1e-12) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s: fast grid step %.6g too coarse for delta = %.6g; need step <= %.6g",
                      who, max_step, delta, 0.25 * delta);
        throw std::invalid_argument(buf);
    }
    std::vector<int> base(slow.size());
    std::size_t j = 0;
    for (std::size_t k = 0; k < slow.size(); ++k) {
        while (j + 1 < fast.size() && fast[j] < slow[k] - kGridTol) ++j;
        if (std::abs(fast[j] - slow[k]) > kGridTol)
            throw std::invalid_argument(std::string(who) +
                                        ": fast grid does not refine the slow grid (slow node " +
                                        std::to_string(k) + " missing)");
        base[k] = static_cast<int>(j);
    }
    return base;
}

void guard_state(const char* who, const std::vector<double>& x, const std::vector<double>& y,
                 double t) {
    for (double v : x)
        if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard) {
            char buf[120];
            std::snprintf(buf, sizeof(buf), "%s: slow trajectory diverged at t = %.6g", who, t);
            throw SolverDivergence(buf, t);
        }
    for (double v : y)
        if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard) {
            char buf[120];
            std::snprintf(buf, sizeof(buf), "%s: fast trajectory diverged at t = %.6g", who, t);
            throw SolverDivergence(buf, t);
        }
}

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct PairInputs {
    const char* who;
    const SpectralSpace& space;
    const CoefficientSystem& coeffs;
    const ScaleParams& scales;
    const GridPath* u;           // slow control on the slow grid, may be null
    const GridPath* v;           // fast control on the fast grid, may be null
    const GridPath& bh;
    const GridPath& w;
    const CoeffVector& x0;
    const CoeffVector& y0;
    const GridPath* frozen_slow; // block-frozen slow argument (auxiliary pass)
    bool slow_noise;             // add the sqrt(epsilon) g(X) dB^H kicks
};

// Shared march for the coupled pair. Exponential Heun in the drift; the
// sqrt(epsilon) g(X) dB^H and g(X) du kicks enter at the start of each slow
// cell so the substep semigroup factors damp them across the whole cell; the
// fast noise G dW / sqrt(delta) and shift G dv / sqrt(delta epsilon) enter
// per substep inside the predictor, damped by the substep factor.
SolveResult integrate_pair(const PairInputs& in) {
    const char* who = in.who;
    const int dim = in.space.dim();
    in.scales.validate();
    require_vector(who, in.space, in.x0, "x0");
    require_vector(who, in.space, in.y0, "y0");
    require_path(who, in.space, in.bh, "bh");
    require_path(who, in.space, in.w, "w");
    if (in.u) {
        require_path(who, in.space, *in.u, "u");
        require_same_grid(who, in.bh, *in.u, "u");
        require_finite_path(who, *in.u, "u");
    }
    if (in.v) {
        require_path(who, in.space, *in.v, "v");
        require_same_grid(who, in.w, *in.v, "v");
        require_finite_path(who, *in.v, "v");
        if (in.scales.epsilon <= 0.0)
            throw std::invalid_argument(std::string(who) +
                                        ": fast control needs epsilon > 0 (dv carries 1/sqrt(delta epsilon))");
    }
    const std::vector<int> base = align_grids(who, in.bh.times, in.w.times, in.scales.delta);

    const double delta = in.scales.delta;
    const double block = in.scales.block;
    if (in.frozen_slow) {
        double slow_step = 0.0;
        for (std::size_t k = 0; k + 1 < in.bh.times.size(); ++k)
            slow_step = std::max(slow_step, in.bh.times[k + 1] - in.bh.times[k]);
        if (block < slow_step - 1e-12)
            throw std::invalid_argument(std::string(who) + ": freezing block " +
                                        std::to_string(block) + " smaller than the slow grid step " +
                                        std::to_string(slow_step));
    }

    GridPath slow_out = zero_path(in.bh.times, dim);
    GridPath fast_out = zero_path(in.w.times, dim);
    SolveDiagnostics diag;
    diag.slow_norms.reserve(in.bh.times.size());
    diag.fast_norms.reserve(in.bh.times.size());

    CoeffVector X = in.x0, Y = in.y0;
    slow_out.set_value(0, X);
    fast_out.set_value(0, Y);
    diag.slow_norms.push_back(l2(X.coords));
    diag.fast_norms.push_back(l2(Y.coords));

    const double se = std::sqrt(std::max(in.scales.epsilon, 0.0));
    const double sdelta = std::sqrt(delta);
    const double sde = std::sqrt(delta * std::max(in.scales.epsilon, 0.0));
    const std::vector<double>& lam = in.space.eigenvalues;

    // exponential factors, recomputed only when the substep width changes
    double cached_h = -1.0;
    std::vector<double> eX(static_cast<std::size_t>(dim)), eY(static_cast<std::size_t>(dim));
    auto refresh = [&](double h) {
        if (h == cached_h) return;
        cached_h = h;
        for (int m = 0; m < dim; ++m) {
            eX[static_cast<std::size_t>(m)] = std::exp(-lam[static_cast<std::size_t>(m)] * h);
            eY[static_cast<std::size_t>(m)] = std::exp(-lam[static_cast<std::size_t>(m)] * h / delta);
        }
    };

    double frozen_t = -1.0;
    CoeffVector frozen_x;

    CoeffVector Xp(dim), Yp(dim);
    std::vector<double> noiY(static_cast<std::size_t>(dim));

    const int cells = in.bh.nodes() - 1;
    for (int k = 0; k < cells; ++k) {
        // slow-cell kick: noise and control increments of this cell applied
        // at its start, weighted by g at the current state (left point)
        const CoeffVector gx = in.coeffs.g_diag(X);
        for (int m = 0; m < dim; ++m) {
            double kick = 0.0;
            if (in.slow_noise) kick += se * gx[m] * (in.bh.at(k + 1, m) - in.bh.at(k, m));
            if (in.u) kick += gx[m] * (in.u->at(k + 1, m) - in.u->at(k, m));
            X.coords[static_cast<std::size_t>(m)] += kick;
        }

        diag.max_substeps = std::max(diag.max_substeps, base[static_cast<std::size_t>(k) + 1] -
                                                            base[static_cast<std::size_t>(k)]);
        for (int j = base[static_cast<std::size_t>(k)]; j < base[static_cast<std::size_t>(k) + 1];
             ++j) {
            const double t0 = in.w.times[static_cast<std::size_t>(j)];
            const double h = in.w.times[static_cast<std::size_t>(j) + 1] - t0;
            refresh(h);

            const CoeffVector* xa = &X;
            if (in.frozen_slow) {
                const double tm = std::floor((t0 + 1e-12) / block) * block;
                if (tm != frozen_t) {
                    frozen_t = tm;
                    frozen_x = interp(*in.frozen_slow, tm);
                }
                xa = &frozen_x;
            }

            const CoeffVector b1 = in.coeffs.b(*xa, Y);
            const CoeffVector F1 = in.coeffs.F(*xa, Y);
            const CoeffVector G1 = in.coeffs.G_diag(*xa, Y);
            for (int m = 0; m < dim; ++m) {
                double dn = (in.w.at(j + 1, m) - in.w.at(j, m)) / sdelta;
                if (in.v) dn += (in.v->at(j + 1, m) - in.v->at(j, m)) / sde;
                noiY[static_cast<std::size_t>(m)] = G1[m] * dn;
                Xp.coords[static_cast<std::size_t>(m)] =
                    eX[static_cast<std::size_t>(m)] * (X[m] + h * b1[m]);
                Yp.coords[static_cast<std::size_t>(m)] =
                    eY[static_cast<std::size_t>(m)] *
                    (Y[m] + (h / delta) * F1[m] + noiY[static_cast<std::size_t>(m)]);
            }
            const CoeffVector& xb = in.frozen_slow ? *xa : Xp;
            const CoeffVector b2 = in.coeffs.b(xb, Yp);
            const CoeffVector F2 = in.coeffs.F(xb, Yp);
            for (int m = 0; m < dim; ++m) {
                const double ex = eX[static_cast<std::size_t>(m)];
                const double ey = eY[static_cast<std::size_t>(m)];
                X.coords[static_cast<std::size_t>(m)] =
                    ex * X[m] + 0.5 * h * (ex * b1[m] + b2[m]);
                Y.coords[static_cast<std::size_t>(m)] =
                    ey * Y[m] + (0.5 * h / delta) * (ey * F1[m] + F2[m]) +
                    ey * noiY[static_cast<std::size_t>(m)];
            }
            guard_state(who, X.coords, Y.coords, in.w.times[static_cast<std::size_t>(j) + 1]);
            fast_out.set_value(j + 1, Y);
        }
        slow_out.set_value(k + 1, X);
        diag.slow_norms.push_back(l2(X.coords));
        diag.fast_norms.push_back(l2(Y.coords));
    }

    SolveResult out;
    out.slow = std::move(slow_out);
    out.fast = std::move(fast_out);
    out.diagnostics = std::move(diag);
    return out;
}

} // namespace

void ScaleParams::validate() const {
    if (!(epsilon >= 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("ScaleParams: epsilon must lie in [0, 1), got " +
                                    std::to_string(epsilon));
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("ScaleParams: delta must lie in (0, 1), got " +
                                    std::to_string(delta));
    if (!(h_eps > 0.0))
        throw std::invalid_argument("ScaleParams: deviation speed h(epsilon) must be positive");
    if (block < 0.0)
        throw std::invalid_argument("ScaleParams: freezing block must be nonnegative");
}

SolveResult solve_controlled(const SpectralSpace& space, const CoefficientSystem& coeffs,
                             const ScaleParams& scales, const GridPath& u, const GridPath& v,
                             const GridPath& bh, const GridPath& w, const CoeffVector& x0,
                             const CoeffVector& y0) {
    PairInputs in{"solve_controlled", space,
                  coeffs,             scales,
                  u.nodes() > 0 ? &u : nullptr, v.nodes() > 0 ? &v : nullptr,
                  bh,                 w,
                  x0,                 y0,
                  nullptr,            true};
    return integrate_pair(in);
}

SolveResult solve_slow_fast(const SpectralSpace& space, const CoefficientSystem& coeffs,
                            const ScaleParams& scales, const GridPath& bh, const GridPath& w,
                            const CoeffVector& x0, const CoeffVector& y0) {
    // explicit zero controls so the controlled and uncontrolled runs walk the
    // same code path and agree bit for bit
    const GridPath zu = zero_path(bh.times, space.dim());
    const GridPath zv = zero_path(w.times, space.dim());
    PairInputs in{"solve_slow_fast", space, coeffs, scales, &zu, &zv, bh, w, x0, y0, nullptr, true};
    return integrate_pair(in);
}

SolveResult solve_khasminskii_auxiliary(const SpectralSpace& space, const CoefficientSystem& coeffs,
                                        const ScaleParams& scales, const GridPath& u,
                                        const GridPath& v, const GridPath& bh, const GridPath& w,
                                        const CoeffVector& x0, const CoeffVector& y0) {
    if (!(scales.block > 0.0))
        throw std::invalid_argument("solve_khasminskii_auxiliary: freezing block must be positive");
    // first pass: the controlled pair whose slow path gets frozen
    SolveResult tilde = solve_controlled(space, coeffs, scales, u, v, bh, w, x0, y0);
    // second pass: slow arguments pinned to the last block boundary, no slow
    // noise, no fast shift; the slow control kick stays
    PairInputs in{"solve_khasminskii_auxiliary",
                  space,
                  coeffs,
                  scales,
                  u.nodes() > 0 ? &u : nullptr,
                  nullptr,
                  bh,
                  w,
                  x0,
                  y0,
                  &tilde.slow,
                  false};
    return integrate_pair(in);
}

GridPath solve_frozen(const SpectralSpace& space, const CoefficientSystem& coeffs,
                      const CoeffVector& x, const GridPath& w, const CoeffVector& y0) {
    const char* who = "solve_frozen";
    const int dim = space.dim();
    require_vector(who, space, x, "x");
    require_vector(who, space, y0, "y0");
    require_path(who, space, w, "w");

    GridPath out = zero_path(w.times, dim);
    CoeffVector Y = y0, Yp(dim);
    out.set_value(0, Y);
    std::vector<double> e(static_cast<std::size_t>(dim)), noi(static_cast<std::size_t>(dim));
    double cached_h = -1.0;

    for (int j = 0; j + 1 < w.nodes(); ++j) {
        const double h = w.times[static_cast<std::size_t>(j) + 1] - w.times[static_cast<std::size_t>(j)];
        if (h <= 0.0) throw std::invalid_argument("solve_frozen: grid not strictly increasing");
        if (h != cached_h) {
            cached_h = h;
            for (int m = 0; m < dim; ++m)
                e[static_cast<std::size_t>(m)] = std::exp(-space.eigenvalues[static_cast<std::size_t>(m)] * h);
        }
        const CoeffVector F1 = coeffs.F(x, Y);
        const CoeffVector G1 = coeffs.G_diag(x, Y);
        for (int m = 0; m < dim; ++m) {
            noi[static_cast<std::size_t>(m)] = G1[m] * (w.at(j + 1, m) - w.at(j, m));
            Yp.coords[static_cast<std::size_t>(m)] =
                e[static_cast<std::size_t>(m)] * (Y[m] + h * F1[m] + noi[static_cast<std::size_t>(m)]);
        }
        const CoeffVector F2 = coeffs.F(x, Yp);
        for (int m = 0; m < dim; ++m) {
            const double em = e[static_cast<std::size_t>(m)];
            Y.coords[static_cast<std::size_t>(m)] =
                em * Y[m] + 0.5 * h * (em * F1[m] + F2[m]) + em * noi[static_cast<std::size_t>(m)];
        }
        guard_state(who, x.coords, Y.coords, w.times[static_cast<std::size_t>(j) + 1]);
        out.set_value(j + 1, Y);
    }
    return out;
}

GridPath solve_averaged(const SpectralSpace& space,
                        const std::function<CoeffVector(const CoeffVector&)>& bbar,
                        const std::vector<double>& times, const CoeffVector& x0) {
    const char* who = "solve_averaged";
    const int dim = space.dim();
    require_vector(who, space, x0, "x0");
    if (times.size() < 2) throw std::invalid_argument("solve_averaged: need at least 2 nodes");
    if (!bbar) throw std::invalid_argument("solve_averaged: averaged drift not available");

    const double lam_max = space.eigenvalues.back();
    double max_step = 0.0;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) max_step = std::max(max_step, times[j + 1] - times[j]);
    if (lam_max * max_step > 2.5) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s: step %.6g unstable for eigenvalue %.6g; need step <= %.6g", who,
                      max_step, lam_max, 2.5 / lam_max);
        throw std::invalid_argument(buf);
    }

    auto rhs = [&](const CoeffVector& x) {
        CoeffVector r = bbar(x);
        if (r.dim() != dim) throw std::invalid_argument("solve_averaged: bbar returned wrong dimension");
        for (int m = 0; m < dim; ++m) r.coords[static_cast<std::size_t>(m)] -=
            space.eigenvalues[static_cast<std::size_t>(m)] * x[m];
        return r;
    };

    GridPath out = zero_path(times, dim);
    CoeffVector X = x0;
    out.set_value(0, X);
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
        const double h = times[j + 1] - times[j];
        const CoeffVector k1 = rhs(X);
        CoeffVector s(dim);
        for (int m = 0; m < dim; ++m) s.coords[static_cast<std::size_t>(m)] = X[m] + 0.5 * h * k1[m];
        const CoeffVector k2 = rhs(s);
        for (int m = 0; m < dim; ++m) s.coords[static_cast<std::size_t>(m)] = X[m] + 0.5 * h * k2[m];
        const CoeffVector k3 = rhs(s);
        for (int m = 0; m < dim; ++m) s.coords[static_cast<std::size_t>(m)] = X[m] + h * k3[m];
        const CoeffVector k4 = rhs(s);
        for (int m = 0; m < dim; ++m)
            X.coords[static_cast<std::size_t>(m)] +=
                h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        guard_state(who, X.coords, X.coords, times[j + 1]);
        out.set_value(static_cast<int>(j) + 1, X);
    }
    return out;
}

GridPath solve_skeleton_ldp(const SpectralSpace& space,
                            const std::function<CoeffVector(const CoeffVector&)>& bbar,
                            const std::function<CoeffVector(const CoeffVector&)>& g_diag,
                            const GridPath& u, const CoeffVector& x0) {
    const char* who = "solve_skeleton_ldp";
    const int dim = space.dim();
    require_vector(who, space, x0, "x0");
    require_path(who, space, u, "u");
    require_finite_path(who, u, "u");
    if (!bbar || !g_diag) throw std::invalid_argument("solve_skeleton_ldp: drift or diffusion missing");

    GridPath out = zero_path(u.times, dim);
    CoeffVector X = x0, Xp(dim);
    out.set_value(0, X);
    std::vector<double> e(static_cast<std::size_t>(dim));
    double cached_h = -1.0;

    for (int j = 0; j + 1 < u.nodes(); ++j) {
        const double h = u.times[static_cast<std::size_t>(j) + 1] - u.times[static_cast<std::size_t>(j)];
        if (h <= 0.0) throw std::invalid_argument("solve_skeleton_ldp: grid not strictly increasing");
        if (h != cached_h) {
            cached_h = h;
            for (int m = 0; m < dim; ++m)
                e[static_cast<std::size_t>(m)] = std::exp(-space.eigenvalues[static_cast<std::size_t>(m)] * h);
        }
        const CoeffVector b1 = bbar(X);
        const CoeffVector g1 = g_diag(X);
        for (int m = 0; m < dim; ++m) {
            const double du = u.at(j + 1, m) - u.at(j, m);
            Xp.coords[static_cast<std::size_t>(m)] =
                e[static_cast<std::size_t>(m)] * (X[m] + h * b1[m] + g1[m] * du);
        }
        const CoeffVector b2 = bbar(Xp);
        const CoeffVector g2 = g_diag(Xp);
        for (int m = 0; m < dim; ++m) {
            const double em = e[static_cast<std::size_t>(m)];
            const double du = u.at(j + 1, m) - u.at(j, m);
            X.coords[static_cast<std::size_t>(m)] = em * X[m] + 0.5 * h * (em * b1[m] + b2[m]) +
                                                    0.5 * (em * g1[m] * du + g2[m] * du);
        }
        guard_state(who, X.coords, X.coords, u.times[static_cast<std::size_t>(j) + 1]);
        out.set_value(j + 1, X);
    }
    return out;
}

GridPath solve_skeleton_mdp(const SpectralSpace& space, const GridPath& xbar,
                            const std::function<CoeffVector(const CoeffVector&, const CoeffVector&)>& dbbar,
                            const std::function<CoeffVector(const CoeffVector&)>& g_diag,
                            const GridPath& u) {
    const char* who = "solve_skeleton_mdp";
    const int dim = space.dim();
    require_path(who, space, u, "u");
    require_path(who, space, xbar, "xbar");
    require_same_grid(who, u, xbar, "xbar");
    require_finite_path(who, u, "u");
    if (!dbbar)
        throw std::invalid_argument(
            "solve_skeleton_mdp: family has no registered averaged-drift derivative");
    if (!g_diag) throw std::invalid_argument("solve_skeleton_mdp: diffusion missing");

    GridPath out = zero_path(u.times, dim);
    CoeffVector Z(dim), Zp(dim);
    out.set_value(0, Z);
    std::vector<double> e(static_cast<std::size_t>(dim));
    double cached_h = -1.0;

    for (int j = 0; j + 1 < u.nodes(); ++j) {
        const double h = u.times[static_cast<std::size_t>(j) + 1] - u.times[static_cast<std::size_t>(j)];
        if (h <= 0.0) throw std::invalid_argument("solve_skeleton_mdp: grid not strictly increasing");
        if (h != cached_h) {
            cached_h = h;
            for (int m = 0; m < dim; ++m)
                e[static_cast<std::size_t>(m)] = std::exp(-space.eigenvalues[static_cast<std::size_t>(m)] * h);
        }
        const CoeffVector xb0 = xbar.value(j);
        const CoeffVector xb1 = xbar.value(j + 1);
        const CoeffVector b1 = dbbar(xb0, Z);
        const CoeffVector g1 = g_diag(xb0);
        for (int m = 0; m < dim; ++m) {
            const double du = u.at(j + 1, m) - u.at(j, m);
            Zp.coords[static_cast<std::size_t>(m)] =
                e[static_cast<std::size_t>(m)] * (Z[m] + h * b1[m] + g1[m] * du);
        }
        const CoeffVector b2 = dbbar(xb1, Zp);
        const CoeffVector g2 = g_diag(xb1);
        for (int m = 0; m < dim; ++m) {
            const double em = e[static_cast<std::size_t>(m)];
            const double du = u.at(j + 1, m) - u.at(j, m);
            Z.coords[static_cast<std::size_t>(m)] = em * Z[m] + 0.5 * h * (em * b1[m] + b2[m]) +
                                                    0.5 * (em * g1[m] * du + g2[m] * du);
        }
        guard_state(who, Z.coords, Z.coords, u.times[static_cast<std::size_t>(j) + 1]);
        out.set_value(j + 1, Z);
    }
    return out;
}

GridPath deviation_path(const GridPath& x, const GridPath& xbar, const ScaleParams& scales) {
    scales.validate();
    if (scales.epsilon <= 0.0)
        throw std::invalid_argument("deviation_path: epsilon must be positive");
    if (x.dim() != xbar.dim())
        throw std::invalid_argument("deviation_path: mode counts differ");
    require_same_grid("deviation_path", x, xbar, "xbar");
    const double scale = 1.0 / (std::sqrt(scales.epsilon) * scales.h_eps);
    GridPath out = zero_path(x.times, x.dim());
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = scale * (x.data[i] - xbar.data[i]);
    return out;
}

std::vector<double> SimSetup::slow_times() const { return uniform_grid(0.0, T, slow_steps); }

std::vector<double> SimSetup::fast_times() const {
    return uniform_grid(0.0, T, slow_steps * substeps);
}

void SimSetup::validate(const SpectralSpace& space, const ScaleParams& scales) const {
    scales.validate();
    q1.validate(space.dim());
    q2.validate(space.dim());
    if (!(T > 0.0)) throw std::invalid_argument("SimSetup: horizon T must be positive");
    if (slow_steps < 1 || substeps < 1)
        throw std::invalid_argument("SimSetup: step counts must be positive");
    if (x0.dim() != space.dim() || y0.dim() != space.dim())
        throw std::invalid_argument("SimSetup: initial values do not match the space dimension");
    const double fast_step = T / (static_cast<double>(slow_steps) * substeps);
    if (fast_step > 0.25 * scales.delta + 1e-12) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "SimSetup: fast step %.6g exceeds delta/4 = %.6g; need substeps >= %d",
                      fast_step, 0.25 * scales.delta, required_substeps(T, slow_steps, scales.delta));
        throw std::invalid_argument(buf);
    }
}

int required_substeps(double T, int slow_steps, double delta) {
    const double need = 4.0 * T / (static_cast<double>(slow_steps) * delta);
    return std::max(1, static_cast<int>(std::ceil(need - 1e-12)));
}

} // namespace mfbm
