#pragma once
// Two-scale mild-solution integrators: the coupled slow/fast system, its
// controlled shifts, the frozen fast equation, the averaged limit, and the
// deviation-principle skeleton equations.

#include "mfbm/coefficients.hpp"
#include "mfbm/fbm.hpp"
#include "mfbm/grid.hpp"
#include "mfbm/spectral.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfbm {

// scale separation of one experiment: slow noise intensity epsilon, fast
// time scale delta, and the deviation speed h(epsilon) (1 outside moderate-
// deviation runs). block is the freezing length of the auxiliary
// construction and is ignored by the other solvers.
struct ScaleParams {
    double epsilon = 0.1;
    double delta = 0.01;
    double h_eps = 1.0;
    double block = 0.0;

    double ratio() const { return delta / epsilon; }
    void validate() const;
};

struct SolveDiagnostics {
    std::vector<double> slow_norms; // ||X|| at the slow nodes
    std::vector<double> fast_norms; // ||Y|| at the slow nodes
    int max_substeps = 0;           // fast substeps in the widest slow cell
    bool aborted = false;
    double abort_time = 0.0;
    std::string note;
};

struct SolveResult {
    GridPath slow;        // X on the slow grid
    GridPath fast;        // Y on the fast grid; empty when the solver has no Y
    SolveDiagnostics diagnostics;

    bool has_fast() const { return fast.nodes() > 0; }
};

// Trajectory blow-up (norm above the divergence guard or non-finite values).
// Monte Carlo drivers catch this and count the replica as aborted instead of
// crashing the sweep.
struct SolverDivergence : std::runtime_error {
    SolverDivergence(const std::string& msg, double t) : std::runtime_error(msg), time(t) {}
    double time;
};

// Controlled system: the slow equation gains the shift g(X) du on the slow
// grid, the fast one G(X,Y) dv / sqrt(delta epsilon) on the fast grid.
//
// Grids: bh (and u) live on the slow grid, w (and v) on the fast grid. The
// fast grid must refine the slow one, with step at most delta/4; the scalar
// noise B^H is spread over the substeps of a slow cell in equal shares. The
// sqrt(epsilon) g(X) dB^H and g(X) du kicks enter at the start of each slow
// cell, so the semigroup factors accumulated across its substeps damp them
// exactly as the mild form prescribes; the drift advances by second-order
// exponential Heun steps.
//
// u and v may be empty paths (no control). Controls must share grids with
// their noises and all mode counts must match the space.
SolveResult solve_controlled(const SpectralSpace& space, const CoefficientSystem& coeffs,
                             const ScaleParams& scales, const GridPath& u, const GridPath& v,
                             const GridPath& bh, const GridPath& w, const CoeffVector& x0,
                             const CoeffVector& y0);

// The uncontrolled system; forwards to solve_controlled with zero controls
// on the matching grids, so the two agree bit for bit on the same noise.
SolveResult solve_slow_fast(const SpectralSpace& space, const CoefficientSystem& coeffs,
                            const ScaleParams& scales, const GridPath& bh, const GridPath& w,
                            const CoeffVector& x0, const CoeffVector& y0);

// Frozen fast equation dY = (-Lambda Y + F(x, Y)) dt + G(x, Y) dW on the
// grid of w, in fast time (no delta rescaling). Used by the averaging engine.
GridPath solve_frozen(const SpectralSpace& space, const CoefficientSystem& coeffs,
                      const CoeffVector& x, const GridPath& w, const CoeffVector& y0);

// Averaged limit equation dX = (-Lambda X + bbar(X)) dt by classical RK4.
// Refuses steps with lambda_max * step > 2.5 (stability), naming the
// required step in the error.
GridPath solve_averaged(const SpectralSpace& space,
                        const std::function<CoeffVector(const CoeffVector&)>& bbar,
                        const std::vector<double>& times, const CoeffVector& x0);

// Auxiliary construction with block-frozen slow input: first solves the
// controlled pair (X tilde, Y tilde) on the given noises and controls, then
// integrates a second pair in which the slow argument of b, F, G is X tilde
// evaluated at the last block boundary floor(t / block) * block, the slow
// equation keeps the g(X hat) du shift but drops the sqrt(epsilon) dB^H
// noise, and the fast equation keeps dW but drops the dv shift. Requires
// scales.block >= the slow grid step.
SolveResult solve_khasminskii_auxiliary(const SpectralSpace& space, const CoefficientSystem& coeffs,
                                        const ScaleParams& scales, const GridPath& u,
                                        const GridPath& v, const GridPath& bh, const GridPath& w,
                                        const CoeffVector& x0, const CoeffVector& y0);

// Large-deviation skeleton dX = (-Lambda X + bbar(X)) dt + g(X) du on the
// grid of u (exponential Heun drift, trapezoid control increment). With
// u = 0 this reproduces the averaged equation up to the scheme difference.
GridPath solve_skeleton_ldp(const SpectralSpace& space,
                            const std::function<CoeffVector(const CoeffVector&)>& bbar,
                            const std::function<CoeffVector(const CoeffVector&)>& g_diag,
                            const GridPath& u, const CoeffVector& x0);

// Moderate-deviation skeleton dZ = (-Lambda Z + Dbbar(xbar) Z) dt
// + g(xbar) du, linear in (Z, u), started at zero. xbar must live on the
// grid of u.
GridPath solve_skeleton_mdp(const SpectralSpace& space, const GridPath& xbar,
                            const std::function<CoeffVector(const CoeffVector&, const CoeffVector&)>& dbbar,
                            const std::function<CoeffVector(const CoeffVector&)>& g_diag,
                            const GridPath& u);

// (X - Xbar) / (sqrt(epsilon) h(epsilon)) on the shared grid of x and xbar
GridPath deviation_path(const GridPath& x, const GridPath& xbar, const ScaleParams& scales);

// Simulation geometry shared by the Monte Carlo drivers: noise covariances,
// Hurst bundle, horizon, and the two nested grids.
struct SimSetup {
    CovarianceSpec q1;  // slow noise covariance
    CovarianceSpec q2;  // fast noise covariance
    HurstParam hurst;
    double T = 1.0;
    int slow_steps = 256;
    int substeps = 4; // fast substeps per slow cell
    CoeffVector x0, y0;

    std::vector<double> slow_times() const;
    std::vector<double> fast_times() const;
    void validate(const SpectralSpace& space, const ScaleParams& scales) const;
};

// smallest substep count that keeps the fast step at or below delta/4
int required_substeps(double T, int slow_steps, double delta);

} // namespace mfbm
