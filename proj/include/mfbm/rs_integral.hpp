#pragma once
#include "mfbm/weyl.hpp"

#include <functional>
#include <random>

namespace mfbm {

// Computed values above this threshold are treated as "the norm does not
// exist" and make the integral refuse its input.
inline constexpr double kNormCap = 1e8;

// The pathwise norms controlling existence of the generalized Stieltjes
// integral and every a-priori estimate built on it. Vector values are
// measured in the l2 norm across modes.
struct NormReport {
    double w_alpha_1 = 0.0;   // int_0^T ( |f(s)|/s^alpha
                              //   + int_0^s |f(s)-f(l)|/(s-l)^{alpha+1} dl ) ds
    double w_alpha_inf = 0.0; // sup_t ( |f(t)|
                              //   + int_0^t |f(t)-f(s)|/(t-s)^{alpha+1} ds )
    double holder = 0.0;      // |f|_inf + sup |f(t)-f(s)|/(t-s)^{1-alpha}
    double lambda_g = 0.0;    // ||f||_{1-alpha,0,T} / (Gamma(1-alpha) Gamma(alpha))
};

NormReport path_norms(const GridPath& f, FracOrder alpha);

// Square norm sup_t |f(t)|^2 + int_0^T ( int_0^t |f(t)-f(s)|/(t-s)^{alpha+1} ds )^2 dt,
// the one used for mean-square estimates; returned separately because it is
// not part of the existence theory in NormReport.
double b_alpha2_norm(const GridPath& f, FracOrder alpha);

// Generalized (forward) Stieltjes integral int_s^t f dg for grid paths on a
// common time grid. Defined through the Weyl pairing
//   int f dg = (-1)^alpha int D_{s+}^alpha f (u) D_{t-}^{1-alpha} g_{t-}(u) du,
// which this routine evaluates exactly on the piecewise-linear reconstruction
// of the data: per cell the pairing collapses analytically to
// (f_i + f_{i+1})/2 * (g_{i+1} - g_i) (the cross Beta integrals reduce to
// B(2-alpha, 1+alpha)/(Gamma(2-alpha)Gamma(1+alpha)) = 1/2). Assembling cell
// by cell makes additivity over adjacent windows structural rather than a
// numerical accident.
//
// f and g must share the grid; s and t must be grid nodes. Mode counts must
// match, or either side may be scalar and is broadcast. Inputs whose norms
// exceed `norm_cap` are refused.
CoeffVector rs_integral(const GridPath& f, const GridPath& g, FracOrder alpha,
                        double s, double t, double norm_cap = kNormCap);

// Vector-valued integral int_0^T G(s) du(s) for an operator family acting on
// the modes of u: Gfam(s, i) must return the coefficient vector G(s) e_i.
// Evaluates sum_i int (G(.) e_i) d u_i with the same per-cell rule as
// rs_integral.
CoeffVector rs_integral_operator(const std::function<CoeffVector(double, int)>& Gfam,
                                 const GridPath& u, FracOrder alpha);

// Spot checks of the two singular-convolution estimates the error analysis
// leans on: for a < 1, d < 1, a + d > 1 and 0 < r < t,
//
//   int_0^r (r-s)^{-a} (t-s)^{-d} ds  <= (t-r)^{1-a-d} B(1-a, a+d-1)
//   int_r^t (s-r)^{-a} (t-s)^{-d} ds  <= (t-r)^{1-a-d} B(1-a, a+d-1)
//
// and for a, d >= 0 with a + d < 1, rho >= 1 and t <= 1,
//
//   int_0^t e^{-rho (t-r)} (t-r)^{-a} r^{-d} dr  <= C rho^{a+d-1},
//
// with C calibrated once over the admissible box and frozen as the default
// cap. Parameters are sampled at random, both sides integrated numerically.
struct BetaBoundReport {
    double convolution_max_ratio = 0.0; // max LHS/RHS over both convolution bounds
    double exp_weight_max = 0.0;        // max rho^{1-a-d} * LHS over samples
    double exp_weight_cap = 0.0;        // the C the above is compared against
    double slope_max_err = 0.0;         // worst |fitted log-log slope - (a+d-1)|
    int samples = 0;
    bool passed = false;
};

BetaBoundReport verify_beta_bounds(int samples, std::mt19937_64& rng,
                                   double exp_weight_cap = 2.65);

} // namespace mfbm
