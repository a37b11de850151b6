#pragma once
// The Volterra kernel of fBM for H > 1/2, the induced smoothing operator,
// its inverse, and the derivative of kernel-smoothed paths.

#include <string>

#include "mfbm/fbm.hpp"
#include "mfbm/grid.hpp"

namespace mfbm {

// K(t,s) for 0 < s < t, 0 for s >= t; identically 1 on the support at H=1/2.
// Evaluated through the integral representation (integrated by parts so the
// form stays stable as H -> 1/2); s <= 0 is a domain error.
double volterra_kernel(const HurstParam& hurst, double t, double s);

// Same kernel through the Gauss hypergeometric series (Pfaff-transformed so
// all terms are positive). Retained as an independent cross-check only.
double volterra_kernel_series(const HurstParam& hurst, double t, double s);

// h(t) = int_0^t K(t,s) hdot(s) ds per mode; the running integral at H=1/2
GridPath apply_KH(const HurstParam& hurst, const GridPath& hdot);

// hdot with apply_KH(hdot) = u, from the explicit inversion formula; u must
// start at 0. A too-coarse grid attaches a diagnostic to *warning.
GridPath apply_KH_inverse(const HurstParam& hurst, const GridPath& u,
                          std::string* warning = nullptr);

// d/dt of apply_KH(hdot) evaluated directly (weighted singular average);
// H = 1/2 is a domain error, the caller should use hdot itself there
GridPath cm_derivative(const HurstParam& hurst, const GridPath& hdot);

} // namespace mfbm
