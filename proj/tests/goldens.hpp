// Frozen reference values. Regenerate with: make_goldens > tests/goldens.hpp
// Dual routes (series vs integral representation, closed form vs quadrature)
// were required to agree before freezing; discrepancies abort the generator.
#pragma once

namespace goldens {

// volterra kernel at t=1, rows H in {0.6,0.7,0.9}, cols s in {0.1,0.3,0.5,0.7,0.9}
inline constexpr double kernel_t1[3][5] = {
    {1.10431105471963438, 1.05381361107437638, 1.0115314201494507, 0.957349360358130272, 0.855543038445612133},
    {1.22193350277629988, 1.07363571553022549, 0.977140497393616757, 0.869444338382846051, 0.691377240630437339},
    {1.21257478607933535, 0.847019965419067439, 0.675897991721780116, 0.524124733606781683, 0.326977163655364746},
};

// int_0^1 K(1,s) ds at H=0.7
inline constexpr double kernel_row_integral_h07 = 0.972582966122812975;

// coefficient of t^{H-1/2} in the derivative of the kernel-smoothed
// constant-rate path, H in {0.6,0.7,0.75,0.8,0.9}
inline constexpr double cm_unit_coeff[5] = {1.09391070498583266, 1.16709955934737557, 1.18807647471906563, 1.18990844931543881, 1.07187103394246253};

// rate of phi(t)=t on [0,1], H=0.7, identity diffusion, unit covariance
inline constexpr double rate_linear_h07 = 0.506822779881583575;

// Var(int_0^1 e^{-mu(1-s)} dB^H_s), H=0.7
inline constexpr double duhamel_var_h07_mu1  = 0.578731317133225009;
inline constexpr double duhamel_var_h07_mu05 = 0.753797182919587089;

// exponentially weighted bound constant: sup over a,d in [0,0.45] and
// tau in [1e-3,1e3] of the scale-invariant profile F(tau)
inline constexpr double exp_weight_constant = 2.11987770048223163;

// max ratio for the semigroup Hoelder-difference estimate,
// spectrum {1,10,100}, rho=1/2, gamma=nu=0 (grid search)
inline constexpr double holder_diff_ratio_123 = 0.273699379224748808;

// bound on the (H-0.05)-Hoelder constant of kernel-smoothed paths per
// unit L2 rate, H=0.7, fitted on random trigonometric rates with margin
inline constexpr double smoothing_holder_bound_h07 = 1.95932972441733237;

} // namespace goldens
