#pragma once
#include "mfbm/spectral.hpp"

#include <functional>
#include <map>
#include <string>

namespace mfbm {

// A named coefficient family (b, F, G, g) together with the constants it
// declares for the dissipativity and growth conditions the theory needs.
// Both diffusions are diagonal in the eigenbasis; G_diag and g_diag return
// the diagonal entries. Closed-form averaged drift and its derivative are
// attached when the family has them.
//
// Construction never rejects a family whose declared constants violate the
// dissipativity inequalities; consumers that need them (the averaging
// engine) check eta/kappa and refuse, so that deliberately failing families
// remain constructible for tests.
struct CoefficientSystem {
    std::string family;
    std::map<std::string, double> params;

    std::function<CoeffVector(const CoeffVector&, const CoeffVector&)> b;
    std::function<CoeffVector(const CoeffVector&, const CoeffVector&)> F;
    std::function<CoeffVector(const CoeffVector&, const CoeffVector&)> G_diag;
    std::function<CoeffVector(const CoeffVector&)> g_diag;

    std::function<CoeffVector(const CoeffVector&)> bbar;                       // empty if none
    std::function<CoeffVector(const CoeffVector&, const CoeffVector&)> Dbbar;  // (x, z) -> Dbbar(x) z

    // declared constants: c1 (Lipschitz of b), c2 (Lipschitz of F and G),
    // c3/c4 (growth of F+G and of b), c5/beta3 (one-sided Lipschitz of F),
    // beta1/beta2 (dissipativity of F in y), c6 (sup-in-y growth of b and G
    // over the probe box), lip_g/lip_g_prime (Lipschitz of g and g')
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0;
    double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
    double lip_g = 0.0, lip_g_prime = 0.0;

    // dissipativity margins; ergodic averaging requires eta > 1 and kappa > 0
    double eta(double lambda1) const { return 2.0 * lambda1 - 2.0 * beta3 - c2; }
    double kappa(double lambda1) const { return 2.0 * lambda1 + 2.0 * beta1 - c3; }

    bool has_closed_bbar() const { return static_cast<bool>(bbar); }
    bool has_dbbar() const { return static_cast<bool>(Dbbar); }
};

// All-linear family:
//   b(x,y) = b_x x + b_y y,  F(x,y) = -a y + c x,
//   G = sigma_G (constant),  g = sigma_g (constant),
// componentwise, with the closed-form averaged drift
//   bbar(x)_k = b_x x_k + b_y c x_k / (lambda_k + a).
// Parameter keys (defaults): b_x (0), b_y (1), a (1), c (1),
// sigma_G (0.5), sigma_g (0.1). Unknown keys are rejected.
CoefficientSystem linear_dissipative_family(const SpectralSpace& space,
                                            const std::map<std::string, double>& params = {});

// Linear core plus bounded sine perturbations:
//   b += s_b sin(x_k + y_k),  F += s_F sin(y_k),
//   G = sigma_G (1 + 0.3 sin(x_k)),  g = sigma_g (1 + 0.3 sin(x_k)).
// No closed-form averaged drift (use the averaging engine) and no declared
// derivative of it. Extra keys: s_b (0.2), s_F (0.1).
CoefficientSystem bounded_nonlinear_family(const SpectralSpace& space,
                                           const std::map<std::string, double>& params = {});

// Registry lookup by family name; unknown names are rejected.
CoefficientSystem make_coefficient_system(const std::string& family, const SpectralSpace& space,
                                          const std::map<std::string, double>& params = {});

} // namespace mfbm
