#include "mfbm/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace mfbm {
namespace {

double take(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::string& family, const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : params) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument(family + ": unknown parameter '" + key + "'");
    }
}

CoeffVector broadcast(int dim, double v) {
    CoeffVector out;
    out.coords.assign(static_cast<std::size_t>(dim), v);
    return out;
}

// probe box used when declaring the sup-in-y growth constant C6
constexpr double kProbeRadius = 3.0;

} // namespace

CoefficientSystem linear_dissipative_family(const SpectralSpace& space,
                                            const std::map<std::string, double>& params) {
    reject_unknown("linear_dissipative_family", params, {"b_x", "b_y", "a", "c", "sigma_G", "sigma_g"});
    const double bx = take(params, "b_x", 0.0);
    const double by = take(params, "b_y", 1.0);
    const double a = take(params, "a", 1.0);
    const double c = take(params, "c", 1.0);
    const double sG = take(params, "sigma_G", 0.5);
    const double sg = take(params, "sigma_g", 0.1);
    if (a <= 0.0)
        throw std::invalid_argument("linear_dissipative_family: fast relaxation rate a must be positive");

    const int dim = space.dim();
    const double sd = std::sqrt(static_cast<double>(dim));

    CoefficientSystem sys;
    sys.family = "linear_dissipative";
    sys.params = {{"b_x", bx}, {"b_y", by}, {"a", a}, {"c", c}, {"sigma_G", sG}, {"sigma_g", sg}};

    sys.b = [bx, by](const CoeffVector& x, const CoeffVector& y) {
        CoeffVector out = x;
        for (int k = 0; k < out.dim(); ++k) out.coords[k] = bx * x.coords[k] + by * y.coords[k];
        return out;
    };
    sys.F = [a, c](const CoeffVector& x, const CoeffVector& y) {
        CoeffVector out = x;
        for (int k = 0; k < out.dim(); ++k) out.coords[k] = -a * y.coords[k] + c * x.coords[k];
        return out;
    };
    sys.G_diag = [sG, dim](const CoeffVector&, const CoeffVector&) { return broadcast(dim, sG); };
    sys.g_diag = [sg, dim](const CoeffVector&) { return broadcast(dim, sg); };

    // the frozen fast equation dY = (-Lambda Y + F(x,Y)) dt + G dW has the
    // stationary mean c x_k / (lambda_k + a) in mode k, so averaging b in y
    // against that measure is exact and linear in x
    std::vector<double> lam = space.eigenvalues;
    sys.bbar = [bx, by, a, c, lam](const CoeffVector& x) {
        CoeffVector out = x;
        for (int k = 0; k < out.dim(); ++k)
            out.coords[k] = bx * x.coords[k] + by * c * x.coords[k] / (lam[static_cast<std::size_t>(k)] + a);
        return out;
    };
    sys.Dbbar = [bx, by, a, c, lam](const CoeffVector& x, const CoeffVector& z) {
        (void)x; // the derivative is constant and diagonal
        CoeffVector out = z;
        for (int k = 0; k < out.dim(); ++k)
            out.coords[k] = (bx + by * c / (lam[static_cast<std::size_t>(k)] + a)) * z.coords[k];
        return out;
    };

    sys.c1 = std::max(std::abs(bx), std::abs(by));
    sys.c2 = std::max(a, c); // G constant, so F carries the whole Lipschitz budget
    sys.c3 = std::max(a, c) + sG * sd;
    sys.c4 = std::max(std::abs(bx), std::abs(by));
    sys.c5 = 0.5 * c;
    sys.beta1 = 0.5 * a;
    sys.beta2 = c * c * kProbeRadius * kProbeRadius / a;
    sys.beta3 = -a + (c > 0.0 ? 0.5 * c : 0.0);
    sys.c6 = std::max(std::abs(bx), kProbeRadius * std::abs(by) + sG) * (1.0 + sd);
    sys.lip_g = 0.0;
    sys.lip_g_prime = 0.0;
    return sys;
}

CoefficientSystem bounded_nonlinear_family(const SpectralSpace& space,
                                           const std::map<std::string, double>& params) {
    reject_unknown("bounded_nonlinear_family", params,
                   {"b_x", "b_y", "a", "c", "sigma_G", "sigma_g", "s_b", "s_F"});
    const double bx = take(params, "b_x", 0.0);
    const double by = take(params, "b_y", 1.0);
    const double a = take(params, "a", 1.0);
    const double c = take(params, "c", 1.0);
    const double sG = take(params, "sigma_G", 0.5);
    const double sg = take(params, "sigma_g", 0.1);
    const double sb = take(params, "s_b", 0.2);
    const double sF = take(params, "s_F", 0.1);
    if (a <= 0.0)
        throw std::invalid_argument("bounded_nonlinear_family: fast relaxation rate a must be positive");

    const int dim = space.dim();
    const double sd = std::sqrt(static_cast<double>(dim));

    CoefficientSystem sys;
    sys.family = "bounded_nonlinear";
    sys.params = {{"b_x", bx}, {"b_y", by}, {"a", a},   {"c", c},
                  {"sigma_G", sG}, {"sigma_g", sg}, {"s_b", sb}, {"s_F", sF}};

    sys.b = [bx, by, sb](const CoeffVector& x, const CoeffVector& y) {
        CoeffVector out = x;
        for (int k = 0; k < out.dim(); ++k)
            out.coords[k] = bx * x.coords[k] + by * y.coords[k] + sb * std::sin(x.coords[k] + y.coords[k]);
        return out;
    };
    sys.F = [a, c, sF](const CoeffVector& x, const CoeffVector& y) {
        CoeffVector out = x;
        for (int k = 0; k < out.dim(); ++k)
            out.coords[k] = -a * y.coords[k] + c * x.coords[k] + sF * std::sin(y.coords[k]);
        return out;
    };
    sys.G_diag = [sG](const CoeffVector& x, const CoeffVector&) {
        CoeffVector out = x;
        for (int k = 0; k < out.dim(); ++k) out.coords[k] = sG * (1.0 + 0.3 * std::sin(x.coords[k]));
        return out;
    };
    sys.g_diag = [sg](const CoeffVector& x) {
        CoeffVector out = x;
        for (int k = 0; k < out.dim(); ++k) out.coords[k] = sg * (1.0 + 0.3 * std::sin(x.coords[k]));
        return out;
    };
    // no closed-form averaged drift: the invariant measure of the perturbed
    // fast flow has no elementary moments

    sys.c1 = std::max(std::abs(bx), std::abs(by)) + sb;
    sys.c2 = std::max(a + sF, c) + 0.3 * sG;
    sys.c3 = std::max(a, c) + (sF + 1.3 * sG) * sd;
    sys.c4 = std::max(std::abs(bx), std::abs(by)) + sb * (1.0 + sd);
    sys.c5 = 0.5 * c;
    sys.beta1 = 0.5 * a;
    sys.beta2 = (c * c * kProbeRadius * kProbeRadius + sF * sF * dim) / a;
    sys.beta3 = -a + sF + (c > 0.0 ? 0.5 * c : 0.0);
    sys.c6 = (std::max(std::abs(bx), kProbeRadius * std::abs(by) + 1.3 * sG) + sb) * (1.0 + sd);
    sys.lip_g = 0.3 * sg;
    sys.lip_g_prime = 0.3 * sg;
    return sys;
}

CoefficientSystem make_coefficient_system(const std::string& family, const SpectralSpace& space,
                                          const std::map<std::string, double>& params) {
    if (family == "linear_dissipative") return linear_dissipative_family(space, params);
    if (family == "bounded_nonlinear") return bounded_nonlinear_family(space, params);
    throw std::invalid_argument("make_coefficient_system: unknown family '" + family +
                                "' (known: linear_dissipative, bounded_nonlinear)");
}

} // namespace mfbm
