#include "mfbm/spectral.hpp"
#include "mfbm/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfbm {

SpectralSpace::SpectralSpace(std::vector<double> lam) : eigenvalues(std::move(lam)) {
    if (eigenvalues.empty())
        throw std::invalid_argument("SpectralSpace: need at least one eigenvalue");
    double prev = 0.0;
    for (double l : eigenvalues) {
        if (!(l > prev))
            throw std::invalid_argument("SpectralSpace: eigenvalues must be strictly positive and strictly increasing");
        prev = l;
    }
}

SpectralSpace dirichlet_laplacian_1d(int dim) {
    if (dim < 1) throw std::invalid_argument("dirichlet_laplacian_1d: dim >= 1 required");
    std::vector<double> lam(dim);
    for (int k = 1; k <= dim; ++k)
        lam[k - 1] = double(k) * double(k) * std::numbers::pi * std::numbers::pi;
    return SpectralSpace(lam);
}

double norm(const CoeffVector& x) {
    double s = 0.0;
    for (double c : x.coords) s += c * c;
    return std::sqrt(s);
}

static void check_dim(const SpectralSpace& space, const CoeffVector& x, const char* who) {
    if (x.dim() != space.dim())
        throw std::invalid_argument(std::string(who) + ": coefficient vector does not match space dimension");
}

CoeffVector semigroup_apply(const SpectralSpace& space, double t, const CoeffVector& x) {
    if (t < 0.0) throw std::domain_error("semigroup_apply: t must be nonnegative");
    check_dim(space, x, "semigroup_apply");
    CoeffVector y = x;
    for (int k = 0; k < space.dim(); ++k)
        y[k] *= std::exp(-space.eigenvalues[k] * t);
    return y;
}

CoeffVector frac_power_apply(const SpectralSpace& space, double beta, const CoeffVector& x) {
    check_dim(space, x, "frac_power_apply");
    CoeffVector y = x;
    for (int k = 0; k < space.dim(); ++k)
        y[k] *= std::pow(space.eigenvalues[k], beta);
    return y;
}

double v_beta_norm(const SpectralSpace& space, double beta, const CoeffVector& x) {
    return norm(frac_power_apply(space, beta, x));
}

// Operator norms are exact for a diagonal operator: the norm of
// diag(f(lam_k)) from V_gamma to V_sigma is max_k lam_k^{sigma-gamma} |f(lam_k)|.
BoundReport verify_semigroup_bounds(const SpectralSpace& space, int samples,
                                    std::uint64_t rng_seed) {
    if (samples < 1) throw std::invalid_argument("verify_semigroup_bounds: samples >= 1");
    std::mt19937_64 eng = make_engine(rng_seed, 0, 0, StreamTag::probe);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto& lam = space.eigenvalues;
    const double lam1 = space.lambda1();

    BoundReport rep;
    rep.samples = samples;
    for (int n = 0; n < samples; ++n) {
        // smoothing: gamma <= sigma <= gamma + 1, t in (0, 2]
        {
            double gamma = unif(eng), sigma = gamma + unif(eng);
            double t = 2.0 * unif(eng);
            if (t < 1e-6) t = 1e-6;
            double op = 0.0;
            for (double l : lam) op = std::max(op, std::pow(l, sigma - gamma) * std::exp(-l * t));
            rep.c_smoothing = std::max(rep.c_smoothing, op * std::pow(t, sigma - gamma) * std::exp(lam1 * t));
        }
        // difference: mu in [0,1], dt in (0, 2]
        {
            double mu = unif(eng), dt = 2.0 * unif(eng);
            if (dt < 1e-6) dt = 1e-6;
            double op = 0.0;
            for (double l : lam) op = std::max(op, (1.0 - std::exp(-l * dt)) * std::pow(l, -mu));
            rep.c_difference = std::max(rep.c_difference, op / std::pow(dt, mu));
        }
        // Hoelder difference: q < r < t, rho in (0,1), 0 <= nu <= gamma, rho+gamma-nu <= 1
        {
            double t = 1.0 + unif(eng);
            double r = t * (0.1 + 0.8 * unif(eng));
            double q = r * unif(eng);
            if (r - q < 1e-9 || t - r < 1e-9) continue;
            double rho = 0.05 + 0.9 * unif(eng);
            double nu = unif(eng) * (1.0 - rho);
            double gamma = nu + unif(eng) * (1.0 - rho - nu);
            double op = 0.0;
            for (double l : lam)
                op = std::max(op, std::abs(std::exp(-l * (t - r)) - std::exp(-l * (t - q))) * std::pow(l, gamma - nu));
            double rhs = std::pow(r - q, rho) * std::pow(t - r, -rho - gamma + nu);
            rep.c_holder = std::max(rep.c_holder, op / rhs);
        }
        // double difference: q < r < s < t, rho, nu >= 0, rho + nu <= 1
        {
            double t = 1.0 + unif(eng);
            double s = t * (0.2 + 0.6 * unif(eng));
            double r = s * (0.2 + 0.6 * unif(eng));
            double q = r * unif(eng);
            if (t - s < 1e-9 || s - r < 1e-9 || r - q < 1e-9) continue;
            double rho = 0.05 + 0.9 * unif(eng);
            double nu = unif(eng) * (1.0 - rho);
            double op = 0.0;
            for (double l : lam) {
                double v = std::exp(-l * (t - r)) - std::exp(-l * (s - r))
                         - std::exp(-l * (t - q)) + std::exp(-l * (s - q));
                op = std::max(op, std::abs(v));
            }
            double rhs = std::pow(t - s, rho) * std::pow(r - q, nu) * std::pow(s - r, -(rho + nu));
            rep.c_double_diff = std::max(rep.c_double_diff, op / rhs);
        }
    }
    rep.finite = std::isfinite(rep.c_smoothing) && std::isfinite(rep.c_difference)
              && std::isfinite(rep.c_holder) && std::isfinite(rep.c_double_diff);
    return rep;
}

} // namespace mfbm
