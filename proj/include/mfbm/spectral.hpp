#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace mfbm {

// Truncated eigenbasis of -A. The operator is diagonal in this basis, so the
// semigroup and fractional powers act componentwise on coefficient vectors.
struct SpectralSpace {
    std::vector<double> eigenvalues; // 0 < lam[0] < lam[1] < ...

    explicit SpectralSpace(std::vector<double> lam);
    int dim() const { return static_cast<int>(eigenvalues.size()); }
    double lambda1() const { return eigenvalues.front(); }
};

// Named generator: eigenvalues k^2 pi^2 of the Dirichlet Laplacian on (0,1).
SpectralSpace dirichlet_laplacian_1d(int dim);

struct CoeffVector {
    std::vector<double> coords;

    CoeffVector() = default;
    explicit CoeffVector(int dim) : coords(dim, 0.0) {}
    explicit CoeffVector(std::vector<double> c) : coords(std::move(c)) {}
    int dim() const { return static_cast<int>(coords.size()); }
    double& operator[](int i) { return coords[i]; }
    double operator[](int i) const { return coords[i]; }
};

double norm(const CoeffVector& x);

// S_t x, componentwise e^{-lam_k t} x_k. Rejects t < 0.
CoeffVector semigroup_apply(const SpectralSpace& space, double t, const CoeffVector& x);

// (-A)^beta x, componentwise lam_k^beta x_k.
CoeffVector frac_power_apply(const SpectralSpace& space, double beta, const CoeffVector& x);

// Graph norm of V_beta: ||(-A)^beta x||.
double v_beta_norm(const SpectralSpace& space, double beta, const CoeffVector& x);

// Smallest constants observed for the four smoothing estimates of the
// semigroup on randomly sampled admissible parameters. All four must come
// out finite; `finite` is the flag a caller should assert on.
struct BoundReport {
    double c_smoothing = 0.0;     // ||S_t||_{V_gamma -> V_sigma} <= C t^{-(sigma-gamma)} e^{-lam_1 t}
    double c_difference = 0.0;    // ||S_dt - id||_{V_{u+mu} -> V_u} <= C dt^mu
    double c_holder = 0.0;        // ||S_{t-r} - S_{t-q}|| <= C (r-q)^rho (t-r)^{-rho-gamma+nu}
    double c_double_diff = 0.0;   // the two-increment bound
    int samples = 0;
    bool finite = false;
};

BoundReport verify_semigroup_bounds(const SpectralSpace& space, int samples,
                                    std::uint64_t rng_seed);

} // namespace mfbm
