#pragma once
// Exact sampling of scalar and cylindrical fractional Brownian motion
// (H > 1/2) and of the Q-Wiener process driving the fast equation.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "mfbm/grid.hpp"
#include "mfbm/spectral.hpp"

namespace mfbm {

// Hurst bundle: the index H, the kernel normalization c_H, and the
// fractional-calculus order alpha used by the pathwise integrals.
// alpha is constrained to (1-H, 1/2).
struct HurstParam {
    double H = 0.5;
    double c_h = 1.0;
    double alpha = 0.25;

    // H in (1/2, 1) strictly; alpha defaults to the midpoint of (1-H, 1/2)
    static HurstParam fractional(double H);
    static HurstParam fractional(double H, double alpha);
    // Brownian marker (H = 1/2); several operators degenerate cleanly here
    static HurstParam classical();

    bool is_classical() const { return H == 0.5; }
};

// c_H = sqrt(2H Gamma(3/2-H) Gamma(H+1/2) / Gamma(2-2H)); equals 1 at H=1/2
double kernel_constant(double H);

// Diagonal covariance of a driving noise on the mode basis. The operator
// square root must be trace class, so construction tracks sum_i sqrt(lambda_i)
// against a budget instead of only requiring summability (automatic for a
// finite array).
struct CovarianceSpec {
    std::vector<double> lambdas;
    double sqrt_budget = 1e6;

    static CovarianceSpec identity(int dim);
    static CovarianceSpec diagonal(std::vector<double> lambdas);

    double sqrt_trace() const;
    // dimension match against the ambient space plus sign/budget checks
    void validate(int dim) const;
};

// 1/2 (t^{2H} + s^{2H} - |t-s|^{2H}); reduces to min(s,t) at H = 1/2
double fbm_covariance(const HurstParam& hurst, double s, double t);

// Cholesky factor of the covariance matrix on the positive nodes of a grid.
// Factoring is the expensive part, so replica loops build one of these up
// front and call draw() per replica; draw is const and thread-safe.
class FbmFactor {
  public:
    // times must start at 0; at most kCholeskyCap positive nodes
    FbmFactor(const HurstParam& hurst, const std::vector<double>& times);

    GridPath draw(std::mt19937_64& rng) const;
    const std::vector<double>& times() const { return times_; }

    static constexpr int kCholeskyCap = 4096;

  private:
    std::vector<double> times_;
    Eigen::MatrixXd chol_; // lower factor over nodes t_1..t_M
};

// One exact draw of scalar fBM on the grid (one-shot FbmFactor)
GridPath sample_fbm_1d(const HurstParam& hurst, const std::vector<double>& times,
                       std::mt19937_64& rng);

// Mode i carries sqrt(lambda_i) times an independent scalar fBM
GridPath sample_cylindrical_fbm(const SpectralSpace& space, const CovarianceSpec& q,
                                const HurstParam& hurst, const std::vector<double>& times,
                                std::mt19937_64& rng);

// Same draw from a prebuilt factor; replica loops factor once and call this
GridPath sample_cylindrical_fbm(const FbmFactor& factor, const SpectralSpace& space,
                                const CovarianceSpec& q, std::mt19937_64& rng);

// Same construction at H = 1/2. Brownian increments are independent, so this
// samples them directly and is not subject to the Cholesky cap.
GridPath sample_q_wiener(const SpectralSpace& space, const CovarianceSpec& q,
                         const std::vector<double>& times, std::mt19937_64& rng);

} // namespace mfbm
