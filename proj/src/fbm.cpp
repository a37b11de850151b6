#include "mfbm/fbm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfbm {

double kernel_constant(double H) {
    return std::sqrt(2.0 * H * std::tgamma(1.5 - H) * std::tgamma(H + 0.5)
                     / std::tgamma(2.0 - 2.0 * H));
}

HurstParam HurstParam::fractional(double H) {
    // midpoint of the admissible interval (1-H, 1/2)
    return fractional(H, 0.5 * (1.0 - H + 0.5));
}

HurstParam HurstParam::fractional(double H, double alpha) {
    if (!(H > 0.5) || !(H < 1.0))
        throw std::invalid_argument("HurstParam: H must lie in (1/2, 1), got " + std::to_string(H));
    if (!(alpha > 1.0 - H) || !(alpha < 0.5))
        throw std::invalid_argument("HurstParam: alpha must lie in (1-H, 1/2) = ("
                                    + std::to_string(1.0 - H) + ", 0.5), got " + std::to_string(alpha));
    HurstParam p;
    p.H = H;
    p.c_h = kernel_constant(H);
    p.alpha = alpha;
    return p;
}

HurstParam HurstParam::classical() {
    HurstParam p;
    p.H = 0.5;
    p.c_h = 1.0;
    p.alpha = 0.25;
    return p;
}

CovarianceSpec CovarianceSpec::identity(int dim) {
    CovarianceSpec q;
    q.lambdas.assign(static_cast<size_t>(dim), 1.0);
    return q;
}

CovarianceSpec CovarianceSpec::diagonal(std::vector<double> lambdas) {
    CovarianceSpec q;
    q.lambdas = std::move(lambdas);
    return q;
}

double CovarianceSpec::sqrt_trace() const {
    double s = 0.0;
    for (double l : lambdas) s += std::sqrt(l);
    return s;
}

void CovarianceSpec::validate(int dim) const {
    if (lambdas.size() != static_cast<size_t>(dim))
        throw std::invalid_argument("CovarianceSpec: " + std::to_string(lambdas.size())
                                    + " eigenvalues for a space of dimension " + std::to_string(dim));
    for (size_t i = 0; i < lambdas.size(); ++i)
        if (!(lambdas[i] >= 0.0))
            throw std::invalid_argument("CovarianceSpec: lambda_" + std::to_string(i)
                                        + " is negative or NaN");
    if (sqrt_trace() > sqrt_budget)
        throw std::invalid_argument("CovarianceSpec: sum of sqrt(lambda_i) = "
                                    + std::to_string(sqrt_trace())
                                    + " exceeds the trace-class-root budget "
                                    + std::to_string(sqrt_budget));
}

double fbm_covariance(const HurstParam& hurst, double s, double t) {
    if (s < 0.0 || t < 0.0)
        throw std::domain_error("fbm_covariance: times must be nonnegative");
    double twoH = 2.0 * hurst.H;
    return 0.5 * (std::pow(t, twoH) + std::pow(s, twoH) - std::pow(std::abs(t - s), twoH));
}

FbmFactor::FbmFactor(const HurstParam& hurst, const std::vector<double>& times) : times_(times) {
    if (times_.empty() || times_.front() != 0.0)
        throw std::invalid_argument("FbmFactor: grid must start at t=0");
    for (size_t j = 1; j < times_.size(); ++j)
        if (!(times_[j] > times_[j - 1]))
            throw std::invalid_argument("FbmFactor: times must be strictly increasing");
    const int m = static_cast<int>(times_.size()) - 1;
    if (m > kCholeskyCap)
        throw std::invalid_argument("FbmFactor: grid has " + std::to_string(m)
                                    + " positive nodes, exact sampler cap is "
                                    + std::to_string(kCholeskyCap)
                                    + " (refusing to approximate silently)");
    if (m == 0) return;
    Eigen::MatrixXd cov(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            double c = fbm_covariance(hurst, times_[i + 1], times_[j + 1]);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("FbmFactor: covariance Cholesky failed (not positive definite) on grid with "
                                 + std::to_string(m) + " nodes, T=" + std::to_string(times_.back())
                                 + ", H=" + std::to_string(hurst.H));
    chol_ = llt.matrixL();
}

GridPath FbmFactor::draw(std::mt19937_64& rng) const {
    GridPath path(times_, 1);
    const int m = static_cast<int>(times_.size()) - 1;
    if (m == 0) return path;
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z(i) = normal(rng);
    Eigen::VectorXd b = chol_ * z;
    for (int i = 0; i < m; ++i) path.set_value(static_cast<size_t>(i + 1), 0, b(i));
    return path;
}

GridPath sample_fbm_1d(const HurstParam& hurst, const std::vector<double>& times,
                       std::mt19937_64& rng) {
    return FbmFactor(hurst, times).draw(rng);
}

GridPath sample_cylindrical_fbm(const SpectralSpace& space, const CovarianceSpec& q,
                                const HurstParam& hurst, const std::vector<double>& times,
                                std::mt19937_64& rng) {
    FbmFactor factor(hurst, times);
    return sample_cylindrical_fbm(factor, space, q, rng);
}

GridPath sample_cylindrical_fbm(const FbmFactor& factor, const SpectralSpace& space,
                                const CovarianceSpec& q, std::mt19937_64& rng) {
    q.validate(space.dim());
    const std::vector<double>& times = factor.times();
    GridPath path(times, space.dim());
    // mode 0 consumes the first block of normals, so a single-mode unit-lambda
    // draw reproduces sample_fbm_1d from the same engine state
    for (int mode = 0; mode < space.dim(); ++mode) {
        GridPath scalar = factor.draw(rng);
        double scale = std::sqrt(q.lambdas[static_cast<size_t>(mode)]);
        for (size_t node = 0; node < times.size(); ++node)
            path.set_value(node, mode, scale * scalar.at(node, 0));
    }
    return path;
}

GridPath sample_q_wiener(const SpectralSpace& space, const CovarianceSpec& q,
                         const std::vector<double>& times, std::mt19937_64& rng) {
    q.validate(space.dim());
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("sample_q_wiener: grid must start at t=0");
    GridPath path(times, space.dim());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int mode = 0; mode < space.dim(); ++mode) {
        double scale = std::sqrt(q.lambdas[static_cast<size_t>(mode)]);
        double w = 0.0;
        for (size_t node = 1; node < times.size(); ++node) {
            double dt = times[node] - times[node - 1];
            w += scale * std::sqrt(dt) * normal(rng);
            path.set_value(node, mode, w);
        }
    }
    return path;
}

} // namespace mfbm
