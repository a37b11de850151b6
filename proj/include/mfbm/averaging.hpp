#pragma once
// Averaged-drift construction by ergodic time averages of the frozen fast
// equation, numerical assumption checks, and the averaging-error sweep.

#include "mfbm/coefficients.hpp"
#include "mfbm/solvers.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mfbm {

struct BbarEstimate {
    CoeffVector value;
    CoeffVector se; // per-mode standard error from the replica spread
};

// Knobs of the ergodic estimator. Negative burn_in/horizon/step request the
// defaults: burn_in = 10 / (lambda_1 + beta_1) (ten relaxation times),
// horizon = 100 * burn_in, and a step resolving the declared Lipschitz scale.
struct ErgodicSettings {
    double burn_in = -1.0;
    double horizon = -1.0;
    double step = -1.0;
    int replicas = 32;
    CovarianceSpec q2; // empty -> identity
    CoeffVector y0;    // empty -> zero
    bool parallel = false;
};

// Time-average of b(x, Y^x_t) over [burn_in, burn_in + horizon], averaged
// over independent replicas of the frozen equation. Refuses families whose
// declared constants fail the dissipativity margins (eta > 1, kappa > 0),
// naming the failing one, since time averaging needs ergodicity.
BbarEstimate estimate_bbar(const SpectralSpace& space, const CoefficientSystem& coeffs,
                           const CoeffVector& x, const ErgodicSettings& settings,
                           std::uint64_t seed);
BbarEstimate estimate_bbar(const SpectralSpace& space, const CoefficientSystem& coeffs,
                           const CoeffVector& x, double burn_in, double horizon, int replicas,
                           std::uint64_t seed);

// Averaged drift as either a registered closed form or a table on an
// axis-aligned grid (multilinear interpolation, at most 3 axes). Evaluation
// outside the table raises with the offending point.
struct AveragedDrift {
    enum class Mode { closed_form, tabulated };
    Mode mode = Mode::closed_form;

    std::function<CoeffVector(const CoeffVector&)> closed;

    std::vector<std::vector<double>> axes; // one ascending axis per mode
    std::vector<CoeffVector> values;       // row-major over the axis grid
    std::vector<CoeffVector> ses;
    double burn_in = 0.0, horizon = 0.0;
    int replicas = 0;

    CoeffVector eval(const CoeffVector& x) const;
    std::function<CoeffVector(const CoeffVector&)> as_function() const;
};

// Wraps the family's closed-form averaged drift; refuses families without one
AveragedDrift closed_form_drift(const CoefficientSystem& coeffs);

// Tabulates estimate_bbar on the given axes (dim(space) axes required)
AveragedDrift build_bbar(const SpectralSpace& space, const CoefficientSystem& coeffs,
                         const std::vector<std::vector<double>>& axes,
                         const ErgodicSettings& settings, std::uint64_t seed);

// JSON round trip so an expensive table can be reused across runs
std::string averaged_drift_to_json(const AveragedDrift& drift);
AveragedDrift averaged_drift_from_json(const std::string& text);

// Sampled Lipschitz/growth/dissipativity constants over random state pairs,
// the declared-margin checks, and the sup-in-y growth probe.
struct AssumptionReport {
    double lip_b = 0.0;          // sup ||db|| / (||dx|| + ||dy||)
    double lip_fg = 0.0;         // sup (||dF|| + ||dG||) / (||dx|| + ||dy||)
    double growth_fg = 0.0;      // sup (||F|| + ||G||) / (1 + ||x|| + ||y||)
    double growth_b = 0.0;       // sup ||b|| / (1 + ||x|| + ||y||)
    double beta3_onesided = 0.0; // sup <dy, dF> / ||dy||^2 at fixed x
    double a6_ratio = 0.0;       // sup (||b|| + ||G||) / (C6 (1 + ||x||))
    double eta = 0.0, kappa = 0.0; // from the declared constants
    bool a5_pass = false;
    bool a6_pass = false;
    bool declared_consistent = false; // sampled constants within declared ones
    int samples = 0;
};

AssumptionReport check_assumptions(const SpectralSpace& space, const CoefficientSystem& coeffs,
                                   int sample_count, std::uint64_t seed);
std::string assumption_report_to_json(const AssumptionReport& report);

// One scale pair of the averaging sweep: E sup_t ||X - Xbar|| with its MC
// error bar and the fraction of diverged replicas.
struct SweepCell {
    double epsilon = 0.0, delta = 0.0;
    double mean_sup_error = 0.0;
    double se = 0.0;
    double abort_fraction = 0.0;
};

struct SweepReport {
    std::vector<SweepCell> cells;
    bool monotone = false; // strictly decreasing means along the schedule
    bool valid = false;    // no cell above the 1% divergence budget
};

// Runs the slow-fast system against the averaged trajectory across the
// schedule. Replica r reuses the same slow-noise draw in every cell, so the
// noise floor cancels out of cell-to-cell comparisons.
SweepReport averaging_error_sweep(const SpectralSpace& space, const CoefficientSystem& coeffs,
                                  const std::function<CoeffVector(const CoeffVector&)>& bbar,
                                  const SimSetup& setup, const std::vector<ScaleParams>& schedule,
                                  int replicas, std::uint64_t seed, bool parallel);
std::string sweep_report_to_json(const SweepReport& report);

} // namespace mfbm
