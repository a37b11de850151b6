#include "mfbm/averaging.hpp"

#include "mfbm/parallel.hpp"
#include "mfbm/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mfbm {
namespace {

using nlohmann::json;

double l2(const CoeffVector& v) {
    double s = 0.0;
    for (double x : v.coords) s += x * x;
    return std::sqrt(s);
}

void require_ergodic(const char* who, const SpectralSpace& space, const CoefficientSystem& coeffs) {
    const double eta = coeffs.eta(space.lambda1());
    const double kappa = coeffs.kappa(space.lambda1());
    if (!(eta > 1.0)) {
        std::ostringstream msg;
        msg << who << ": dissipativity margin eta = 2 lambda_1 - 2 beta_3 - C_2 = " << eta
            << " fails the requirement eta > 1; the frozen equation is not certified ergodic";
        throw std::invalid_argument(msg.str());
    }
    if (!(kappa > 0.0)) {
        std::ostringstream msg;
        msg << who << ": growth margin kappa = 2 lambda_1 + 2 beta_1 - C_3 = " << kappa
            << " fails the requirement kappa > 0";
        throw std::invalid_argument(msg.str());
    }
}

std::string point_string(const CoeffVector& x) {
    std::ostringstream s;
    s << "(";
    for (int i = 0; i < x.dim(); ++i) s << (i ? ", " : "") << x[i];
    s << ")";
    return s.str();
}

} // namespace

BbarEstimate estimate_bbar(const SpectralSpace& space, const CoefficientSystem& coeffs,
                           const CoeffVector& x, const ErgodicSettings& settings,
                           std::uint64_t seed) {
    const char* who = "estimate_bbar";
    require_ergodic(who, space, coeffs);
    if (x.dim() != space.dim())
        throw std::invalid_argument("estimate_bbar: x does not match the space dimension");

    const int dim = space.dim();
    double burn = settings.burn_in;
    if (burn <= 0.0) burn = 10.0 / (space.lambda1() + coeffs.beta1);
    double horizon = settings.horizon;
    if (horizon <= 0.0) horizon = 100.0 * burn;
    double step = settings.step;
    if (step <= 0.0) step = 0.02 / (1.0 + coeffs.c2);
    const int replicas = settings.replicas;
    if (replicas < 1) throw std::invalid_argument("estimate_bbar: need at least one replica");

    CovarianceSpec q2 = settings.q2.lambdas.empty() ? CovarianceSpec::identity(dim) : settings.q2;
    q2.validate(dim);
    CoeffVector y0 = settings.y0.dim() == 0 ? CoeffVector(dim) : settings.y0;
    if (y0.dim() != dim)
        throw std::invalid_argument("estimate_bbar: y0 does not match the space dimension");

    const int steps = std::max(2, static_cast<int>(std::ceil((burn + horizon) / step)));
    const std::vector<double> times = uniform_grid(0.0, burn + horizon, steps);
    int first = 0;
    while (first < static_cast<int>(times.size()) && times[static_cast<std::size_t>(first)] < burn - 1e-12)
        ++first;

    auto one = [&](int r) {
        std::mt19937_64 engine = make_engine(seed, static_cast<std::uint64_t>(r), 0, StreamTag::wiener);
        const GridPath w = sample_q_wiener(space, q2, times, engine);
        const GridPath y = solve_frozen(space, coeffs, x, w, y0);
        CoeffVector acc(dim);
        int count = 0;
        for (int j = first; j < y.nodes(); ++j) {
            const CoeffVector v = coeffs.b(x, y.value(j));
            for (int m = 0; m < dim; ++m) acc.coords[static_cast<std::size_t>(m)] += v[m];
            ++count;
        }
        for (int m = 0; m < dim; ++m) acc.coords[static_cast<std::size_t>(m)] /= count;
        return acc;
    };
    const std::vector<CoeffVector> means =
        run_replicas<CoeffVector>(replicas, settings.parallel, one);

    BbarEstimate est;
    est.value = CoeffVector(dim);
    est.se = CoeffVector(dim);
    for (const CoeffVector& v : means)
        for (int m = 0; m < dim; ++m) est.value.coords[static_cast<std::size_t>(m)] += v[m];
    for (int m = 0; m < dim; ++m) est.value.coords[static_cast<std::size_t>(m)] /= replicas;
    if (replicas > 1) {
        for (const CoeffVector& v : means)
            for (int m = 0; m < dim; ++m) {
                const double d = v[m] - est.value[m];
                est.se.coords[static_cast<std::size_t>(m)] += d * d;
            }
        for (int m = 0; m < dim; ++m)
            est.se.coords[static_cast<std::size_t>(m)] = std::sqrt(
                est.se[m] / (static_cast<double>(replicas) * (replicas - 1)));
    }
    return est;
}

BbarEstimate estimate_bbar(const SpectralSpace& space, const CoefficientSystem& coeffs,
                           const CoeffVector& x, double burn_in, double horizon, int replicas,
                           std::uint64_t seed) {
    ErgodicSettings s;
    s.burn_in = burn_in;
    s.horizon = horizon;
    s.replicas = replicas;
    return estimate_bbar(space, coeffs, x, s, seed);
}

CoeffVector AveragedDrift::eval(const CoeffVector& x) const {
    if (mode == Mode::closed_form) {
        if (!closed) throw std::invalid_argument("AveragedDrift: closed form missing");
        return closed(x);
    }
    const int d = static_cast<int>(axes.size());
    if (x.dim() != d)
        throw std::invalid_argument("AveragedDrift: point dimension does not match the table");

    // locate the cell on each axis; a one-node axis is a constant direction
    std::vector<int> lo(static_cast<std::size_t>(d), 0);
    std::vector<double> frac(static_cast<std::size_t>(d), 0.0);
    for (int a = 0; a < d; ++a) {
        const std::vector<double>& ax = axes[static_cast<std::size_t>(a)];
        if (ax.size() == 1) continue;
        const double xi = x[a];
        if (xi < ax.front() - 1e-12 || xi > ax.back() + 1e-12)
            throw std::out_of_range("AveragedDrift: " + point_string(x) + " outside the table range [" +
                                    std::to_string(ax.front()) + ", " + std::to_string(ax.back()) +
                                    "] on axis " + std::to_string(a));
        std::size_t j = 0;
        while (j + 2 < ax.size() && ax[j + 1] <= xi) ++j;
        lo[static_cast<std::size_t>(a)] = static_cast<int>(j);
        frac[static_cast<std::size_t>(a)] =
            std::clamp((xi - ax[j]) / (ax[j + 1] - ax[j]), 0.0, 1.0);
    }

    std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
    for (int a = d - 2; a >= 0; --a)
        stride[static_cast<std::size_t>(a)] =
            stride[static_cast<std::size_t>(a) + 1] * axes[static_cast<std::size_t>(a) + 1].size();

    const int dim_out = values.front().dim();
    CoeffVector out(dim_out);
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        double wgt = 1.0;
        std::size_t idx = 0;
        bool skip = false;
        for (int a = 0; a < d; ++a) {
            const bool hi = (c >> a) & 1;
            const std::size_t n = axes[static_cast<std::size_t>(a)].size();
            if (n == 1) {
                if (hi) { skip = true; break; }
                continue;
            }
            wgt *= hi ? frac[static_cast<std::size_t>(a)] : 1.0 - frac[static_cast<std::size_t>(a)];
            idx += (static_cast<std::size_t>(lo[static_cast<std::size_t>(a)]) + (hi ? 1 : 0)) *
                   stride[static_cast<std::size_t>(a)];
        }
        if (skip || wgt == 0.0) continue;
        const CoeffVector& v = values[idx];
        for (int m = 0; m < dim_out; ++m) out.coords[static_cast<std::size_t>(m)] += wgt * v[m];
    }
    return out;
}

std::function<CoeffVector(const CoeffVector&)> AveragedDrift::as_function() const {
    AveragedDrift copy = *this;
    return [copy](const CoeffVector& x) { return copy.eval(x); };
}

AveragedDrift closed_form_drift(const CoefficientSystem& coeffs) {
    if (!coeffs.has_closed_bbar())
        throw std::invalid_argument("closed_form_drift: family '" + coeffs.family +
                                    "' has no closed-form averaged drift");
    AveragedDrift d;
    d.mode = AveragedDrift::Mode::closed_form;
    d.closed = coeffs.bbar;
    return d;
}

AveragedDrift build_bbar(const SpectralSpace& space, const CoefficientSystem& coeffs,
                         const std::vector<std::vector<double>>& axes,
                         const ErgodicSettings& settings, std::uint64_t seed) {
    const int d = space.dim();
    if (static_cast<int>(axes.size()) != d)
        throw std::invalid_argument("build_bbar: need one axis per mode");
    if (d > 3)
        throw std::invalid_argument(
            "build_bbar: tabulation supports at most 3 modes; use a closed-form family beyond that");
    std::size_t total = 1;
    for (const auto& ax : axes) {
        if (ax.empty()) throw std::invalid_argument("build_bbar: empty axis");
        for (std::size_t j = 0; j + 1 < ax.size(); ++j)
            if (ax[j + 1] <= ax[j]) throw std::invalid_argument("build_bbar: axis not ascending");
        total *= ax.size();
    }
    require_ergodic("build_bbar", space, coeffs);

    ErgodicSettings inner = settings;
    inner.parallel = false; // nodes fan out instead

    auto node_point = [&](std::size_t flat) {
        CoeffVector x(d);
        for (int a = d - 1; a >= 0; --a) {
            const std::size_t n = axes[static_cast<std::size_t>(a)].size();
            x.coords[static_cast<std::size_t>(a)] = axes[static_cast<std::size_t>(a)][flat % n];
            flat /= n;
        }
        return x;
    };

    auto one = [&](int node) {
        const std::uint64_t node_seed =
            derive_seed(seed, static_cast<std::uint64_t>(node), 0, StreamTag::probe);
        return estimate_bbar(space, coeffs, node_point(static_cast<std::size_t>(node)), inner,
                             node_seed);
    };
    const std::vector<BbarEstimate> table =
        run_replicas<BbarEstimate>(static_cast<int>(total), settings.parallel, one);

    AveragedDrift out;
    out.mode = AveragedDrift::Mode::tabulated;
    out.axes = axes;
    out.burn_in = settings.burn_in;
    out.horizon = settings.horizon;
    out.replicas = settings.replicas;
    out.values.reserve(total);
    out.ses.reserve(total);
    for (const BbarEstimate& e : table) {
        out.values.push_back(e.value);
        out.ses.push_back(e.se);
    }
    return out;
}

std::string averaged_drift_to_json(const AveragedDrift& drift) {
    if (drift.mode != AveragedDrift::Mode::tabulated)
        throw std::invalid_argument("averaged_drift_to_json: only tabulated drifts serialize");
    json j;
    j["mode"] = "tabulated";
    j["axes"] = drift.axes;
    j["burn_in"] = drift.burn_in;
    j["horizon"] = drift.horizon;
    j["replicas"] = drift.replicas;
    json vals = json::array(), ses = json::array();
    for (const auto& v : drift.values) vals.push_back(v.coords);
    for (const auto& s : drift.ses) ses.push_back(s.coords);
    j["values"] = vals;
    j["ses"] = ses;
    return j.dump(2);
}

AveragedDrift averaged_drift_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("mode", "") != std::string("tabulated"))
        throw std::invalid_argument("averaged_drift_from_json: expected a tabulated drift");
    AveragedDrift d;
    d.mode = AveragedDrift::Mode::tabulated;
    d.axes = j.at("axes").get<std::vector<std::vector<double>>>();
    d.burn_in = j.value("burn_in", 0.0);
    d.horizon = j.value("horizon", 0.0);
    d.replicas = j.value("replicas", 0);
    for (const auto& row : j.at("values")) d.values.emplace_back(row.get<std::vector<double>>());
    for (const auto& row : j.at("ses")) d.ses.emplace_back(row.get<std::vector<double>>());
    std::size_t total = 1;
    for (const auto& ax : d.axes) total *= ax.size();
    if (d.values.size() != total || d.ses.size() != total)
        throw std::invalid_argument("averaged_drift_from_json: table size does not match the axes");
    return d;
}

AssumptionReport check_assumptions(const SpectralSpace& space, const CoefficientSystem& coeffs,
                                   int sample_count, std::uint64_t seed) {
    AssumptionReport rep;
    rep.samples = sample_count;
    rep.eta = coeffs.eta(space.lambda1());
    rep.kappa = coeffs.kappa(space.lambda1());
    rep.a5_pass = rep.eta > 1.0 && rep.kappa > 0.0;

    const int dim = space.dim();
    std::mt19937_64 rng = make_engine(seed, 0, 0, StreamTag::probe);
    std::uniform_real_distribution<double> box(-3.0, 3.0);
    auto draw = [&]() {
        CoeffVector v(dim);
        for (int m = 0; m < dim; ++m) v.coords[static_cast<std::size_t>(m)] = box(rng);
        return v;
    };

    rep.a6_pass = true;
    for (int s = 0; s < sample_count; ++s) {
        const CoeffVector x1 = draw(), y1 = draw(), x2 = draw(), y2 = draw();
        CoeffVector db = coeffs.b(x1, y1), dF = coeffs.F(x1, y1), dG = coeffs.G_diag(x1, y1);
        const CoeffVector b2 = coeffs.b(x2, y2), F2 = coeffs.F(x2, y2), G2 = coeffs.G_diag(x2, y2);
        for (int m = 0; m < dim; ++m) {
            db.coords[static_cast<std::size_t>(m)] -= b2[m];
            dF.coords[static_cast<std::size_t>(m)] -= F2[m];
            dG.coords[static_cast<std::size_t>(m)] -= G2[m];
        }
        double dx = 0.0, dy = 0.0;
        for (int m = 0; m < dim; ++m) {
            dx += (x1[m] - x2[m]) * (x1[m] - x2[m]);
            dy += (y1[m] - y2[m]) * (y1[m] - y2[m]);
        }
        const double denom = std::sqrt(dx) + std::sqrt(dy);
        if (denom > 1e-9) {
            rep.lip_b = std::max(rep.lip_b, l2(db) / denom);
            rep.lip_fg = std::max(rep.lip_fg, (l2(dF) + l2(dG)) / denom);
        }

        const CoeffVector bv = coeffs.b(x1, y1), Fv = coeffs.F(x1, y1), Gv = coeffs.G_diag(x1, y1);
        const double grow = 1.0 + l2(x1) + l2(y1);
        rep.growth_fg = std::max(rep.growth_fg, (l2(Fv) + l2(Gv)) / grow);
        rep.growth_b = std::max(rep.growth_b, l2(bv) / grow);

        // one-sided slope of F in y at fixed slow argument
        const CoeffVector Fa = coeffs.F(x1, y1), Fb = coeffs.F(x1, y2);
        double num = 0.0, den = 0.0;
        for (int m = 0; m < dim; ++m) {
            const double d = y1[m] - y2[m];
            num += d * (Fa[m] - Fb[m]);
            den += d * d;
        }
        if (den > 1e-12) rep.beta3_onesided = std::max(rep.beta3_onesided, num / den);

        if (coeffs.c6 > 0.0) {
            const double ratio = (l2(bv) + l2(Gv)) / (coeffs.c6 * (1.0 + l2(x1)));
            rep.a6_ratio = std::max(rep.a6_ratio, ratio);
        }
    }
    rep.a6_pass = coeffs.c6 > 0.0 && rep.a6_ratio <= 1.0 + 1e-9;

    const double tol = 1e-9;
    rep.declared_consistent = rep.lip_b <= coeffs.c1 + tol && rep.lip_fg <= coeffs.c2 + tol &&
                              rep.growth_fg <= coeffs.c3 + tol && rep.growth_b <= coeffs.c4 + tol &&
                              rep.beta3_onesided <= coeffs.beta3 + tol;
    return rep;
}

std::string assumption_report_to_json(const AssumptionReport& rep) {
    json j;
    j["lip_b"] = rep.lip_b;
    j["lip_fg"] = rep.lip_fg;
    j["growth_fg"] = rep.growth_fg;
    j["growth_b"] = rep.growth_b;
    j["beta3_onesided"] = rep.beta3_onesided;
    j["a6_ratio"] = rep.a6_ratio;
    j["eta"] = rep.eta;
    j["kappa"] = rep.kappa;
    j["a5_pass"] = rep.a5_pass;
    j["a6_pass"] = rep.a6_pass;
    j["declared_consistent"] = rep.declared_consistent;
    j["samples"] = rep.samples;
    return j.dump(2);
}

SweepReport averaging_error_sweep(const SpectralSpace& space, const CoefficientSystem& coeffs,
                                  const std::function<CoeffVector(const CoeffVector&)>& bbar,
                                  const SimSetup& setup, const std::vector<ScaleParams>& schedule,
                                  int replicas, std::uint64_t seed, bool parallel) {
    if (schedule.empty()) throw std::invalid_argument("averaging_error_sweep: empty schedule");
    if (replicas < 1) throw std::invalid_argument("averaging_error_sweep: need replicas");
    for (const ScaleParams& s : schedule) {
        s.validate();
        if (s.epsilon > 0.0 && s.delta >= s.epsilon)
            throw std::invalid_argument(
                "averaging_error_sweep: schedule leaves the ratio regime (delta >= epsilon)");
    }

    const std::vector<double> slow = setup.slow_times();
    const GridPath xbar = solve_averaged(space, bbar, slow, setup.x0);
    const FbmFactor factor(setup.hurst, slow);

    struct Outcome {
        double sup = 0.0;
        bool ok = false;
    };

    SweepReport report;
    report.valid = true;
    for (const ScaleParams& scales : schedule) {
        SimSetup cell = setup;
        cell.substeps = std::max(setup.substeps, required_substeps(setup.T, setup.slow_steps, scales.delta));
        cell.validate(space, scales);
        const std::vector<double> fast = cell.fast_times();

        auto one = [&](int r) {
            Outcome o;
            std::mt19937_64 ef = make_engine(seed, static_cast<std::uint64_t>(r), 0, StreamTag::fbm);
            std::mt19937_64 ew = make_engine(seed, static_cast<std::uint64_t>(r), 0, StreamTag::wiener);
            const GridPath bh = sample_cylindrical_fbm(factor, space, cell.q1, ef);
            const GridPath w = sample_q_wiener(space, cell.q2, fast, ew);
            try {
                const SolveResult res = solve_slow_fast(space, coeffs, scales, bh, w, cell.x0, cell.y0);
                double sup = 0.0;
                for (int j = 0; j < res.slow.nodes(); ++j) {
                    double s2 = 0.0;
                    for (int m = 0; m < space.dim(); ++m) {
                        const double d = res.slow.at(j, m) - xbar.at(j, m);
                        s2 += d * d;
                    }
                    sup = std::max(sup, std::sqrt(s2));
                }
                o.sup = sup;
                o.ok = true;
            } catch (const SolverDivergence&) {
                o.ok = false;
            }
            return o;
        };
        const std::vector<Outcome> outs = run_replicas<Outcome>(replicas, parallel, one);

        SweepCell c;
        c.epsilon = scales.epsilon;
        c.delta = scales.delta;
        int good = 0;
        for (const Outcome& o : outs)
            if (o.ok) {
                c.mean_sup_error += o.sup;
                ++good;
            }
        c.abort_fraction = 1.0 - static_cast<double>(good) / replicas;
        if (good > 0) c.mean_sup_error /= good;
        if (good > 1) {
            double var = 0.0;
            for (const Outcome& o : outs)
                if (o.ok) var += (o.sup - c.mean_sup_error) * (o.sup - c.mean_sup_error);
            c.se = std::sqrt(var / (static_cast<double>(good) * (good - 1)));
        }
        if (c.abort_fraction > 0.01) report.valid = false;
        report.cells.push_back(c);
    }

    report.monotone = true;
    for (std::size_t i = 0; i + 1 < report.cells.size(); ++i)
        if (!(report.cells[i + 1].mean_sup_error < report.cells[i].mean_sup_error))
            report.monotone = false;
    return report;
}

std::string sweep_report_to_json(const SweepReport& report) {
    json cells = json::array();
    for (const SweepCell& c : report.cells) {
        json j;
        j["epsilon"] = c.epsilon;
        j["delta"] = c.delta;
        j["mean_sup_error"] = c.mean_sup_error;
        j["se"] = c.se;
        j["abort_fraction"] = c.abort_fraction;
        cells.push_back(j);
    }
    json out;
    out["cells"] = cells;
    out["monotone"] = report.monotone;
    out["valid"] = report.valid;
    return out.dump(2);
}

} // namespace mfbm
