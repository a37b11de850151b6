#include "mfbm/deviation.hpp"

#include "mfbm/parallel.hpp"
#include "mfbm/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mfbm {
namespace {

using nlohmann::json;

constexpr double kCondCap = 1e8;

// centered differences inside, one-sided at the ends
GridPath grid_derivative(const GridPath& p) {
    const int n = p.nodes(), dim = p.dim();
    GridPath d = zero_path(p.times, dim);
    for (int m = 0; m < dim; ++m) {
        d.set_value(0, m, (p.at(1, m) - p.at(0, m)) / (p.times[1] - p.times[0]));
        for (int j = 1; j + 1 < n; ++j)
            d.set_value(j, m, (p.at(j + 1, m) - p.at(j - 1, m)) /
                                  (p.times[static_cast<std::size_t>(j) + 1] -
                                   p.times[static_cast<std::size_t>(j) - 1]));
        d.set_value(n - 1, m,
                    (p.at(n - 1, m) - p.at(n - 2, m)) /
                        (p.times[static_cast<std::size_t>(n) - 1] - p.times[static_cast<std::size_t>(n) - 2]));
    }
    return d;
}

GridPath cumulative_trapezoid(const GridPath& dens) {
    GridPath u = zero_path(dens.times, dens.dim());
    for (int j = 0; j + 1 < dens.nodes(); ++j) {
        const double dt = dens.times[static_cast<std::size_t>(j) + 1] - dens.times[static_cast<std::size_t>(j)];
        for (int m = 0; m < dens.dim(); ++m)
            u.set_value(j + 1, m, u.at(j, m) + 0.5 * dt * (dens.at(j, m) + dens.at(j + 1, m)));
    }
    return u;
}

void check_conditioning(const char* who, const CoeffVector& g, double t) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int m = 0; m < g.dim(); ++m) {
        const double a = std::abs(g[m]);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (lo == 0.0 || hi / lo > kCondCap) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s: diffusion singular at t = %.6g (condition number %.3g)", who, t,
                      lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo);
        throw std::runtime_error(buf);
    }
}

// every second node, always keeping the final one
GridPath subsample_half(const GridPath& p) {
    std::vector<int> idx;
    for (int j = 0; j < p.nodes(); j += 2) idx.push_back(j);
    if (idx.back() != p.nodes() - 1) idx.push_back(p.nodes() - 1);
    std::vector<double> times;
    times.reserve(idx.size());
    for (int j : idx) times.push_back(p.times[static_cast<std::size_t>(j)]);
    GridPath out(times, p.dim());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (int m = 0; m < p.dim(); ++m) out.set_value(static_cast<int>(i), m, p.at(idx[i], m));
    return out;
}

// 1/2 integral of the weighted squared density; infinite when a zero-weight
// mode is active
double half_energy(const GridPath& dens, const std::vector<double>& q1_lambdas, bool* infinite) {
    *infinite = false;
    const int dim = dens.dim();
    double total = 0.0;
    for (int m = 0; m < dim; ++m) {
        double mode = 0.0;
        for (int j = 0; j + 1 < dens.nodes(); ++j) {
            const double dt =
                dens.times[static_cast<std::size_t>(j) + 1] - dens.times[static_cast<std::size_t>(j)];
            mode += 0.5 * dt * (dens.at(j, m) * dens.at(j, m) + dens.at(j + 1, m) * dens.at(j + 1, m));
        }
        const double lam = q1_lambdas[static_cast<std::size_t>(m)];
        if (lam <= 0.0) {
            if (mode > 1e-20) *infinite = true;
            continue;
        }
        total += mode / lam;
    }
    return 0.5 * total;
}

// density in L2(V1) generating u through the Volterra map
GridPath control_density(const GridPath& u, const GridPath& udot, const HurstParam& hurst,
                         std::string* warning) {
    if (hurst.is_classical()) return udot;
    return apply_KH_inverse(hurst, u, warning);
}

RateReport rate_from_control(const MinimalControl& mc, const SpectralSpace& space,
                             const CovarianceSpec& q1, const HurstParam& hurst,
                             const char* regime) {
    q1.validate(space.dim());
    RateReport rep;
    rep.regime = regime;
    std::string warning;
    rep.minimal_control_dot = control_density(mc.u, mc.udot, hurst, &warning);
    if (!warning.empty()) rep.note = warning;

    bool infinite = false;
    rep.rate = half_energy(rep.minimal_control_dot, q1.lambdas, &infinite);
    if (infinite) {
        rep.rate = std::numeric_limits<double>::infinity();
        rep.note = "control active on a zero-weight noise mode; no finite-cost control exists";
        return rep;
    }

    // discretization estimate: redo the pipeline on the half grid
    const GridPath u_half = subsample_half(mc.u);
    const GridPath udot_half = subsample_half(mc.udot);
    const GridPath dens_half = control_density(u_half, udot_half, hurst, nullptr);
    bool inf_half = false;
    const double rate_half = half_energy(dens_half, q1.lambdas, &inf_half);
    rep.quadrature_error = std::abs(rep.rate - rate_half);
    return rep;
}

double wilson_center(int k, int n, double z) {
    return (k + 0.5 * z * z) / (n + z * z);
}

double wilson_half(int k, int n, double z) {
    const double kk = static_cast<double>(k);
    return z * std::sqrt(kk * (n - kk) / n + 0.25 * z * z) / (n + z * z);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[order[i]] = static_cast<double>(i);
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double mean = (n - 1) / 2.0;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ra[i] - mean) * (rb[i] - mean);
        da += (ra[i] - mean) * (ra[i] - mean);
        db += (rb[i] - mean) * (rb[i] - mean);
    }
    if (da == 0.0 || db == 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

} // namespace

MinimalControl minimal_control_ldp(const GridPath& phi,
                                   const std::function<CoeffVector(const CoeffVector&)>& bbar,
                                   const std::function<CoeffVector(const CoeffVector&)>& g_diag,
                                   const SpectralSpace& space, const CoeffVector& x0) {
    const char* who = "minimal_control_ldp";
    const int dim = space.dim();
    if (phi.dim() != dim) throw std::invalid_argument("minimal_control_ldp: path/space dimension mismatch");
    if (phi.nodes() < 3) throw std::invalid_argument("minimal_control_ldp: need at least 3 nodes");
    if (!bbar || !g_diag) throw std::invalid_argument("minimal_control_ldp: drift or diffusion missing");
    for (int m = 0; m < dim; ++m)
        if (std::abs(phi.at(0, m) - x0[m]) > 1e-8)
            throw std::invalid_argument("minimal_control_ldp: path does not start at x0");

    const GridPath dphi = grid_derivative(phi);
    GridPath udot = zero_path(phi.times, dim);
    for (int j = 0; j < phi.nodes(); ++j) {
        const CoeffVector x = phi.value(j);
        const CoeffVector bb = bbar(x);
        const CoeffVector g = g_diag(x);
        check_conditioning(who, g, phi.times[static_cast<std::size_t>(j)]);
        for (int m = 0; m < dim; ++m) {
            const double resid =
                dphi.at(j, m) + space.eigenvalues[static_cast<std::size_t>(m)] * phi.at(j, m) - bb[m];
            udot.set_value(j, m, resid / g[m]);
        }
    }
    MinimalControl out;
    out.udot = std::move(udot);
    out.u = cumulative_trapezoid(out.udot);
    return out;
}

RateReport rate_ldp(const GridPath& phi,
                    const std::function<CoeffVector(const CoeffVector&)>& bbar,
                    const std::function<CoeffVector(const CoeffVector&)>& g_diag,
                    const SpectralSpace& space, const CovarianceSpec& q1,
                    const HurstParam& hurst) {
    if (phi.nodes() < 3) throw std::invalid_argument("rate_ldp: need at least 3 nodes");
    if (std::abs(phi.t_begin()) > 1e-12)
        throw std::invalid_argument("rate_ldp: path must start at t = 0");
    const MinimalControl mc = minimal_control_ldp(phi, bbar, g_diag, space, phi.value(0));
    return rate_from_control(mc, space, q1, hurst, "ldp");
}

RateReport rate_mdp(const GridPath& phi, const GridPath& xbar,
                    const std::function<CoeffVector(const CoeffVector&, const CoeffVector&)>& dbbar,
                    const std::function<CoeffVector(const CoeffVector&)>& g_diag,
                    const SpectralSpace& space, const CovarianceSpec& q1,
                    const HurstParam& hurst) {
    const char* who = "rate_mdp";
    const int dim = space.dim();
    if (phi.dim() != dim || xbar.dim() != dim)
        throw std::invalid_argument("rate_mdp: dimension mismatch");
    if (phi.nodes() != xbar.nodes())
        throw std::invalid_argument("rate_mdp: phi and xbar live on different grids");
    if (phi.nodes() < 3) throw std::invalid_argument("rate_mdp: need at least 3 nodes");
    if (std::abs(phi.t_begin()) > 1e-12)
        throw std::invalid_argument("rate_mdp: path must start at t = 0");
    if (!dbbar)
        throw std::invalid_argument("rate_mdp: family has no registered averaged-drift derivative");
    for (int m = 0; m < dim; ++m)
        if (std::abs(phi.at(0, m)) > 1e-9)
            throw std::invalid_argument("rate_mdp: deviation path must start at zero");

    const GridPath dphi = grid_derivative(phi);
    GridPath udot = zero_path(phi.times, dim);
    for (int j = 0; j < phi.nodes(); ++j) {
        const CoeffVector xb = xbar.value(j);
        const CoeffVector z = phi.value(j);
        const CoeffVector dz = dbbar(xb, z);
        const CoeffVector g = g_diag(xb);
        check_conditioning(who, g, phi.times[static_cast<std::size_t>(j)]);
        for (int m = 0; m < dim; ++m) {
            const double resid =
                dphi.at(j, m) + space.eigenvalues[static_cast<std::size_t>(m)] * phi.at(j, m) - dz[m];
            udot.set_value(j, m, resid / g[m]);
        }
    }
    MinimalControl mc;
    mc.udot = std::move(udot);
    mc.u = cumulative_trapezoid(mc.udot);
    return rate_from_control(mc, space, q1, hurst, "mdp");
}

McLdpReport mc_rare_event(const SpectralSpace& space, const CoefficientSystem& coeffs,
                          const SimSetup& setup, const std::vector<ScaleParams>& schedule,
                          const std::vector<int>& replicas_per_cell, const RareEvent& event,
                          std::uint64_t seed, bool parallel, double rate_reference) {
    if (schedule.empty()) throw std::invalid_argument("mc_rare_event: empty schedule");
    if (replicas_per_cell.size() != schedule.size() && replicas_per_cell.size() != 1)
        throw std::invalid_argument("mc_rare_event: replica list does not match the schedule");
    for (int n : replicas_per_cell)
        if (n < 1000)
            throw std::invalid_argument("mc_rare_event: need at least 1000 replicas per cell");
    if (event.mode < 0 || event.mode >= space.dim())
        throw std::invalid_argument("mc_rare_event: event mode out of range");

    const std::vector<double> slow = setup.slow_times();
    const FbmFactor factor(setup.hurst, slow);

    McLdpReport report;
    report.rate_reference = rate_reference;
    bool any_hits = false;

    for (std::size_t c = 0; c < schedule.size(); ++c) {
        const ScaleParams& scales = schedule[c];
        SimSetup cell = setup;
        cell.substeps =
            std::max(setup.substeps, required_substeps(setup.T, setup.slow_steps, scales.delta));
        cell.validate(space, scales);
        const std::vector<double> fast = cell.fast_times();
        const int n = replicas_per_cell[replicas_per_cell.size() == 1 ? 0 : c];

        auto one = [&](int r) -> int {
            std::mt19937_64 ef = make_engine(seed, static_cast<std::uint64_t>(r), 0, StreamTag::fbm);
            std::mt19937_64 ew = make_engine(seed, static_cast<std::uint64_t>(r), 0, StreamTag::wiener);
            const GridPath bh = sample_cylindrical_fbm(factor, space, cell.q1, ef);
            const GridPath w = sample_q_wiener(space, cell.q2, fast, ew);
            try {
                const SolveResult res =
                    solve_slow_fast(space, coeffs, scales, bh, w, cell.x0, cell.y0);
                return res.slow.at(res.slow.nodes() - 1, event.mode) > event.threshold ? 1 : 0;
            } catch (const SolverDivergence&) {
                return 2;
            }
        };
        const std::vector<int> outs = run_replicas<int>(n, parallel, one);

        McCell mc;
        mc.epsilon = scales.epsilon;
        mc.delta = scales.delta;
        mc.replicas = n;
        for (int o : outs) {
            if (o == 1) ++mc.hits;
            if (o == 2) ++mc.aborted;
        }
        const int n_eff = n - mc.aborted;
        const double z = 1.96;
        if (n_eff > 0) {
            mc.p_hat = static_cast<double>(mc.hits) / n_eff;
            mc.ci_lo = std::max(0.0, wilson_center(mc.hits, n_eff, z) - wilson_half(mc.hits, n_eff, z));
            mc.ci_hi = std::min(1.0, wilson_center(mc.hits, n_eff, z) + wilson_half(mc.hits, n_eff, z));
        }
        if (mc.hits == 0) {
            mc.censored = true;
            // one-sided: the upper probability bound gives a lower rate bound
            mc.minus_eps_log_p = mc.ci_hi > 0.0 ? -scales.epsilon * std::log(mc.ci_hi) : 0.0;
        } else {
            any_hits = true;
            mc.minus_eps_log_p = -scales.epsilon * std::log(mc.p_hat);
        }
        report.cells.push_back(mc);
    }
    if (!any_hits) report.note = "insufficient tail resolution: no hits in any cell";
    return report;
}

LaplaceEstimate laplace_functional(const SpectralSpace& space, const CoefficientSystem& coeffs,
                                   const SimSetup& setup, const ScaleParams& scales,
                                   const std::function<double(const GridPath&)>& h, double h_bound,
                                   int replicas, std::uint64_t seed, bool parallel) {
    if (!h) throw std::invalid_argument("laplace_functional: functional missing");
    if (!(h_bound > 0.0) || !std::isfinite(h_bound))
        throw std::invalid_argument(
            "laplace_functional: a finite positive bound on |h| must be declared");
    if (replicas < 2) throw std::invalid_argument("laplace_functional: need at least 2 replicas");
    if (scales.epsilon <= 0.0)
        throw std::invalid_argument("laplace_functional: epsilon must be positive");

    SimSetup cell = setup;
    cell.substeps = std::max(setup.substeps, required_substeps(setup.T, setup.slow_steps, scales.delta));
    cell.validate(space, scales);
    const std::vector<double> slow = cell.slow_times();
    const std::vector<double> fast = cell.fast_times();
    const FbmFactor factor(setup.hurst, slow);

    struct Draw {
        double a = 0.0; // -h/epsilon
        bool ok = false;
    };
    auto one = [&](int r) {
        Draw d;
        std::mt19937_64 ef = make_engine(seed, static_cast<std::uint64_t>(r), 0, StreamTag::fbm);
        std::mt19937_64 ew = make_engine(seed, static_cast<std::uint64_t>(r), 0, StreamTag::wiener);
        const GridPath bh = sample_cylindrical_fbm(factor, space, cell.q1, ef);
        const GridPath w = sample_q_wiener(space, cell.q2, fast, ew);
        try {
            const SolveResult res = solve_slow_fast(space, coeffs, scales, bh, w, cell.x0, cell.y0);
            const double hv = h(res.slow);
            if (!std::isfinite(hv) || std::abs(hv) > h_bound + 1e-12)
                throw std::runtime_error("laplace_functional: h exceeded its declared bound");
            d.a = -hv / scales.epsilon;
            d.ok = true;
        } catch (const SolverDivergence&) {
            d.ok = false;
        }
        return d;
    };
    const std::vector<Draw> draws = run_replicas<Draw>(replicas, parallel, one);

    LaplaceEstimate est;
    double amax = -std::numeric_limits<double>::infinity();
    int good = 0;
    for (const Draw& d : draws) {
        if (!d.ok) { ++est.aborted; continue; }
        amax = std::max(amax, d.a);
        ++good;
    }
    if (good < 2) throw std::runtime_error("laplace_functional: too many diverged replicas");

    double sum = 0.0, sum2 = 0.0;
    for (const Draw& d : draws) {
        if (!d.ok) continue;
        const double w = std::exp(d.a - amax);
        sum += w;
        sum2 += w * w;
    }
    const double mean = sum / good;
    const double var = std::max(0.0, sum2 / good - mean * mean);
    const double se = std::sqrt(var / good);
    est.value = -scales.epsilon * (amax + std::log(mean) - 0.0);
    const double lo_mean = std::max(mean - 1.96 * se, mean * 1e-12);
    const double hi_mean = mean + 1.96 * se;
    est.ci_lo = -scales.epsilon * (amax + std::log(hi_mean));
    est.ci_hi = -scales.epsilon * (amax + std::log(lo_mean));
    return est;
}

ComparisonVerdict rate_vs_mc(const McLdpReport& report, double rate_reference) {
    // rate claims attach only to the vanishing-ratio regime
    for (std::size_t i = 0; i + 1 < report.cells.size(); ++i) {
        const double r0 = report.cells[i].delta / report.cells[i].epsilon;
        const double r1 = report.cells[i + 1].delta / report.cells[i + 1].epsilon;
        if (!(r1 < r0))
            throw std::invalid_argument(
                "rate_vs_mc: schedule ratios delta/epsilon must decrease along the schedule");
    }

    std::vector<double> idx, est;
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        if (report.cells[i].censored) continue;
        idx.push_back(static_cast<double>(i));
        est.push_back(report.cells[i].minus_eps_log_p);
    }
    if (idx.size() < 2)
        throw std::invalid_argument("rate_vs_mc: need at least 2 usable (non-censored) cells");

    ComparisonVerdict v;
    v.smallest_eps_estimate = est.back();

    if (rate_reference == 0.0) {
        v.pass = std::abs(v.smallest_eps_estimate) <= 0.02;
        v.conclusive = v.pass;
        v.diagnostics = v.pass ? "estimate vanishes with the zero reference"
                               : "zero reference but the estimate does not vanish";
        return v;
    }

    std::vector<double> neg_dist;
    neg_dist.reserve(est.size());
    for (double e : est) neg_dist.push_back(-std::abs(e - rate_reference));
    v.trend_spearman = spearman(idx, neg_dist);

    const bool in_band = v.smallest_eps_estimate >= 0.5 * rate_reference &&
                         v.smallest_eps_estimate <= 1.5 * rate_reference;
    const bool trending = v.trend_spearman >= 0.8;
    v.pass = in_band && trending;
    v.conclusive = v.pass;
    std::ostringstream d;
    d << "smallest-eps estimate " << v.smallest_eps_estimate << " vs reference " << rate_reference
      << (in_band ? " (in band)" : " (outside [0.5, 1.5] band)") << "; approach trend "
      << v.trend_spearman << (trending ? " (monotone enough)" : " (too weak)");
    v.diagnostics = d.str();
    return v;
}

std::string rate_report_to_json(const RateReport& report) {
    json j;
    j["rate"] = std::isfinite(report.rate) ? json(report.rate) : json("infinity");
    j["quadrature_error"] = report.quadrature_error;
    j["regime"] = report.regime;
    j["note"] = report.note;
    j["control_nodes"] = report.minimal_control_dot.nodes();
    return j.dump(2);
}

std::string mc_report_to_json(const McLdpReport& report) {
    json cells = json::array();
    for (const McCell& c : report.cells) {
        json j;
        j["epsilon"] = c.epsilon;
        j["delta"] = c.delta;
        j["replicas"] = c.replicas;
        j["hits"] = c.hits;
        j["aborted"] = c.aborted;
        j["p_hat"] = c.p_hat;
        j["ci_lo"] = c.ci_lo;
        j["ci_hi"] = c.ci_hi;
        j["minus_eps_log_p"] = c.minus_eps_log_p;
        j["censored"] = c.censored;
        cells.push_back(j);
    }
    json out;
    out["cells"] = cells;
    if (std::isfinite(report.rate_reference)) out["rate_reference"] = report.rate_reference;
    out["note"] = report.note;
    return out.dump(2);
}

void write_mc_csv(const McLdpReport& report, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_mc_csv: cannot open " + path);
    f << "epsilon,p_hat,ci_lo,ci_hi,minus_eps_log_p,rate_reference\n";
    char buf[256];
    for (const McCell& c : report.cells) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", c.epsilon, c.p_hat,
                      c.ci_lo, c.ci_hi, c.minus_eps_log_p, report.rate_reference);
        f << buf;
    }
}

} // namespace mfbm
