#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "spin7/integrator.hpp"
#include "spin7/linalg.hpp"
#include "spin7/phase.hpp"

namespace spin7 {

struct EmptyTrajectoryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonPositiveGaugeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct WindowTooShortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One row of the reconstructed metric: cohomogeneity coordinate t and the
/// four metric components, plus the trace of the shape operator.  Components
/// whose Z-pair vanishes are +infinity markers.
struct MetricRow {
    double t, a, b, c, f, trL;
};

struct MetricProfile {
    std::vector<MetricRow> rows;
    double eta_ref = 0.0;
    double trL_ref = 1.0;
    double t_ref = 0.0;  // unknown offset to the singular orbit, reported not applied
};

enum class AsymptoticKind { ALC, AC, Inconclusive };

inline const char* to_string(AsymptoticKind k) {
    switch (k) {
        case AsymptoticKind::ALC: return "ALC";
        case AsymptoticKind::AC: return "AC";
        default: return "Inconclusive";
    }
}

struct Asymptotics {
    AsymptoticKind kind = AsymptoticKind::Inconclusive;
    std::optional<double> f_limit;
    std::optional<std::array<double, 4>> slopes;  // a, b, c, f per unit t
    double t_lo = 0, t_hi = 0;
    double fit_residual = 0;
};

/// Recover (t, a, b, c, f) from a phase trajectory.  1/trL solves
/// (1/trL)' = (1/trL) G and t is the running integral of 1/trL; both are
/// computed by the trapezoid rule on the sample grid.  gauge_trL0 fixes
/// trL at the first sample.
inline MetricProfile reconstruct(const Trajectory& traj, const CoprimePair& pair,
                                 double gauge_trL0 = 1.0) {
    if (traj.samples.empty()) throw EmptyTrajectoryError("reconstruct: empty trajectory");
    if (!(gauge_trL0 > 0)) throw NonPositiveGaugeError("reconstruct: gauge_trL0 must be > 0");

    const double inf = std::numeric_limits<double>::infinity();
    MetricProfile prof;
    prof.eta_ref = traj.samples.front().eta;
    prof.trL_ref = gauge_trL0;

    // u = log(1/trL), so u' = G exactly; trapezoid both quadratures.
    double u = -std::log(gauge_trL0);
    double t = 0.0;
    double g_prev = eval_G(traj.samples.front().point);
    double inv_prev = std::exp(u);
    double eta_prev = prof.eta_ref;

    prof.rows.reserve(traj.samples.size());
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        const double g = eval_G(s.point);
        if (i > 0) {
            const double h = s.eta - eta_prev;
            u += 0.5 * h * (g_prev + g);
            const double inv = std::exp(u);
            t += 0.5 * h * (inv_prev + inv);
            inv_prev = inv;
        }
        g_prev = g;
        eta_prev = s.eta;

        const double trL = 1.0 / inv_prev;
        const auto& p = s.point;
        MetricRow row;
        row.t = t;
        row.trL = trL;
        row.a = (p.z2 > 0 && p.z3 > 0) ? 1.0 / (trL * std::sqrt(p.z2 * p.z3)) : inf;
        row.b = (p.z1 > 0 && p.z3 > 0) ? 1.0 / (trL * std::sqrt(p.z1 * p.z3)) : inf;
        row.c = (p.z1 > 0 && p.z2 > 0) ? 1.0 / (trL * std::sqrt(p.z1 * p.z2)) : inf;
        row.f = p.z4 / trL;
        prof.rows.push_back(row);
    }
    (void)pair;
    return prof;
}

/// Fit a, b, c, f linearly against t over the final decade of t and decide
/// ALC vs AC per the slope criteria documented on Asymptotics.
inline Asymptotics classify_asymptotics(const MetricProfile& profile) {
    if (profile.rows.size() < 4)
        throw WindowTooShortError("classify_asymptotics: too few rows");
    const double t_end = profile.rows.back().t;
    if (!(t_end > 0) || t_end / std::max(profile.rows.front().t + 1.0, 1.0) < 100.0)
        throw WindowTooShortError(
            "classify_asymptotics: profile must cover two decades of t (t_end=" +
            std::to_string(t_end) + ")");

    const double t_lo = t_end / 10.0;
    std::vector<double> ts;
    std::array<std::vector<double>, 4> comps;
    for (const auto& r : profile.rows) {
        if (r.t < t_lo) continue;
        if (!std::isfinite(r.a) || !std::isfinite(r.b) || !std::isfinite(r.c)) continue;
        ts.push_back(r.t);
        comps[0].push_back(r.a);
        comps[1].push_back(r.b);
        comps[2].push_back(r.c);
        comps[3].push_back(r.f);
    }
    if (ts.size() < 4)
        throw WindowTooShortError("classify_asymptotics: final decade has too few rows");

    Asymptotics out;
    out.t_lo = t_lo;
    out.t_hi = t_end;

    std::array<LineFit, 4> fits;
    double worst_rel_residual = 0;
    for (int i = 0; i < 4; ++i) {
        fits[i] = fit_line(ts, comps[i]);
        const double scale =
            std::max(std::abs(fits[i].slope) * (t_end - t_lo), std::abs(fits[i].intercept));
        if (scale > 0)
            worst_rel_residual = std::max(worst_rel_residual, fits[i].rms_residual / scale);
    }
    out.fit_residual = worst_rel_residual;
    out.slopes = {fits[0].slope, fits[1].slope, fits[2].slope, fits[3].slope};

    const double f_mean =
        std::accumulate(comps[3].begin(), comps[3].end(), 0.0) / double(comps[3].size());
    const bool abc_linear =
        fits[0].slope > 0 && fits[1].slope > 0 && fits[2].slope > 0 &&
        worst_rel_residual < 1e-3;
    const double decade_span = t_end - t_lo;

    if (abc_linear && f_mean > 0 &&
        std::abs(fits[3].slope) * decade_span / f_mean < 1e-3) {
        out.kind = AsymptoticKind::ALC;
        out.f_limit = f_mean;
    } else if (abc_linear && fits[3].slope > 1e-3 * fits[0].slope) {
        out.kind = AsymptoticKind::AC;
    }
    return out;
}

}  // namespace spin7
