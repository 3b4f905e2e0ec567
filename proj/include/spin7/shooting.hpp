#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "spin7/critical_points.hpp"
#include "spin7/integrator.hpp"
#include "spin7/invariant_sets.hpp"
#include "spin7/pair.hpp"
#include "spin7/phase.hpp"

namespace spin7 {

struct NegativeZError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct BracketInvalidError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSeparatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShootConfig {
    double theta = 0.0;
    double epsilon = 1e-6;
    double eta0 = 0.0;
    IntegratorSettings integrator{};

    ShootConfig() {
        // Classification needs the long approach to P_ALC and exact surface
        // residuals; the integrator's own defaults target generic runs.
        integrator.eta_max_span = 200.0;
        integrator.projection = Projection::full;
    }
};

enum class Fate { ALC, AC, FiberBlowup, Undetermined };

inline const char* to_string(Fate f) {
    switch (f) {
        case Fate::ALC: return "ALC";
        case Fate::AC: return "AC";
        case Fate::FiberBlowup: return "FiberBlowup";
        default: return "Undetermined";
    }
}

struct ShootResult {
    Fate fate = Fate::Undetermined;
    std::optional<Branch> ac_branch;       // set iff fate == AC
    Trajectory trajectory;
    std::optional<std::string> entered;    // first of D/B entered, by name
};

/// Seed point of gamma_theta^i: the Type I point offset by epsilon along the
/// unstable eigenframe, then projected back onto the branch surface.
inline PhasePoint seed(const CoprimePair& pair, const OrbitLabel& orbit,
                       const ShootConfig& cfg) {
    if (cfg.theta < 0 || cfg.theta > std::acos(-1.0) + 1e-15)
        throw DomainError("seed: theta must lie in [0, pi]");
    const CriticalPoint p0 = type1_point(pair, orbit);
    if (cfg.epsilon == 0) return p0.point;
    if (cfg.epsilon < 0) throw DomainError("seed: epsilon must be non-negative");

    const UnstableFrame frame = unstable_frame(pair, orbit);
    PhasePoint p = p0.point;
    const double s1 = std::cos(cfg.theta), s2 = std::sin(cfg.theta);
    for (int i = 0; i < 8; ++i) p[i] += cfg.epsilon * (s1 * frame.v1[i] + s2 * frame.v2[i]);

    // Two Newton sweeps of the surface projection (each is one Newton step
    // on the Z-sum identity plus exact X recovery).
    detail::project_full(p, pair, orbit.branch());
    detail::project_full(p, pair, orbit.branch());

    for (int i = 4; i < 8; ++i)
        if (p[i] < 0)
            throw NegativeZError("seed: Z" + std::to_string(i - 3) +
                                 " negative after projection (theta=" +
                                 std::to_string(cfg.theta) + ")");
    return p;
}

/// Integrate the seed and classify its fate.
inline ShootResult classify(const CoprimePair& pair, const OrbitLabel& orbit,
                            const ShootConfig& cfg) {
    const Branch branch = orbit.branch();
    const SetId d_set(branch == Branch::plus ? SetId::Tag::DPlus : SetId::Tag::DMinus);
    const SetId b_set(branch == Branch::plus ? SetId::Tag::BPlus : SetId::Tag::BMinus);

    const CriticalPoint alc = alc_point();
    const CriticalPoint ac = solve_ac(pair, branch);

    ShootResult res;
    res.trajectory = integrate(seed(pair, orbit, cfg), pair, branch, cfg.integrator,
                               {d_set, b_set}, {alc, ac, q0_point(pair, orbit)});

    for (const auto& ev : res.trajectory.events) {
        if (ev.kind == Event::Kind::EnterSet) {
            res.entered = ev.subject;
            break;
        }
    }

    if (res.trajectory.terminal == Terminal::ConvergedTo) {
        const auto& cp = *res.trajectory.converged_to;
        if (cp.kind == PointKind::TypeII_ALC) {
            res.fate = Fate::ALC;
        } else if (cp.kind == PointKind::TypeV_AC) {
            res.fate = Fate::AC;
            res.ac_branch = cp.branch;
        }
    } else if (res.trajectory.terminal == Terminal::Blowup && res.entered &&
               *res.entered == b_set.name()) {
        res.fate = Fate::FiberBlowup;
    }
    return res;
}

struct BisectResult {
    double theta_i;
    ShootResult boundary;
    double min_distance_ac;  // over the boundary run, to P_AC of the orbit's branch
};

namespace detail {

/// Which of D/B does gamma_theta enter first?  +1 for D, -1 for B, 0 for
/// neither within the (repeatedly doubled) span.
inline int first_entry_side(const CoprimePair& pair, const OrbitLabel& orbit, double theta,
                            const ShootConfig& base) {
    ShootConfig cfg = base;
    cfg.theta = theta;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const ShootResult r = classify(pair, orbit, cfg);
        if (r.entered) {
            const bool is_d = r.entered->front() == 'D';
            return is_d ? +1 : -1;
        }
        cfg.integrator.eta_max_span *= 2;
    }
    return 0;
}

}  // namespace detail

/// Bisection for theta_i = sup{theta : gamma_theta^i enters D+ u D-}.  The
/// boundary run must shadow the separatrix into P_AC of the orbit's branch.
inline BisectResult bisect_theta(const CoprimePair& pair, const OrbitLabel& orbit,
                                 double tol_theta, const ShootConfig& base = ShootConfig{}) {
    if (tol_theta < 1e-12) throw DomainError("bisect_theta: tol_theta must be >= 1e-12");
    const double pi = std::acos(-1.0);
    double lo = 0.05, hi = pi - 0.05;

    const int side_lo = detail::first_entry_side(pair, orbit, lo, base);
    const int side_hi = detail::first_entry_side(pair, orbit, hi, base);
    if (side_lo != +1 || side_hi != -1)
        throw BracketInvalidError("bisect_theta: endpoints classify as (" +
                                  std::to_string(side_lo) + "," + std::to_string(side_hi) +
                                  "); expected D-entry at lo, B-entry at hi");

    while (hi - lo > tol_theta) {
        const double mid = 0.5 * (lo + hi);
        const int side = detail::first_entry_side(pair, orbit, mid, base);
        if (side >= 0)
            lo = mid;
        else
            hi = mid;
    }
    const double theta_i = 0.5 * (lo + hi);

    // The near-boundary run shadows the separatrix toward P_AC.
    ShootConfig cfg = base;
    cfg.theta = theta_i;
    cfg.integrator.eta_max_span = std::max(cfg.integrator.eta_max_span, 300.0);
    ShootResult boundary = classify(pair, orbit, cfg);

    const CriticalPoint ac = solve_ac(pair, orbit.branch());
    double min_dist = std::numeric_limits<double>::infinity();
    for (const auto& s : boundary.trajectory.samples)
        min_dist = std::min(min_dist, distance(s.point, ac.point));
    if (min_dist > 1e-2)
        throw NoSeparatrixError("bisect_theta: boundary run never approaches P_AC"
                                " (min distance " + std::to_string(min_dist) + ")");
    return {theta_i, std::move(boundary), min_dist};
}

}  // namespace spin7
