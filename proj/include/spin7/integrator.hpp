#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spin7/critical_points.hpp"
#include "spin7/dynamics.hpp"
#include "spin7/invariant_sets.hpp"
#include "spin7/pair.hpp"
#include "spin7/phase.hpp"

namespace spin7 {

class DegenerateSampleError : public DomainError {
  public:
    using DomainError::DomainError;
};

enum class Projection { off, trace_only, full };

inline const char* to_string(Projection p) {
    switch (p) {
        case Projection::off: return "off";
        case Projection::trace_only: return "trace_only";
        default: return "full";
    }
}

struct IntegratorSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    double eta_max_span = 60.0;
    long max_steps = 1000000;
    Projection projection = Projection::trace_only;
    double sample_stride = 0.05;
};

struct Sample {
    double eta;
    PhasePoint point;
    ResidualReport residuals;
};

struct Event {
    enum class Kind { EnterSet, ExitSet, Near, MonotoneViolation };
    Kind kind;
    double eta;
    std::string subject;  // set name, landmark label, or quantity name
    double value = 0.0;   // distance for Near, ratio jump for MonotoneViolation

    std::string describe() const {
        switch (kind) {
            case Kind::EnterSet: return "enter," + subject;
            case Kind::ExitSet: return "exit," + subject;
            case Kind::Near: return "near," + subject;
            default: return "monotone_violation," + subject;
        }
    }
};

enum class Terminal { SpanExhausted, ConvergedTo, Blowup, StepFailure, ConstraintBreach };

inline const char* to_string(Terminal t) {
    switch (t) {
        case Terminal::SpanExhausted: return "SpanExhausted";
        case Terminal::ConvergedTo: return "ConvergedTo";
        case Terminal::Blowup: return "Blowup";
        case Terminal::StepFailure: return "StepFailure";
        default: return "ConstraintBreach";
    }
}

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<Event> events;
    Terminal terminal = Terminal::SpanExhausted;
    std::optional<CriticalPoint> converged_to;

    const Sample& back() const { return samples.back(); }
};

namespace detail {

/// Restore the trace identity 2X1+2X2+2X3+X4 = 1 by shifting X along the
/// gradient direction (2,2,2,1)/13 of the trace functional.
inline void project_trace(PhasePoint& p) {
    const double d = 1.0 - (2 * p.x1 + 2 * p.x2 + 2 * p.x3 + p.x4);
    p.x1 += 2 * d / 13;
    p.x2 += 2 * d / 13;
    p.x3 += 2 * d / 13;
    p.x4 += d / 13;
}

/// Full projection onto the branch surface: set every X_j from the S_j row
/// (exact), then take one Newton step on the uniform rescaling of Z1..Z3
/// that restores 2(Z1+Z2+Z3) - X4 = 1.  Conservation and trace hold
/// identically on the S-surface together with the Z-sum identity.
inline void project_full(PhasePoint& p, const CoprimePair& pair, Branch branch) {
    const double s = branch_sign(branch);
    const double c1 = double(pair.k() + pair.l()) / (2.0 * pair.delta());
    const double c2 = double(pair.l()) / (2.0 * pair.delta());
    const double c3 = double(pair.k()) / (2.0 * pair.delta());

    const double zsum = p.z1 + p.z2 + p.z3;
    const double x4b = s * (c1 * p.z2 * p.z3 - c2 * p.z1 * p.z3 - c3 * p.z1 * p.z2) * p.z4;
    const double h1 = 2 * zsum - x4b - 1;
    const double dh1 = 2 * zsum - 2 * x4b;
    if (std::abs(dh1) > 1e-12) {
        const double scale = 1.0 - h1 / dh1;
        p.z1 *= scale;
        p.z2 *= scale;
        p.z3 *= scale;
    }
    p.x4 = s * (c1 * p.z2 * p.z3 - c2 * p.z1 * p.z3 - c3 * p.z1 * p.z2) * p.z4;
    p.x1 = p.z2 + p.z3 - p.z1 - s * c1 * p.z2 * p.z3 * p.z4;
    p.x2 = p.z3 + p.z1 - p.z2 + s * c2 * p.z1 * p.z3 * p.z4;
    p.x3 = p.z1 + p.z2 - p.z3 + s * c3 * p.z1 * p.z2 * p.z4;
}

/// Cubic Hermite interpolation of the step [eta0, eta0+h] at fraction u.
inline PhasePoint hermite(const PhasePoint& y0, const Vec8& f0, const PhasePoint& y1,
                          const Vec8& f1, double h, double u) {
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    PhasePoint out;
    for (int i = 0; i < 8; ++i)
        out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
    return out;
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of the phase flow with
/// per-step projection, residual monitoring, set-entry events, landmark
/// proximity events, and convergence/blow-up termination.
inline Trajectory integrate(const PhasePoint& start, const CoprimePair& pair, Branch branch,
                            const IntegratorSettings& settings,
                            const std::vector<SetId>& watch = {},
                            const std::vector<CriticalPoint>& landmarks = {}) {
    {
        const auto rep = residuals(start, pair, branch);
        if (rep.max_norm() > 10.0 * settings.rtol + 1e-12)
            throw DomainError("integrate: start violates branch constraints (residual " +
                              std::to_string(rep.max_norm()) + ")");
    }

    // Dormand-Prince coefficients (FSAL).
    static constexpr double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
    static constexpr double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    static constexpr double e[7] = {
        35.0 / 384 - 5179.0 / 57600, 0, 500.0 / 1113 - 7571.0 / 16695,
        125.0 / 192 - 393.0 / 640,   -2187.0 / 6784 + 92097.0 / 339200,
        11.0 / 84 - 187.0 / 2100,    -1.0 / 40,
    };
    (void)c;

    Trajectory traj;
    PhasePoint y = start;
    double eta = 0.0;

    auto record = [&](double e_, const PhasePoint& p) {
        traj.samples.push_back({e_, p, residuals(p, pair, branch)});
    };
    record(eta, y);

    // Watched membership scales the on-surface tolerance with the squared
    // point magnitude: the defining equalities are polynomial in the
    // coordinates, so their floating-point residual grows with |y| along
    // blow-up runs even though the trajectory never leaves the set.
    auto watched_inside = [&pair](const PhasePoint& p, const SetId& id) {
        const double s = std::max(1.0, max_abs(p.to_array()) / 10.0);
        return member(p, id, pair, kOnSurfaceTol * s * s).inside;
    };

    std::vector<bool> inside(watch.size());
    for (size_t i = 0; i < watch.size(); ++i) {
        inside[i] = watched_inside(y, watch[i]);
        if (inside[i])
            traj.events.push_back({Event::Kind::EnterSet, eta, watch[i].name(), 0.0});
    }
    std::vector<bool> near_fired(landmarks.size(), false);

    Vec8 f = vector_field(y, pair).derivative;
    double h = settings.sample_stride;
    double err_prev = 1.0;
    const double hmin = 1e-14;

    for (long step = 0; step < settings.max_steps; ++step) {
        if (eta >= settings.eta_max_span - 1e-9) {
            traj.terminal = Terminal::SpanExhausted;
            return traj;
        }
        h = std::min({h, settings.sample_stride, settings.eta_max_span - eta});
        if (h < hmin) {
            // Near a finite-time pole the required step collides with hmin
            // just before the magnitude threshold; an already-enormous state
            // is a blow-up, not a controller failure.
            traj.terminal =
                max_abs(y.to_array()) > 1e4 ? Terminal::Blowup : Terminal::StepFailure;
            return traj;
        }

        // Stage evaluations.
        Vec8 k[7];
        k[0] = f;
        PhasePoint ystage;
        for (int s = 1; s < 7; ++s) {
            for (int i = 0; i < 8; ++i) {
                double acc = 0;
                for (int j = 0; j < s; ++j) acc += A[s][j] * k[j][i];
                ystage[i] = y[i] + h * acc;
            }
            k[s] = vector_field(ystage, pair).derivative;
        }
        // Stage 7 uses the b-row of the 5th-order solution, so ystage is it.
        PhasePoint ynew = ystage;

        // Error estimate against the embedded 4th-order solution.
        double errnorm = 0;
        for (int i = 0; i < 8; ++i) {
            double ei = 0;
            for (int s = 0; s < 7; ++s) ei += e[s] * k[s][i];
            ei *= h;
            const double sc =
                settings.atol + settings.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            errnorm += (ei / sc) * (ei / sc);
        }
        errnorm = std::sqrt(errnorm / 8.0);

        if (!std::isfinite(errnorm)) {
            // A stage overflowed; shrink hard and retry (the h < hmin guard
            // above turns persistent overflow into StepFailure).
            h *= 0.1;
            continue;
        }
        if (errnorm > 1.0) {
            // Reject; shrink with the standard controller and retry.
            h *= std::clamp(0.9 * std::pow(errnorm, -0.2), 0.1, 1.0);
            continue;
        }

        // Accept.  PI controller for the next step.
        const double fac = 0.9 * std::pow(std::max(errnorm, 1e-16), -0.17) *
                           std::pow(err_prev, 0.04);
        err_prev = std::max(errnorm, 1e-16);
        const double hnext = h * std::clamp(fac, 0.2, 5.0);

        const Vec8 fnew = vector_field(ynew, pair).derivative;
        const double eta_new = eta + h;

        // Undershoot clamp on the non-negative coordinates.
        for (int i : {3, 4, 5, 6, 7})
            if (ynew[i] < 0 && ynew[i] > -settings.atol) ynew[i] = 0;

        switch (settings.projection) {
            case Projection::trace_only: detail::project_trace(ynew); break;
            case Projection::full: detail::project_full(ynew, pair, branch); break;
            case Projection::off: break;
        }

        // Set-entry/exit events, refined by bisection on the Hermite
        // interpolant of this step.  Frozen once the point magnitude exceeds
        // 1e3: past that, floating-point evaluation of the defining
        // equalities can no longer resolve the on-surface tolerance, so a
        // sign flip there would be rounding noise, not a crossing.
        for (size_t w = 0; w < watch.size() && max_abs(ynew.to_array()) <= 1e3; ++w) {
            const bool now = watched_inside(ynew, watch[w]);
            if (now == inside[w]) continue;
            double lo = 0, hi = 1;
            while ((hi - lo) * h > 1e-8) {
                const double mid = 0.5 * (lo + hi);
                const PhasePoint pm = detail::hermite(y, k[0], ynew, fnew, h, mid);
                if (watched_inside(pm, watch[w]) == inside[w])
                    lo = mid;
                else
                    hi = mid;
            }
            traj.events.push_back({now ? Event::Kind::EnterSet : Event::Kind::ExitSet,
                                   eta + 0.5 * (lo + hi) * h, watch[w].name(), 0.0});
            inside[w] = now;
        }

        y = ynew;
        f = fnew;
        eta = eta_new;
        record(eta, y);

        // Landmark proximity and convergence.
        for (size_t m = 0; m < landmarks.size(); ++m) {
            const double d = distance(y, landmarks[m].point);
            if (d < 1e-4 && !near_fired[m]) {
                traj.events.push_back({Event::Kind::Near, eta, landmarks[m].label(), d});
                near_fired[m] = true;
            } else if (d > 2e-4) {
                near_fired[m] = false;
            }
            if (d < 1e-6 && max_abs(f) < 1e-8) {
                traj.terminal = Terminal::ConvergedTo;
                traj.converged_to = landmarks[m];
                return traj;
            }
        }

        if (max_abs(y.to_array()) > 1e6) {
            traj.terminal = Terminal::Blowup;
            return traj;
        }

        if (settings.projection == Projection::off &&
            traj.samples.back().residuals.max_norm() > 1e3 * settings.rtol) {
            traj.terminal = Terminal::ConstraintBreach;
            return traj;
        }

        h = hnext;
    }
    traj.terminal = Terminal::SpanExhausted;
    return traj;
}

/// Report from checking that Z4/(Z1 Z2 Z3)^2 never increases along a
/// trajectory beyond relative slack 1e-9.
struct MonotoneReport {
    struct Violation {
        double eta;
        double previous;
        double current;
    };
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

inline MonotoneReport monotone_check(const Trajectory& traj) {
    MonotoneReport rep;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.samples) {
        const double denom = s.point.z1 * s.point.z2 * s.point.z3;
        if (denom == 0)
            throw DegenerateSampleError("monotone_check: Z1 Z2 Z3 vanishes at eta=" +
                                        std::to_string(s.eta));
        const double ratio = s.point.z4 / (denom * denom);
        if (ratio > prev * (1 + 1e-9)) rep.violations.push_back({s.eta, prev, ratio});
        prev = std::min(prev, ratio);
    }
    return rep;
}

}  // namespace spin7
