#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "spin7/dynamics.hpp"
#include "spin7/pair.hpp"
#include "spin7/phase.hpp"

namespace spin7 {

/// Identifier for every named invariant set.  W carries an orbit label.
struct SetId {
    enum class Tag {
        CRF,
        CSpinPlus,
        CSpinMinus,
        CG2,
        DPlus,
        DMinus,
        BPlus,
        BMinus,
        APlus,
        AMinus,
        W,
    };

    Tag tag;
    std::optional<OrbitLabel> orbit;  // set iff tag == W

    SetId(Tag t) : tag(t), orbit(std::nullopt) {}
    static SetId w_curve(const OrbitLabel& o) {
        SetId id(Tag::W);
        id.orbit = o;
        return id;
    }

    std::string name() const {
        switch (tag) {
            case Tag::CRF: return "C_RF";
            case Tag::CSpinPlus: return "C_Spin+";
            case Tag::CSpinMinus: return "C_Spin-";
            case Tag::CG2: return "C_G2";
            case Tag::DPlus: return "D+";
            case Tag::DMinus: return "D-";
            case Tag::BPlus: return "B+";
            case Tag::BMinus: return "B-";
            case Tag::APlus: return "A+";
            case Tag::AMinus: return "A-";
            default: return std::string("W_") + to_string(orbit->fiber);
        }
    }
};

/// Result of a membership query.  margin is the minimum slack over all
/// defining conditions: inequalities contribute their slack directly,
/// equalities contribute -|residual| so "inside" demands on-surface.
struct Membership {
    bool inside;
    double margin;
};

/// Ratio coordinates used by the D-set boundary analysis.  alpha and beta
/// here are plain ratios Z2/Z1 and Z3/Z1; the square-root convention used
/// by the Xi/Theta polynomials is taken at each call site.
struct RatioCoords {
    double alpha;
    double beta;
    double zeta;  // Z1*Z4
};

inline RatioCoords ratio_coords(const PhasePoint& p) {
    if (!(p.z1 > 0)) throw DomainError("ratio_coords: Z1 must be positive");
    return {p.z2 / p.z1, p.z3 / p.z1, p.z1 * p.z4};
}

/// The S^1-fiber weight (k sqrt(Z1 Z2) + l sqrt(Z1 Z3) + (k+l) sqrt(Z2 Z3)) Z4.
/// Its level 2*delta bounds the D-sets and A-sets.
inline double fiber_weight(const PhasePoint& p, const CoprimePair& pair) {
    const std::array<double, 4> z{p.z1, p.z2, p.z3, p.z4};
    for (double zj : z)
        if (zj < -kOnSurfaceTol)
            throw DomainError("fiber_weight: negative Z coordinate " + std::to_string(zj));
    const double z1 = std::max(p.z1, 0.0), z2 = std::max(p.z2, 0.0), z3 = std::max(p.z3, 0.0);
    return (pair.k() * std::sqrt(z1 * z2) + pair.l() * std::sqrt(z1 * z3) +
            (pair.k() + pair.l()) * std::sqrt(z2 * z3)) *
           p.z4;
}

namespace detail {

inline void meet_eq(double& margin, double residual) {
    margin = std::min(margin, -std::abs(residual));
}
inline void meet_ge(double& margin, double slack) { margin = std::min(margin, slack); }

inline double crf_margin(const PhasePoint& p, const CoprimePair& pair) {
    const auto r = eval_R(p, pair);
    const double g = eval_G(p);
    double m = std::numeric_limits<double>::infinity();
    meet_eq(m, g - 1 + 2 * r[0] + 2 * r[1] + 2 * r[2] + r[3]);
    meet_eq(m, 2 * p.x1 + 2 * p.x2 + 2 * p.x3 + p.x4 - 1);
    meet_ge(m, p.z1);
    meet_ge(m, p.z2);
    meet_ge(m, p.z3);
    meet_ge(m, p.z4);
    meet_ge(m, p.x4);
    return m;
}

inline double cspin_margin(const PhasePoint& p, const CoprimePair& pair, Branch branch) {
    double m = crf_margin(p, pair);
    for (double d : spin7_defects(p, pair, branch)) meet_eq(m, d);
    meet_eq(m, 2 * (p.z1 + p.z2 + p.z3) - p.x4 - 1);
    return m;
}

/// The W_i curves: seven relations cutting a curve out of the orbit's branch.
inline double w_curve_margin(const PhasePoint& p, const CoprimePair& pair,
                             const OrbitLabel& orbit) {
    double m = cspin_margin(p, pair, orbit.branch());
    const double two_delta_over_i = 2.0 * pair.delta() / double(orbit.order);
    switch (orbit.fiber) {
        case Fiber::KplusL:
            meet_eq(m, p.x2);
            meet_eq(m, p.x3);
            meet_eq(m, p.x1 - (1 - 2 * p.z2));
            meet_eq(m, p.x4 - (4 * p.z2 - 1));
            meet_eq(m, p.z2 - p.z3);
            meet_eq(m, p.z1);
            meet_eq(m, p.z4 - two_delta_over_i * (4 * p.z2 - 1) / (p.z2 * p.z2));
            break;
        case Fiber::L:
            meet_eq(m, p.x1);
            meet_eq(m, p.x3);
            meet_eq(m, p.x2 - (1 - 2 * p.z3));
            meet_eq(m, p.x4 - (4 * p.z3 - 1));
            meet_eq(m, p.z3 - p.z1);
            meet_eq(m, p.z2);
            meet_eq(m, p.z4 - two_delta_over_i * (4 * p.z3 - 1) / (p.z3 * p.z3));
            break;
        case Fiber::K:
            meet_eq(m, p.x1);
            meet_eq(m, p.x2);
            meet_eq(m, p.x3 - (1 - 2 * p.z1));
            meet_eq(m, p.x4 - (4 * p.z1 - 1));
            meet_eq(m, p.z1 - p.z2);
            meet_eq(m, p.z3);
            meet_eq(m, p.z4 - two_delta_over_i * (4 * p.z1 - 1) / (p.z1 * p.z1));
            break;
    }
    return m;
}

}  // namespace detail

/// Membership in the named set, with margin as documented on Membership.
inline Membership member(const PhasePoint& p, const SetId& id, const CoprimePair& pair,
                         double tolerance = kOnSurfaceTol) {
    using Tag = SetId::Tag;
    double m = std::numeric_limits<double>::infinity();
    switch (id.tag) {
        case Tag::CRF:
            m = detail::crf_margin(p, pair);
            break;
        case Tag::CSpinPlus:
            m = detail::cspin_margin(p, pair, Branch::plus);
            break;
        case Tag::CSpinMinus:
            m = detail::cspin_margin(p, pair, Branch::minus);
            break;
        case Tag::CG2:
            m = std::min(detail::cspin_margin(p, pair, Branch::plus),
                         detail::cspin_margin(p, pair, Branch::minus));
            detail::meet_eq(m, p.x4);
            detail::meet_eq(m, p.z4);
            break;
        case Tag::DPlus:
            m = detail::cspin_margin(p, pair, Branch::plus);
            detail::meet_ge(m, p.z2 - p.z1);
            detail::meet_ge(m, p.z3 - p.z1);
            detail::meet_ge(m, 2.0 * pair.delta() - fiber_weight(p, pair));
            break;
        case Tag::DMinus:
            m = detail::cspin_margin(p, pair, Branch::minus);
            detail::meet_ge(m, p.z1 - p.z2);
            detail::meet_ge(m, p.z1 - p.z3);
            detail::meet_ge(m, 2.0 * pair.delta() - fiber_weight(p, pair));
            break;
        case Tag::BPlus:
        case Tag::BMinus:
            m = detail::cspin_margin(
                p, pair, id.tag == Tag::BPlus ? Branch::plus : Branch::minus);
            detail::meet_ge(m, p.x4 - p.x1 - p.x2 - p.x3);
            break;
        case Tag::APlus:
        case Tag::AMinus:
            m = detail::cspin_margin(
                p, pair, id.tag == Tag::APlus ? Branch::plus : Branch::minus);
            detail::meet_ge(m, fiber_weight(p, pair) - 2.0 * pair.delta());
            detail::meet_ge(m, 2.0 / 3 - (p.z1 + p.z2 + p.z3));
            break;
        case Tag::W:
            m = detail::w_curve_margin(p, pair, *id.orbit);
            break;
    }
    return {m >= -tolerance, m};
}

/// Xi polynomials governing the D+ boundary derivative.  Here a, b are the
/// square-root ratios sqrt(Z2/Z1), sqrt(Z3/Z1).
inline std::array<double, 3> xi_polys(double a, double b) {
    const double xi0 = (a + 1) * (a + 1) * b * b + (1 - a) * (2 * a * a + 3 * a + 2) * b +
                       (a * a - 1) * (a * a - 1);
    const double xi1 = 2 * a * b * (a - b) * (a - b) +
                       (a + b) * (2 * a * a - 3 * a * b + 2 * b * b) + (a - b) * (a - b) +
                       a + b + 2;
    const double xi2 = (b + 1) * (b + 1) * a * a + (1 - b) * (2 * b * b + 3 * b + 2) * a +
                       (b * b - 1) * (b * b - 1);
    return {xi0, xi1, xi2};
}

/// Theta polynomials governing the D- boundary derivative; same square-root
/// ratio convention as xi_polys.
inline std::array<double, 3> theta_polys(double a, double b) {
    const double th0 = (a + 1) * (a + 1) * b * b + (a - 1) * (2 * a * a + 3 * a + 2) * b +
                       (a * a - 1) * (a * a - 1);
    const double th1 = 2 * a * b * (a + b) * (a + b) +
                       (a + b) * (2 * a * a - a * b + 2 * b * b) - (a + b) * (a + b) -
                       (a + b) + 2;
    const double th2 = (b + 1) * (b + 1) * a * a + (b - 1) * (2 * b * b + 3 * b + 2) * a +
                       (b * b - 1) * (b * b - 1);
    return {th0, th1, th2};
}

/// The beta-discriminant of Xi0 (equal to that of Theta0), used in the
/// positivity arguments: -a (a-1)^2 (4a^2 + 7a + 4).
inline double xi0_beta_discriminant(double a) {
    return -a * (a - 1) * (a - 1) * (4 * a * a + 7 * a + 4);
}

/// The quartic phi_2 with Phi2 = Z3^6 phi_2(Z1/Z3, Z2/Z3); plain ratios here.
inline double phi2_ratio(double a, double b) {
    return a * a * a * a - 3 * a * a * a * b - 2 * a * a * a + 8 * a * a * b * b +
           4 * a * a * b + a * a - 3 * a * b * b * b + 4 * a * b * b - a * b +
           b * b * b * b - 2 * b * b * b + b * b;
}

/// The sextics Phi_j, their (k,l) combination Phi and discriminant delta,
/// plus the closed-form factorization of delta for the identity check.
struct PhiReport {
    double phi0, phi1, phi2;
    double phi;
    double delta;
    double delta_closed_form;
};

inline PhiReport phi_polys(double z1, double z2, double z3, const CoprimePair& pair) {
    const double a = z1, b = z2, c = z3;
    const double phi2 = a * a * a * a * c * c - 3 * a * a * a * b * c * c -
                        2 * a * a * a * c * c * c + 8 * a * a * b * b * c * c +
                        4 * a * a * b * c * c * c + a * a * c * c * c * c -
                        3 * a * b * b * b * c * c + 4 * a * b * b * c * c * c -
                        a * b * c * c * c * c + b * b * b * b * c * c -
                        2 * b * b * b * c * c * c + b * b * c * c * c * c;
    const double phi1 = a * a * a * a * b * c - 7 * a * a * a * b * b * c -
                        7 * a * a * a * b * c * c + 7 * a * a * b * b * b * c +
                        8 * a * a * b * b * c * c + 7 * a * a * b * c * c * c -
                        a * b * b * b * b * c + a * b * b * b * c * c +
                        a * b * b * c * c * c - a * b * c * c * c * c +
                        2 * b * b * b * b * c * c - 4 * b * b * b * c * c * c +
                        2 * b * b * c * c * c * c;
    const double phi0 = a * a * a * a * b * b - 2 * a * a * a * b * b * b -
                        3 * a * a * a * b * b * c + a * a * b * b * b * b +
                        4 * a * a * b * b * b * c + 8 * a * a * b * b * c * c -
                        a * b * b * b * b * c + 4 * a * b * b * b * c * c -
                        3 * a * b * b * c * c * c + b * b * b * b * c * c -
                        2 * b * b * b * c * c * c + b * b * c * c * c * c;
    const double k = double(pair.k()), l = double(pair.l());
    const double phi = phi2 * l * l + phi1 * k * l + phi0 * k * k;
    const double delta = phi1 * phi1 - 4 * phi0 * phi2;
    const double quad = a * a + b * b + c * c - 2 * b * c - 2 * a * c - 2 * a * b;
    const double sum = a + b + c;
    const double closed = -3 * a * a * b * b * c * c * sum * sum * quad * quad;
    return {phi0, phi1, phi2, phi, delta, closed};
}

/// Residual of the invariant algebraic curve cutting the G2 locus for the
/// family parameter xi; zero along a single G2 trajectory.
inline double g2_curve_residual(const PhasePoint& p, double xi) {
    return std::cos(xi) * p.z3 * (p.z2 - p.z1) - std::sin(xi) * p.z2 * (p.z3 - p.z1);
}

/// Point on the W_i curve at curve parameter z (the repeated Z-coordinate).
/// Exact on all seven relations; lands on the orbit's branch.
inline PhasePoint w_curve_point(const CoprimePair& pair, const OrbitLabel& orbit, double z) {
    if (!(z > 0)) throw DomainError("w_curve_point: parameter must be positive");
    const double x = 1 - 2 * z;
    const double x4 = 4 * z - 1;
    const double z4 = 2.0 * pair.delta() / double(orbit.order) * (4 * z - 1) / (z * z);
    switch (orbit.fiber) {
        case Fiber::KplusL: return {x, 0, 0, x4, 0, z, z, z4};
        case Fiber::L: return {0, x, 0, x4, z, 0, z, z4};
        default: return {0, 0, x, x4, z, z, 0, z4};
    }
}

}  // namespace spin7
