#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "spin7/dynamics.hpp"
#include "spin7/pair.hpp"
#include "spin7/phase.hpp"

namespace spin7 {

enum class PointKind { TypeI, TypeII_ALC, TypeIII, TypeIV_Q0, TypeV_AC };

inline const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::TypeI: return "TypeI";
        case PointKind::TypeII_ALC: return "TypeII_ALC";
        case PointKind::TypeIII: return "TypeIII";
        case PointKind::TypeIV_Q0: return "TypeIV_Q0";
        default: return "TypeV_AC";
    }
}

/// A critical point of the flow, tagged with its type, the branch(es) it
/// lies on, and (for orbit-specific points) its orbit label.
struct CriticalPoint {
    PhasePoint point;
    PointKind kind;
    std::optional<Branch> branch;      // nullopt: lies on both branches
    std::optional<Fiber> orbit;

    std::string label() const {
        std::string s = to_string(kind);
        if (orbit) s += std::string("(") + to_string(*orbit) + ")";
        if (branch) s += std::string("[") + to_string(*branch) + "]";
        return s;
    }
};

/// Unstable 2-frame at a Type I point: both eigenvectors of eigenvalue 2/3
/// tangent to the branch constraint surface.
struct UnstableFrame {
    double eigenvalue = 2.0 / 3.0;
    Vec8 v1{};
    Vec8 v2{};
};

/// Newton seed in the ratio coordinates (alpha, beta) = (Z2/Z1, Z3/Z1).
struct AcSeed {
    double alpha;
    double beta;
    enum class Arc { inner, outer } arc;
};

/// The Type I point P_0^i of the given orbit.  Closed form; the k+l orbit
/// lies on the plus branch, the l and k orbits on the minus branch.
inline CriticalPoint type1_point(const CoprimePair& pair, const OrbitLabel& orbit) {
    const double z4 = 6.0 * pair.delta() / double(orbit.order);
    PhasePoint p;
    switch (orbit.fiber) {
        case Fiber::KplusL:
            p = {1.0 / 3, 0, 0, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, z4};
            break;
        case Fiber::L:
            p = {0, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 0, 1.0 / 3, z4};
            break;
        case Fiber::K:
            p = {0, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, z4};
            break;
    }
    return {p, PointKind::TypeI, orbit.branch(), orbit.fiber};
}

/// The saddle Q_0^i on the G2 locus reached by the theta = 0 degenerate
/// curve of the given orbit.
inline CriticalPoint q0_point(const CoprimePair& pair, const OrbitLabel& orbit) {
    (void)pair;
    PhasePoint p;
    switch (orbit.fiber) {
        case Fiber::KplusL:
            p = {0.5, 0, 0, 0, 0, 0.25, 0.25, 0};
            break;
        case Fiber::L:
            p = {0, 0.5, 0, 0, 0.25, 0, 0.25, 0};
            break;
        case Fiber::K:
            p = {0, 0, 0.5, 0, 0.25, 0.25, 0, 0};
            break;
    }
    return {p, PointKind::TypeIV_Q0, std::nullopt, orbit.fiber};
}

inline CriticalPoint alc_point() {
    const double s = 1.0 / 6;
    return {{s, s, s, 0, s, s, s, 0}, PointKind::TypeII_ALC, std::nullopt, std::nullopt};
}

/// Types II-IV: P_ALC, the three G2 sources, and the three Q_0 saddles.
///
/// Note on the Type III coordinates: the published table lists them as
/// (1/2,-1/2,-1/2,0, sqrt(5)/2,0,0,0) and permutations, but those values are
/// not zeros of the flow (they violate the conservation identity).  Direct
/// solution of the fixed-point equations with a single nonzero Z_j gives
/// X_j = -1/2 on the matching slot, +1/2 elsewhere and Z_j = 1/2, which is
/// what we return; the sign/magnitude discrepancy is a typo in the table.
inline std::vector<CriticalPoint> fixed_points_table(const CoprimePair& pair) {
    std::vector<CriticalPoint> out;
    out.push_back(alc_point());
    out.push_back({{-0.5, 0.5, 0.5, 0, 0.5, 0, 0, 0}, PointKind::TypeIII, std::nullopt,
                   Fiber::KplusL});
    out.push_back({{0.5, -0.5, 0.5, 0, 0, 0.5, 0, 0}, PointKind::TypeIII, std::nullopt, Fiber::L});
    out.push_back({{0.5, 0.5, -0.5, 0, 0, 0, 0.5, 0}, PointKind::TypeIII, std::nullopt, Fiber::K});
    for (Fiber f : {Fiber::KplusL, Fiber::L, Fiber::K})
        out.push_back(q0_point(pair, OrbitLabel(f, pair)));
    return out;
}

/// Tabulated unstable eigenvectors at P_0^i, with (k,l) substituted.
inline UnstableFrame unstable_frame(const CoprimePair& pair, const OrbitLabel& orbit) {
    const double k = double(pair.k()), l = double(pair.l()), d = double(pair.delta());
    UnstableFrame f;
    switch (orbit.fiber) {
        case Fiber::KplusL:
            f.v1 = {2, 0, 0, -4, 0, -1, -1, -36 * d / (k + l)};
            f.v2 = {-3 * (k + l), 4 * k + 5 * l, 5 * k + 4 * l, -12 * (k + l),
                    3 * (k + l),  -5 * k - 4 * l, -4 * k - 5 * l, 0};
            break;
        case Fiber::L:
            f.v1 = {0, 2, 0, -4, -1, 0, -1, -36 * d / l};
            f.v2 = {5 * l + k, -3 * l, 4 * l - k, -12 * l, -4 * l + k, 3 * l, -5 * l - k, 0};
            break;
        case Fiber::K:
            f.v1 = {0, 0, 2, -4, -1, -1, 0, -36 * d / k};
            f.v2 = {5 * k + l, 4 * k - l, -3 * k, -12 * k, -4 * k + l, -5 * k - l, 3 * k, 0};
            break;
    }
    return f;
}

namespace detail {

/// The intersection system in ratio coordinates (alpha, beta) = (Z2/Z1, Z3/Z1):
/// L1 = 0 is the ellipse (alpha+beta-3)^2 + 4(alpha-beta)^2 = 4,
/// L2 = 0 the hyperbola mixing k and l.
inline std::array<double, 2> ac_system(double a, double b, const CoprimePair& pair) {
    const double l1 = (a + b - 3) * (a + b - 3) + 4 * (a - b) * (a - b) - 4;
    const double l2 =
        pair.k() * a * (3 + 3 * b - 5 * a) - pair.l() * b * (3 + 3 * a - 5 * b);
    return {l1, l2};
}

inline std::array<double, 4> ac_system_jac(double a, double b, const CoprimePair& pair) {
    const double k = double(pair.k()), l = double(pair.l());
    return {
        2 * (a + b - 3) + 8 * (a - b),          // dL1/da
        2 * (a + b - 3) - 8 * (a - b),          // dL1/db
        k * (3 + 3 * b - 10 * a) - 3 * l * b,   // dL2/da
        3 * k * a - l * (3 + 3 * a - 10 * b),   // dL2/db
    };
}

}  // namespace detail

/// Solve for the Type V point P_AC on a branch by damped Newton on the
/// (alpha, beta) intersection system, then recover the phase coordinates
/// from Z1+Z2+Z3 = 4/7 and the S_4 row.
inline CriticalPoint solve_ac(const CoprimePair& pair, Branch branch) {
    const bool inner = (branch == Branch::minus);
    const std::vector<AcSeed> seeds =
        inner ? std::vector<AcSeed>{{0.7, 0.7, AcSeed::Arc::inner},
                                    {0.5, 0.5, AcSeed::Arc::inner},
                                    {0.9, 0.5, AcSeed::Arc::inner}}
              : std::vector<AcSeed>{{2.6, 2.6, AcSeed::Arc::outer},
                                    {2.4, 2.8, AcSeed::Arc::outer},
                                    {2.8, 2.4, AcSeed::Arc::outer}};

    double a = 0, b = 0;
    bool converged = false;
    std::array<double, 2> last{};
    for (const auto& seed : seeds) {
        a = seed.alpha;
        b = seed.beta;
        for (int it = 0; it < 100 && !converged; ++it) {
            last = detail::ac_system(a, b, pair);
            const double n0 = std::hypot(last[0], last[1]);
            if (n0 < 1e-14) {
                converged = true;
                break;
            }
            const auto J = detail::ac_system_jac(a, b, pair);
            const double det = J[0] * J[3] - J[1] * J[2];
            if (std::abs(det) < 1e-300) break;
            double da = (-last[0] * J[3] + last[1] * J[1]) / det;
            double db = (-last[1] * J[0] + last[0] * J[2]) / det;
            // Halve the step until the residual decreases.
            double lam = 1.0;
            for (int h = 0; h < 50; ++h, lam *= 0.5) {
                const auto trial = detail::ac_system(a + lam * da, b + lam * db, pair);
                if (std::hypot(trial[0], trial[1]) < n0) break;
            }
            a += lam * da;
            b += lam * db;
        }
        if (converged) break;
    }
    if (!converged)
        throw NoConvergenceError("solve_ac: Newton failed for all seeds; last residual (" +
                                 std::to_string(last[0]) + "," + std::to_string(last[1]) +
                                 ") at alpha=" + std::to_string(a) + " beta=" + std::to_string(b));

    // Arc side sanity: inner means alpha+beta < 7/5, outer > 23/5.
    if (inner && a + b >= 7.0 / 5.0)
        throw NoConvergenceError("solve_ac: converged to the wrong arc (inner expected)");
    if (!inner && a + b <= 23.0 / 5.0)
        throw NoConvergenceError("solve_ac: converged to the wrong arc (outer expected)");

    PhasePoint p;
    p.x1 = p.x2 = p.x3 = p.x4 = 1.0 / 7;
    p.z1 = (4.0 / 7) / (1.0 + a + b);
    p.z2 = a * p.z1;
    p.z3 = b * p.z1;
    const double s = branch_sign(branch);
    const double c1 = double(pair.k() + pair.l()) / (2.0 * pair.delta());
    const double c2 = double(pair.l()) / (2.0 * pair.delta());
    const double c3 = double(pair.k()) / (2.0 * pair.delta());
    const double denom = s * (c1 * p.z2 * p.z3 - c2 * p.z1 * p.z3 - c3 * p.z1 * p.z2);
    p.z4 = (1.0 / 7) / denom;
    if (p.z4 < 0)
        throw WrongBranchError("solve_ac: recovered Z4 < 0; point belongs to the other branch");

    const auto r = eval_R(p, pair);
    for (double ri : r)
        if (std::abs(ri - 6.0 / 49) > 1e-10)
            throw NoConvergenceError("solve_ac: R_i != 6/49 after recovery (got " +
                                     std::to_string(ri) + ")");
    return {p, PointKind::TypeV_AC, branch, std::nullopt};
}

/// Every critical point the artifact knows for a pair: 3 Type I, the
/// Types II-IV table, and the two Type V points.
inline std::vector<CriticalPoint> all_critical_points(const CoprimePair& pair) {
    std::vector<CriticalPoint> out;
    for (Fiber f : {Fiber::KplusL, Fiber::L, Fiber::K})
        out.push_back(type1_point(pair, OrbitLabel(f, pair)));
    for (auto& cp : fixed_points_table(pair)) out.push_back(cp);
    out.push_back(solve_ac(pair, Branch::plus));
    out.push_back(solve_ac(pair, Branch::minus));
    return out;
}

}  // namespace spin7
