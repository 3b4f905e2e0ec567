#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "spin7/pair.hpp"

namespace spin7 {

/// Default max-norm tolerance for accepting a point as lying on a
/// constraint surface.  One order above the residual drift accumulated by
/// the integrator at default tolerances.
inline constexpr double kOnSurfaceTol = 1e-9;

/// A point of the 8-dimensional phase space.
///
/// x1..x4 are the normalized principal curvatures (ratios of logarithmic
/// derivatives to tr L); z1..z3 are the normalized inverse metric ratios
/// a/(bc)/trL etc., and z4 = f * trL.
struct PhasePoint {
    double x1 = 0, x2 = 0, x3 = 0, x4 = 0;
    double z1 = 0, z2 = 0, z3 = 0, z4 = 0;

    std::array<double, 8> to_array() const { return {x1, x2, x3, x4, z1, z2, z3, z4}; }

    static PhasePoint from_array(const std::array<double, 8>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
    }

    double operator[](std::size_t i) const {
        const double* p[8] = {&x1, &x2, &x3, &x4, &z1, &z2, &z3, &z4};
        return *p[i];
    }

    double& operator[](std::size_t i) {
        double* p[8] = {&x1, &x2, &x3, &x4, &z1, &z2, &z3, &z4};
        return *p[i];
    }

    bool operator==(const PhasePoint&) const = default;
};

inline double distance(const PhasePoint& a, const PhasePoint& b) {
    double s = 0;
    auto ua = a.to_array(), ub = b.to_array();
    for (int i = 0; i < 8; ++i) s += (ua[i] - ub[i]) * (ua[i] - ub[i]);
    return std::sqrt(s);
}

inline double max_abs(const std::array<double, 8>& v) {
    double m = 0;
    for (double c : v) m = std::max(m, std::abs(c));
    return m;
}

/// Residuals of every constraint a point may be asked to satisfy.
/// All entries are zero exactly when the corresponding constraint holds.
struct ResidualReport {
    double conservation = 0;          // G - 1 + 2R1 + 2R2 + 2R3 + R4
    double trace = 0;                 // 2X1 + 2X2 + 2X3 + X4 - 1
    std::array<double, 4> spin7{};    // defect of each S_i on the given branch
    double zsum = 0;                  // 2(Z1+Z2+Z3) - X4 - 1

    double max_norm() const {
        double m = std::max({std::abs(conservation), std::abs(trace), std::abs(zsum)});
        for (double s : spin7) m = std::max(m, std::abs(s));
        return m;
    }

    bool on_surface(double tol = kOnSurfaceTol) const { return max_norm() <= tol; }
};

/// Defect of the four first-order surfaces S_1..S_4 on a branch:
/// X_j minus the right-hand side expressed in the Z coordinates.
inline std::array<double, 4> spin7_defects(const PhasePoint& p, const CoprimePair& pair,
                                           Branch branch) {
    const double s = branch_sign(branch);
    const double c1 = double(pair.k() + pair.l()) / (2.0 * pair.delta());
    const double c2 = double(pair.l()) / (2.0 * pair.delta());
    const double c3 = double(pair.k()) / (2.0 * pair.delta());
    return {
        p.x1 - (p.z2 + p.z3 - p.z1 - s * c1 * p.z2 * p.z3 * p.z4),
        p.x2 - (p.z3 + p.z1 - p.z2 + s * c2 * p.z1 * p.z3 * p.z4),
        p.x3 - (p.z1 + p.z2 - p.z3 + s * c3 * p.z1 * p.z2 * p.z4),
        p.x4 - s * (c1 * p.z2 * p.z3 - c2 * p.z1 * p.z3 - c3 * p.z1 * p.z2) * p.z4,
    };
}

}  // namespace spin7
