#pragma once

#include <array>
#include <cmath>

#include "spin7/linalg.hpp"
#include "spin7/pair.hpp"
#include "spin7/phase.hpp"

namespace spin7 {

/// Right-hand side of the phase flow together with its ingredients.
struct FieldValue {
    std::array<double, 8> derivative{};  // dX1..dX4, dZ1..dZ4 per unit eta
    double g = 0;                        // value of G
    std::array<double, 4> r{};           // R1..R4
};

/// G = 2X1^2 + 2X2^2 + 2X3^2 + X4^2.  On {trace = 1} Cauchy-Schwarz gives
/// G >= 1/7 with equality exactly at X_j = 1/7.
inline double eval_G(const PhasePoint& p) {
    return 2 * p.x1 * p.x1 + 2 * p.x2 * p.x2 + 2 * p.x3 * p.x3 + p.x4 * p.x4;
}

/// The four curvature polynomials R1..R4 in the Z coordinates.
inline std::array<double, 4> eval_R(const PhasePoint& p, const CoprimePair& pair) {
    const double d = double(pair.delta());
    const double w1 = 0.5 * double(pair.k() + pair.l()) * double(pair.k() + pair.l()) / (d * d);
    const double w2 = 0.5 * double(pair.l()) * double(pair.l()) / (d * d);
    const double w3 = 0.5 * double(pair.k()) * double(pair.k()) / (d * d);
    const double q1 = p.z2 * p.z2 * p.z3 * p.z3 * p.z4 * p.z4;
    const double q2 = p.z1 * p.z1 * p.z3 * p.z3 * p.z4 * p.z4;
    const double q3 = p.z1 * p.z1 * p.z2 * p.z2 * p.z4 * p.z4;
    return {
        6 * p.z2 * p.z3 + p.z1 * p.z1 - p.z2 * p.z2 - p.z3 * p.z3 - w1 * q1,
        6 * p.z1 * p.z3 + p.z2 * p.z2 - p.z3 * p.z3 - p.z1 * p.z1 - w2 * q2,
        6 * p.z1 * p.z2 + p.z3 * p.z3 - p.z1 * p.z1 - p.z2 * p.z2 - w3 * q3,
        w1 * q1 + w2 * q2 + w3 * q3,
    };
}

/// The eight right-hand sides of the flow in eta.
inline FieldValue vector_field(const PhasePoint& p, const CoprimePair& pair) {
    FieldValue f;
    f.g = eval_G(p);
    f.r = eval_R(p, pair);
    const double gm1 = f.g - 1.0;
    f.derivative = {
        p.x1 * gm1 + f.r[0],
        p.x2 * gm1 + f.r[1],
        p.x3 * gm1 + f.r[2],
        p.x4 * gm1 + f.r[3],
        p.z1 * (f.g + p.x1 - p.x2 - p.x3),
        p.z2 * (f.g + p.x2 - p.x3 - p.x1),
        p.z3 * (f.g + p.x3 - p.x1 - p.x2),
        p.z4 * (-f.g + p.x4),
    };
    return f;
}

/// Full residual report of a point against every constraint surface.
/// Never rejects; callers decide what "on surface" means.
inline ResidualReport residuals(const PhasePoint& p, const CoprimePair& pair, Branch branch) {
    ResidualReport rep;
    const double g = eval_G(p);
    const auto r = eval_R(p, pair);
    rep.conservation = g - 1.0 + 2 * r[0] + 2 * r[1] + 2 * r[2] + r[3];
    rep.trace = 2 * p.x1 + 2 * p.x2 + 2 * p.x3 + p.x4 - 1.0;
    rep.spin7 = spin7_defects(p, pair, branch);
    rep.zsum = 2 * (p.z1 + p.z2 + p.z3) - p.x4 - 1.0;
    return rep;
}

/// Analytic Jacobian of vector_field.  Exact partial derivatives of the
/// displayed polynomials; the finite-difference comparison lives in tests.
inline Mat8 jacobian(const PhasePoint& p, const CoprimePair& pair) {
    const double d = double(pair.delta());
    const double w1 = 0.5 * double(pair.k() + pair.l()) * double(pair.k() + pair.l()) / (d * d);
    const double w2 = 0.5 * double(pair.l()) * double(pair.l()) / (d * d);
    const double w3 = 0.5 * double(pair.k()) * double(pair.k()) / (d * d);
    const double g = eval_G(p);
    const double gm1 = g - 1.0;
    const double X[4] = {p.x1, p.x2, p.x3, p.x4};
    // dG/dX_m
    const double dG[4] = {4 * p.x1, 4 * p.x2, 4 * p.x3, 2 * p.x4};

    Mat8 J;
    // Partials of R_j with respect to Z_m (everything else vanishes).
    // R1: vars Z2,Z3 quartic term with weight w1
    double dR[4][4] = {};
    dR[0][0] = 2 * p.z1;
    dR[0][1] = 6 * p.z3 - 2 * p.z2 - 2 * w1 * p.z2 * p.z3 * p.z3 * p.z4 * p.z4;
    dR[0][2] = 6 * p.z2 - 2 * p.z3 - 2 * w1 * p.z2 * p.z2 * p.z3 * p.z4 * p.z4;
    dR[0][3] = -2 * w1 * p.z2 * p.z2 * p.z3 * p.z3 * p.z4;

    dR[1][0] = 6 * p.z3 - 2 * p.z1 - 2 * w2 * p.z1 * p.z3 * p.z3 * p.z4 * p.z4;
    dR[1][1] = 2 * p.z2;
    dR[1][2] = 6 * p.z1 - 2 * p.z3 - 2 * w2 * p.z1 * p.z1 * p.z3 * p.z4 * p.z4;
    dR[1][3] = -2 * w2 * p.z1 * p.z1 * p.z3 * p.z3 * p.z4;

    dR[2][0] = 6 * p.z2 - 2 * p.z1 - 2 * w3 * p.z1 * p.z2 * p.z2 * p.z4 * p.z4;
    dR[2][1] = 6 * p.z1 - 2 * p.z2 - 2 * w3 * p.z1 * p.z1 * p.z2 * p.z4 * p.z4;
    dR[2][2] = 2 * p.z3;
    dR[2][3] = -2 * w3 * p.z1 * p.z1 * p.z2 * p.z2 * p.z4;

    dR[3][0] = 2 * w2 * p.z1 * p.z3 * p.z3 * p.z4 * p.z4 + 2 * w3 * p.z1 * p.z2 * p.z2 * p.z4 * p.z4;
    dR[3][1] = 2 * w1 * p.z2 * p.z3 * p.z3 * p.z4 * p.z4 + 2 * w3 * p.z1 * p.z1 * p.z2 * p.z4 * p.z4;
    dR[3][2] = 2 * w1 * p.z2 * p.z2 * p.z3 * p.z4 * p.z4 + 2 * w2 * p.z1 * p.z1 * p.z3 * p.z4 * p.z4;
    dR[3][3] = 2 * (w1 * p.z2 * p.z2 * p.z3 * p.z3 + w2 * p.z1 * p.z1 * p.z3 * p.z3 +
                    w3 * p.z1 * p.z1 * p.z2 * p.z2) *
               p.z4;

    // X rows: F_j = X_j (G-1) + R_j
    for (int j = 0; j < 4; ++j) {
        for (int m = 0; m < 4; ++m) J(j, m) = (j == m ? gm1 : 0.0) + X[j] * dG[m];
        for (int m = 0; m < 4; ++m) J(j, 4 + m) = dR[j][m];
    }

    // Z rows: F_{4+j} = Z_j (G + sigma_j . X), with sign patterns below.
    const double sig[4][4] = {
        {+1, -1, -1, 0},  // Z1 row
        {-1, +1, -1, 0},  // Z2 row
        {-1, -1, +1, 0},  // Z3 row
        {0, 0, 0, +1},    // Z4 row, G enters with opposite sign
    };
    const double Z[4] = {p.z1, p.z2, p.z3, p.z4};
    const double lin[4] = {
        g + p.x1 - p.x2 - p.x3,
        g + p.x2 - p.x3 - p.x1,
        g + p.x3 - p.x1 - p.x2,
        -g + p.x4,
    };
    for (int j = 0; j < 4; ++j) {
        const double gsign = (j == 3) ? -1.0 : 1.0;
        for (int m = 0; m < 4; ++m) J(4 + j, m) = Z[j] * (gsign * dG[m] + sig[j][m]);
        for (int m = 0; m < 4; ++m) J(4 + j, 4 + m) = (j == m) ? lin[j] : 0.0;
    }
    return J;
}

}  // namespace spin7
