#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spin7/critical_points.hpp"
#include "spin7/dynamics.hpp"

using namespace spin7;

namespace {

const std::vector<std::pair<long, long>> kPairs{{2, 1}, {3, 1}, {3, 2}, {5, 2}};

double l1_fn(double a, double b) {
    return (a + b - 3) * (a + b - 3) + 4 * (a - b) * (a - b) - 4;
}
double l2_fn(double a, double b, const CoprimePair& pair) {
    return pair.k() * a * (3 + 3 * b - 5 * a) - pair.l() * b * (3 + 3 * a - 5 * b);
}

/// Independent root finder: parametrize the ellipse L1 = 0 by alpha via the
/// quadratic formula (5 b^2 - (6a+6) b + 5a^2 - 6a + 5 = 0), then bisect
/// L2(alpha, beta(alpha)) in alpha on the requested arc.
std::pair<double, double> arc_oracle(const CoprimePair& pair, bool inner) {
    auto beta_of = [&](double a) {
        const double disc = (6 * a + 6) * (6 * a + 6) - 20 * (5 * a * a - 6 * a + 5);
        if (disc < 0) return std::nan("");
        const double root = std::sqrt(disc);
        return inner ? (6 * a + 6 - root) / 10 : (6 * a + 6 + root) / 10;
    };
    auto g = [&](double a) { return l2_fn(a, beta_of(a), pair); };

    // Bracket a sign change of g along the arc.
    const double lo_a = inner ? 0.30 : 1.80, hi_a = inner ? 1.30 : 4.20;
    double a0 = std::nan(""), a1 = std::nan("");
    double prev_a = std::nan(""), prev_g = std::nan("");
    for (int i = 0; i <= 4000; ++i) {
        const double a = lo_a + (hi_a - lo_a) * i / 4000.0;
        const double b = beta_of(a);
        if (std::isnan(b)) continue;
        const double v = g(a);
        if (!std::isnan(prev_g) && prev_g * v <= 0) {
            a0 = prev_a;
            a1 = a;
            break;
        }
        prev_a = a;
        prev_g = v;
    }
    REQUIRE(!std::isnan(a0));
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a0 + a1);
        if (g(a0) * g(mid) <= 0)
            a1 = mid;
        else
            a0 = mid;
    }
    const double a = 0.5 * (a0 + a1);
    return {a, beta_of(a)};
}

}  // namespace

TEST_CASE("type I points in closed form") {
    const CoprimePair pair(2, 1);
    const auto pkl = type1_point(pair, OrbitLabel(Fiber::KplusL, pair));
    CHECK(pkl.point == PhasePoint{1.0 / 3, 0, 0, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 14});
    CHECK(pkl.branch == Branch::plus);
    const auto pl = type1_point(pair, OrbitLabel(Fiber::L, pair));
    CHECK(pl.point == PhasePoint{0, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 0, 1.0 / 3, 42});
    CHECK(pl.branch == Branch::minus);
    const auto pk = type1_point(pair, OrbitLabel(Fiber::K, pair));
    CHECK(pk.point == PhasePoint{0, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 21});
}

TEST_CASE("types II-IV are zeros of the field on some branch") {
    for (auto [k, l] : kPairs) {
        const CoprimePair pair(k, l);
        const auto table = fixed_points_table(pair);
        CHECK(table.size() == 7);
        for (const auto& cp : table) {
            CHECK(max_abs(vector_field(cp.point, pair).derivative) < 1e-12);
            const double resid =
                std::min(residuals(cp.point, pair, Branch::plus).max_norm(),
                         residuals(cp.point, pair, Branch::minus).max_norm());
            CHECK(resid < 1e-12);
        }
    }
}

TEST_CASE("Q0 per orbit") {
    const CoprimePair pair(2, 1);
    CHECK(q0_point(pair, OrbitLabel(Fiber::KplusL, pair)).point ==
          PhasePoint{0.5, 0, 0, 0, 0, 0.25, 0.25, 0});
    CHECK(q0_point(pair, OrbitLabel(Fiber::L, pair)).point ==
          PhasePoint{0, 0.5, 0, 0, 0.25, 0, 0.25, 0});
    CHECK(q0_point(pair, OrbitLabel(Fiber::K, pair)).point ==
          PhasePoint{0, 0, 0.5, 0, 0.25, 0.25, 0, 0});
}

TEST_CASE("tabulated unstable frame values for (2,1)") {
    const CoprimePair pair(2, 1);
    const auto fr = unstable_frame(pair, OrbitLabel(Fiber::KplusL, pair));
    CHECK(fr.eigenvalue == Catch::Approx(2.0 / 3));
    CHECK(fr.v1 == Vec8{2, 0, 0, -4, 0, -1, -1, -84});
    CHECK(fr.v2 == Vec8{-9, 13, 14, -36, 9, -14, -13, 0});
    const auto frl = unstable_frame(pair, OrbitLabel(Fiber::L, pair));
    CHECK(frl.v1 == Vec8{0, 2, 0, -4, -1, 0, -1, -252});
}

TEST_CASE("ellipse passes through (1, 2/5)") {
    CHECK(l1_fn(1.0, 0.4) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("solve_ac against the arc oracle") {
    for (auto [k, l] : kPairs) {
        const CoprimePair pair(k, l);
        for (Branch br : {Branch::plus, Branch::minus}) {
            const bool inner = (br == Branch::minus);
            const auto cp = solve_ac(pair, br);
            CHECK(cp.kind == PointKind::TypeV_AC);
            CHECK(cp.branch == br);

            // X_j = 1/7 exactly by construction.
            for (int i = 0; i < 4; ++i) CHECK(cp.point[i] == 1.0 / 7);
            // R_i = 6/49.
            for (double r : eval_R(cp.point, pair))
                CHECK(r == Catch::Approx(6.0 / 49).margin(1e-10));
            // Zero of the field, on-branch.
            CHECK(max_abs(vector_field(cp.point, pair).derivative) < 1e-10);
            CHECK(residuals(cp.point, pair, br).max_norm() < 1e-10);

            // Arc side conditions.
            const double alpha = cp.point.z2 / cp.point.z1;
            const double beta = cp.point.z3 / cp.point.z1;
            if (inner) {
                CHECK(cp.point.z2 < cp.point.z1);
                CHECK(cp.point.z3 < cp.point.z1);
                CHECK(alpha + beta < 7.0 / 5);
            } else {
                CHECK(cp.point.z2 > 2 * cp.point.z1);
                CHECK(cp.point.z3 > 2 * cp.point.z1);
                CHECK(alpha + beta > 23.0 / 5);
            }

            // Independent oracle agreement.
            const auto [oa, ob] = arc_oracle(pair, inner);
            CHECK(alpha == Catch::Approx(oa).margin(1e-8));
            CHECK(beta == Catch::Approx(ob).margin(1e-8));
        }
    }
}

TEST_CASE("geometric means of Z pairs at Type V points") {
    // The identity Z2 Z3 = (Z2 + Z3 - 2/7)^2 + 1/49 puts every pairwise
    // geometric mean at or above 1/7 (equality in the symmetric direction).
    for (auto [k, l] : kPairs) {
        const CoprimePair pair(k, l);
        for (Branch br : {Branch::plus, Branch::minus}) {
            const auto p = solve_ac(pair, br).point;
            const double zs[3] = {p.z1, p.z2, p.z3};
            for (int m = 0; m < 3; ++m)
                for (int n = m + 1; n < 3; ++n)
                    CHECK(std::sqrt(zs[m] * zs[n]) >= 1.0 / 7 - 1e-12);
        }
    }
}

TEST_CASE("exactly one Type V point per branch: distinct across branches") {
    const CoprimePair pair(2, 1);
    const auto plus = solve_ac(pair, Branch::plus);
    const auto minus = solve_ac(pair, Branch::minus);
    CHECK(distance(plus.point, minus.point) > 1.0);
}

TEST_CASE("all_critical_points enumerates 12 points") {
    const CoprimePair pair(3, 2);
    const auto pts = all_critical_points(pair);
    CHECK(pts.size() == 12);
    for (const auto& cp : pts)
        CHECK(max_abs(vector_field(cp.point, pair).derivative) < 1e-10);
}
