#include <catch2/catch_amalgamated.hpp>

#include "spin7/dynamics.hpp"
#include "spin7/pair.hpp"
#include "spin7/phase.hpp"

using namespace spin7;

TEST_CASE("pair validation") {
    CHECK(validate_pair(2, 1).delta() == 7);
    CHECK(validate_pair(3, 2).delta() == 19);
    CHECK(validate_pair(3, 1).fiber_order(Fiber::KplusL) == 4);
    CHECK_THROWS_AS(validate_pair(1, 1), ExceptionalPairError);
    CHECK_THROWS_AS(validate_pair(1, 0), ExceptionalPairError);
    CHECK_THROWS_AS(validate_pair(0, 1), ExceptionalPairError);
    CHECK_THROWS_AS(validate_pair(4, 2), NotCoprimeError);
    CHECK_THROWS_AS(validate_pair(-2, 1), DomainError);
}

TEST_CASE("pair does not normalize k >= l") {
    const CoprimePair p(2, 3);
    CHECK(p.k() == 2);
    CHECK(p.l() == 3);
}

TEST_CASE("orbit labels") {
    const CoprimePair p(3, 2);
    CHECK(OrbitLabel(Fiber::KplusL, p).order == 5);
    CHECK(OrbitLabel(Fiber::L, p).order == 2);
    CHECK(OrbitLabel(Fiber::K, p).order == 3);
    CHECK(OrbitLabel(Fiber::KplusL, p).branch() == Branch::plus);
    CHECK(OrbitLabel(Fiber::L, p).branch() == Branch::minus);
    CHECK(OrbitLabel(Fiber::K, p).branch() == Branch::minus);
}

TEST_CASE("residuals vanish at the canonical points") {
    const CoprimePair pair(2, 1);
    const PhasePoint p0{1.0 / 3, 0, 0, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 14};
    CHECK(residuals(p0, pair, Branch::plus).max_norm() < 1e-15);

    const double s = 1.0 / 6;
    const PhasePoint alc{s, s, s, 0, s, s, s, 0};
    CHECK(residuals(alc, pair, Branch::plus).max_norm() < 1e-15);
    CHECK(residuals(alc, pair, Branch::minus).max_norm() < 1e-15);
}

TEST_CASE("residuals at the origin") {
    const CoprimePair pair(2, 1);
    const PhasePoint zero{};
    const auto rep = residuals(zero, pair, Branch::plus);
    CHECK(rep.conservation == -1.0);
    CHECK(rep.trace == -1.0);
    CHECK(rep.zsum == -1.0);
    CHECK_FALSE(rep.on_surface(1e-9));
}

TEST_CASE("residuals are pure") {
    const CoprimePair pair(3, 2);
    const PhasePoint p{0.11, -0.02, 0.31, 0.08, 0.21, 0.05, 0.17, 3.4};
    const auto a = residuals(p, pair, Branch::minus);
    const auto b = residuals(p, pair, Branch::minus);
    CHECK(a.conservation == b.conservation);
    CHECK(a.trace == b.trace);
    CHECK(a.zsum == b.zsum);
    for (int i = 0; i < 4; ++i) CHECK(a.spin7[i] == b.spin7[i]);
}

TEST_CASE("point indexing and distance") {
    PhasePoint p{};
    for (int i = 0; i < 8; ++i) p[i] = i + 1;
    CHECK(p.x1 == 1.0);
    CHECK(p.z4 == 8.0);
    PhasePoint q = p;
    q.z4 += 3;
    CHECK(distance(p, q) == 3.0);
}
