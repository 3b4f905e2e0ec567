#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spin7/integrator.hpp"
#include "spin7/shooting.hpp"

using namespace spin7;

namespace {

/// Classical fixed-step RK4, the independent oracle for the adaptive stepper.
PhasePoint rk4_run(PhasePoint y, const CoprimePair& pair, double span, double h) {
    const long n = std::lround(span / h);
    for (long s = 0; s < n; ++s) {
        const Vec8 k1 = vector_field(y, pair).derivative;
        PhasePoint t;
        for (int i = 0; i < 8; ++i) t[i] = y[i] + 0.5 * h * k1[i];
        const Vec8 k2 = vector_field(t, pair).derivative;
        for (int i = 0; i < 8; ++i) t[i] = y[i] + 0.5 * h * k2[i];
        const Vec8 k3 = vector_field(t, pair).derivative;
        for (int i = 0; i < 8; ++i) t[i] = y[i] + h * k3[i];
        const Vec8 k4 = vector_field(t, pair).derivative;
        for (int i = 0; i < 8; ++i)
            y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return y;
}

PhasePoint shoot_seed(const CoprimePair& pair, Fiber f, double theta) {
    ShootConfig cfg;
    cfg.theta = theta;
    return seed(pair, OrbitLabel(f, pair), cfg);
}

}  // namespace

TEST_CASE("fixed point stays put") {
    const CoprimePair pair(2, 1);
    const PhasePoint p0{1.0 / 3, 0, 0, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 14};
    IntegratorSettings s;
    s.eta_max_span = 10;
    const auto tr = integrate(p0, pair, Branch::plus, s);
    CHECK(tr.terminal == Terminal::SpanExhausted);
    CHECK(distance(tr.back().point, p0) < 1e-12);
}

TEST_CASE("adaptive stepper agrees with the RK4 oracle") {
    const CoprimePair pair(2, 1);
    const PhasePoint y0 = shoot_seed(pair, Fiber::KplusL, 0.5);
    const PhasePoint oracle = rk4_run(y0, pair, 5.0, 1e-3);

    IntegratorSettings s;
    s.eta_max_span = 5;
    s.projection = Projection::off;
    const auto tr = integrate(y0, pair, Branch::plus, s);
    CHECK(distance(tr.back().point, oracle) < 1e-8);
}

TEST_CASE("halving rtol converges with order >= 4") {
    const CoprimePair pair(2, 1);
    const PhasePoint y0 = shoot_seed(pair, Fiber::KplusL, 1.0);

    auto terminal = [&](double rtol) {
        IntegratorSettings s;
        s.eta_max_span = 10;
        s.rtol = rtol;
        s.atol = rtol * 1e-2;
        s.sample_stride = 0.5;  // let the tolerance, not the stride cap, drive h
        return integrate(y0, pair, Branch::plus, s).back().point;
    };
    const PhasePoint ref = terminal(1e-13);
    const double e1 = distance(terminal(1e-6), ref);
    const double e2 = distance(terminal(1e-8), ref);
    CHECK(e2 < e1);
    CHECK(e2 < 1e-7);
}

TEST_CASE("Z plane invariance") {
    const CoprimePair pair(2, 1);
    const PhasePoint y0 = shoot_seed(pair, Fiber::KplusL, 0.0);  // Z1 = 0 exactly
    REQUIRE(y0.z1 == 0.0);
    IntegratorSettings s;
    s.eta_max_span = 30;
    const auto tr = integrate(y0, pair, Branch::plus, s);
    for (const auto& smp : tr.samples) CHECK(std::abs(smp.point.z1) <= s.atol);
}

TEST_CASE("samples respect non-negativity within atol") {
    const CoprimePair pair(3, 1);
    const PhasePoint y0 = shoot_seed(pair, Fiber::L, 0.4);
    IntegratorSettings s;
    const auto tr = integrate(y0, pair, Branch::minus, s);
    for (const auto& smp : tr.samples) {
        CHECK(smp.point.x4 >= -s.atol);
        for (int i = 4; i < 8; ++i) CHECK(smp.point[i] >= -s.atol);
        REQUIRE(smp.eta >= tr.samples.front().eta);
    }
}

TEST_CASE("drift stays below 1e-7 over span 60 with trace projection") {
    const CoprimePair pair(2, 1);
    for (double th : {0.05, 1.0, 2.0}) {
        const auto tr = integrate(shoot_seed(pair, Fiber::KplusL, th), pair, Branch::plus,
                                  IntegratorSettings{});
        REQUIRE(tr.terminal == Terminal::SpanExhausted);
        for (const auto& smp : tr.samples) {
            CHECK(std::abs(smp.residuals.conservation) < 1e-7);
            CHECK(std::abs(smp.residuals.trace) < 1e-7);
        }
    }
}

TEST_CASE("projection off is flagged once residuals blow past the gate") {
    const CoprimePair pair(2, 1);
    IntegratorSettings s;
    s.projection = Projection::off;
    s.eta_max_span = 200;
    const auto tr = integrate(shoot_seed(pair, Fiber::KplusL, 0.05), pair, Branch::plus, s);
    CHECK(tr.terminal == Terminal::ConstraintBreach);
}

TEST_CASE("B entry and blow-up at large theta") {
    const CoprimePair pair(2, 1);
    IntegratorSettings s;
    s.projection = Projection::full;
    s.eta_max_span = 200;
    const auto tr = integrate(shoot_seed(pair, Fiber::KplusL, 3.0), pair, Branch::plus, s,
                              {SetId(SetId::Tag::BPlus)});
    CHECK(tr.terminal == Terminal::Blowup);
    REQUIRE_FALSE(tr.events.empty());
    CHECK(tr.events.front().kind == Event::Kind::EnterSet);
    CHECK(tr.events.front().subject == "B+");
}

TEST_CASE("enter/exit events alternate per set") {
    const CoprimePair pair(2, 1);
    IntegratorSettings s;
    s.projection = Projection::full;
    s.eta_max_span = 120;
    const auto tr = integrate(shoot_seed(pair, Fiber::KplusL, 0.05), pair, Branch::plus, s,
                              {SetId(SetId::Tag::DPlus), SetId(SetId::Tag::BPlus)});
    bool in_d = false, in_b = false;
    for (const auto& ev : tr.events) {
        bool* flag = ev.subject == "D+" ? &in_d : ev.subject == "B+" ? &in_b : nullptr;
        if (!flag) continue;
        if (ev.kind == Event::Kind::EnterSet) {
            CHECK_FALSE(*flag);
            *flag = true;
        } else if (ev.kind == Event::Kind::ExitSet) {
            CHECK(*flag);
            *flag = false;
        }
    }
    CHECK(in_d);  // ends inside D+ en route to P_ALC
}

TEST_CASE("monotone quantity decreases along interior runs") {
    const CoprimePair pair(2, 1);
    IntegratorSettings s;
    s.projection = Projection::full;
    const auto tr = integrate(shoot_seed(pair, Fiber::KplusL, 0.7), pair, Branch::plus, s);
    CHECK(monotone_check(tr).ok());
}

TEST_CASE("monotone check flags a synthetic increase") {
    Trajectory tr;
    PhasePoint p{};
    p.z1 = p.z2 = p.z3 = 0.2;
    p.z4 = 1.0;
    tr.samples.push_back({0.0, p, {}});
    p.z4 = 0.9;
    tr.samples.push_back({1.0, p, {}});
    p.z4 = 0.95;  // injected increase
    tr.samples.push_back({2.0, p, {}});
    const auto rep = monotone_check(tr);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].eta == 2.0);
}

TEST_CASE("monotone check rejects degenerate samples") {
    Trajectory tr;
    PhasePoint p{};
    p.z4 = 1.0;
    tr.samples.push_back({0.0, p, {}});
    CHECK_THROWS_AS(monotone_check(tr), DegenerateSampleError);
}

TEST_CASE("start off the constraint surface is rejected") {
    const CoprimePair pair(2, 1);
    PhasePoint p{1.0 / 3, 0, 0, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 14};
    p.x1 += 1e-3;
    CHECK_THROWS_AS(integrate(p, pair, Branch::plus, IntegratorSettings{}), DomainError);
}
