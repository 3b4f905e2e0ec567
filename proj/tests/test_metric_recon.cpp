#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spin7/metric_recon.hpp"
#include "spin7/shooting.hpp"

using namespace spin7;

namespace {

Trajectory cone_run(const CoprimePair& pair, Branch br, double span) {
    IntegratorSettings s;
    s.eta_max_span = span;
    s.projection = Projection::full;
    return integrate(solve_ac(pair, br).point, pair, br, s);
}

}  // namespace

TEST_CASE("cone trajectory reconstructs to an exactly linear profile") {
    const CoprimePair pair(2, 1);
    const auto prof = reconstruct(cone_run(pair, Branch::plus, 40), pair, 1.0);
    REQUIRE(!prof.rows.empty());
    CHECK(prof.rows.front().t == 0.0);
    CHECK(prof.rows.front().trL == 1.0);

    const auto cls = classify_asymptotics(prof);
    CHECK(cls.kind == AsymptoticKind::AC);
    CHECK(cls.fit_residual < 1e-10);
    REQUIRE(cls.slopes.has_value());
    for (double s : *cls.slopes) CHECK(s > 0);
}

TEST_CASE("profile consistency identities") {
    const CoprimePair pair(2, 1);
    ShootConfig cfg;
    cfg.theta = 0.7;
    cfg.integrator.eta_max_span = 60;
    const auto tr = integrate(seed(pair, OrbitLabel(Fiber::KplusL, pair), cfg), pair,
                              Branch::plus, cfg.integrator);
    const auto prof = reconstruct(tr, pair, 2.5);
    REQUIRE(prof.rows.size() == tr.samples.size());
    double tprev = -1;
    for (size_t i = 0; i < prof.rows.size(); ++i) {
        const auto& r = prof.rows[i];
        const auto& p = tr.samples[i].point;
        CHECK(r.t > tprev);
        tprev = r.t;
        CHECK(r.f * r.trL == Catch::Approx(p.z4).epsilon(1e-8));
        if (std::isfinite(r.a))
            CHECK(1.0 / (r.trL * r.trL * p.z2 * p.z3) ==
                  Catch::Approx(r.a * r.a).epsilon(1e-8));
    }
}

TEST_CASE("gauge covariance") {
    const CoprimePair pair(2, 1);
    const auto tr = cone_run(pair, Branch::minus, 40);
    const auto base = reconstruct(tr, pair, 1.0);
    const auto base_cls = classify_asymptotics(base);
    REQUIRE(base_cls.slopes.has_value());
    for (double lambda : {0.5, 2.0, 10.0}) {
        const auto scaled = reconstruct(tr, pair, lambda);
        const auto cls = classify_asymptotics(scaled);
        CHECK(cls.kind == base_cls.kind);
        REQUIRE(cls.slopes.has_value());
        for (int i = 1; i < 4; ++i) {
            const double r0 = (*base_cls.slopes)[i] / (*base_cls.slopes)[0];
            const double r1 = (*cls.slopes)[i] / (*cls.slopes)[0];
            CHECK(r1 == Catch::Approx(r0).margin(1e-9 * (1 + std::abs(r0))));
        }
    }
}

TEST_CASE("ALC run: f settles while a,b,c keep growing") {
    const CoprimePair pair(2, 1);
    ShootConfig cfg;
    cfg.theta = 0.05;
    cfg.integrator.eta_max_span = 200;
    const auto res = classify(pair, OrbitLabel(Fiber::KplusL, pair), cfg);
    REQUIRE(res.fate == Fate::ALC);
    const auto prof = reconstruct(res.trajectory, pair, 1.0);
    const auto cls = classify_asymptotics(prof);
    CHECK(cls.kind == AsymptoticKind::ALC);
    REQUIRE(cls.f_limit.has_value());
    CHECK(*cls.f_limit > 0);

    // f varies by < 1% over the final decade of t.
    const double t_end = prof.rows.back().t;
    double fmin = 1e300, fmax = 0;
    for (const auto& r : prof.rows) {
        if (r.t < t_end / 10) continue;
        fmin = std::min(fmin, r.f);
        fmax = std::max(fmax, r.f);
    }
    CHECK((fmax - fmin) / fmax < 0.01);
}

TEST_CASE("degenerate theta=0 run flags the components touching the vanishing Z") {
    const CoprimePair pair(2, 1);
    ShootConfig cfg;
    cfg.theta = 0.0;
    cfg.integrator.eta_max_span = 30;
    const auto tr = integrate(seed(pair, OrbitLabel(Fiber::KplusL, pair), cfg), pair,
                              Branch::plus, cfg.integrator);
    const auto prof = reconstruct(tr, pair, 1.0);
    for (const auto& r : prof.rows) {
        CHECK(std::isfinite(r.a));  // pair (Z2, Z3), both positive on W_{k+l}
        CHECK(std::isinf(r.b));     // pair (Z1, Z3) contains Z1 = 0
        CHECK(std::isinf(r.c));     // pair (Z1, Z2) contains Z1 = 0
    }
}

TEST_CASE("constant ALC trajectory has Z4 = 0 throughout, so f = 0") {
    const CoprimePair pair(2, 1);
    IntegratorSettings s;
    s.eta_max_span = 10;
    const auto tr = integrate(alc_point().point, pair, Branch::plus, s);
    const auto prof = reconstruct(tr, pair, 1.0);
    for (const auto& r : prof.rows) CHECK(r.f == 0.0);
}

TEST_CASE("error paths") {
    const CoprimePair pair(2, 1);
    CHECK_THROWS_AS(reconstruct(Trajectory{}, pair, 1.0), EmptyTrajectoryError);
    const auto tr = cone_run(pair, Branch::plus, 10);
    CHECK_THROWS_AS(reconstruct(tr, pair, 0.0), NonPositiveGaugeError);
    CHECK_THROWS_AS(reconstruct(tr, pair, -2.0), NonPositiveGaugeError);
    const auto short_run = cone_run(pair, Branch::plus, 5);
    CHECK_THROWS_AS(classify_asymptotics(reconstruct(short_run, pair, 1.0)),
                    WindowTooShortError);
}
