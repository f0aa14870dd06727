#include <doctest.h>

#include <cmath>
#include <limits>

#include "ipdyn/errors.hpp"
#include "ipdyn/model.hpp"
#include "oracles.hpp"

using namespace ipdyn;

namespace {

const ModelParams kControlled{10.0, 0.5, 100.0, 0.0};
const ModelParams kSaturation{10.0, 0.05, 100.0, 0.0};
const ModelParams kCritical{5.0, 0.05, 100.0, 0.0};

oracle::Ode ode(const ModelParams& p) { return {p.alpha, p.b, p.n_max}; }

ModelParams random_params(oracle::Gen& g) {
    ModelParams p;
    p.alpha = g.log_uniform(0.1, 100.0);
    p.b = g.log_uniform(1e-3, 2.0);
    p.n_max = g.log_uniform(10.0, 1000.0);
    p.n0 = 0.0;
    return p;
}

}  // namespace

TEST_CASE("ModelParams validation names the offending field") {
    CHECK_NOTHROW(kControlled.validate());
    auto field_of = [](ModelParams p) {
        try {
            p.validate();
        } catch (const InvalidInput& e) {
            return e.field();
        }
        return std::string{};
    };
    CHECK(field_of({-1.0, 0.5, 100.0, 0.0}) == "alpha");
    CHECK(field_of({1.0, -0.5, 100.0, 0.0}) == "b");
    CHECK(field_of({1.0, 0.5, 0.0, 0.0}) == "n_max");
    CHECK(field_of({1.0, 0.5, 100.0, 101.0}) == "n0");
    CHECK(field_of({1.0, 0.5, 100.0, -1.0}) == "n0");
    CHECK(field_of({std::numeric_limits<double>::quiet_NaN(), 0.5, 100.0, 0.0}) == "alpha");
    CHECK(field_of({1.0, std::numeric_limits<double>::infinity(), 100.0, 0.0}) == "b");
}

TEST_CASE("rhs") {
    CHECK(rhs(kControlled, 100.0) == 0.0);
    CHECK(rhs(kControlled, 20.0) == 0.0);
    CHECK(rhs(kControlled, 0.0) == 10.0);
    CHECK(rhs(kSaturation, 56.47) == doctest::Approx((1 - 0.5647) * (10 - 2.8235)).epsilon(1e-14));
    CHECK(rhs(kSaturation, 56.47) == doctest::Approx(3.124).epsilon(1e-3));
    CHECK_THROWS_AS(rhs(kControlled, std::numeric_limits<double>::quiet_NaN()), InvalidInput);
    // Not clamped outside the domain.
    CHECK(rhs(kControlled, 200.0) == doctest::Approx((1 - 2.0) * (10 - 100.0)));
}

TEST_CASE("equilibria carry stability labels") {
    auto eq = equilibria(kControlled);
    REQUIRE(eq.size() == 2);
    CHECK(eq[0].value == 20.0);
    CHECK(eq[0].stability == Stability::Stable);
    CHECK(eq[1].value == 100.0);
    CHECK(eq[1].stability == Stability::Unstable);

    eq = equilibria(kSaturation);
    REQUIRE(eq.size() == 2);
    CHECK(eq[0].value == 100.0);
    CHECK(eq[0].stability == Stability::Stable);
    CHECK(eq[1].value == doctest::Approx(200.0));
    CHECK(eq[1].stability == Stability::OutOfDomain);

    eq = equilibria(kCritical);
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].value == 100.0);
    CHECK(eq[0].stability == Stability::SemiStable);

    eq = equilibria({10.0, 0.0, 100.0, 0.0});
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].stability == Stability::Stable);

    eq = equilibria({0.0, 0.0, 100.0, 0.0});
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].stability == Stability::Neutral);
}

TEST_CASE("equilibrium labels agree with the sign of rhs around each point") {
    oracle::Gen g(11);
    for (int i = 0; i < 200; ++i) {
        const ModelParams p = random_params(g);
        for (const Equilibrium& e : equilibria(p)) {
            if (e.stability == Stability::OutOfDomain) {
                CHECK(e.value > p.n_max);
                continue;
            }
            const double d = 1e-6 * p.n_max;
            const double left = rhs(p, e.value - d);
            const double right = rhs(p, e.value + d);
            switch (e.stability) {
                case Stability::Stable: CHECK((left > 0 && right < 0)); break;
                case Stability::Unstable: CHECK((left < 0 && right > 0)); break;
                default: break;
            }
        }
    }
}

TEST_CASE("classify_regime") {
    Regime r = classify_regime(kControlled);
    CHECK(r.kind == RegimeKind::Controlled);
    CHECK(r.limit == doctest::Approx(20.0));
    CHECK(r.lambda == doctest::Approx(-0.4));
    CHECK_FALSE(r.stationary);

    r = classify_regime(kSaturation);
    CHECK(r.kind == RegimeKind::Saturation);
    CHECK(r.limit == 100.0);
    CHECK(r.lambda == doctest::Approx(0.05));

    r = classify_regime(kCritical);
    CHECK(r.kind == RegimeKind::Critical);
    CHECK(r.limit == 100.0);
    CHECK(r.lambda == 0.0);

    r = classify_regime(kControlled.with_n0(100.0));
    CHECK(r.stationary);
    CHECK(r.limit == 100.0);

    // Relative tolerance band around b n_max == alpha.
    CHECK(classify_regime({5.0 * (1 + 1e-10), 0.05, 100.0, 0.0}).kind == RegimeKind::Critical);
    CHECK(classify_regime({5.0 * (1 + 1e-6), 0.05, 100.0, 0.0}).kind == RegimeKind::Saturation);
    CHECK(classify_regime({5.0 * (1 + 1e-6), 0.05, 100.0, 0.0}, 1e-5).kind == RegimeKind::Critical);

    CHECK_THROWS_AS(classify_regime(kControlled, 0.0), InvalidInput);
    CHECK_THROWS_AS(classify_regime(kControlled, 0.2), InvalidInput);
}

TEST_CASE("regime invariants hold on random parameters") {
    oracle::Gen g(3);
    for (int i = 0; i < 500; ++i) {
        const ModelParams p = random_params(g);
        const Regime r = classify_regime(p);
        const double removal = p.b * p.n_max;
        if (r.kind == RegimeKind::Saturation) {
            CHECK(removal < p.alpha);
            CHECK(r.limit == p.n_max);
            CHECK(r.lambda > 0);
        } else if (r.kind == RegimeKind::Controlled) {
            CHECK(removal > p.alpha);
            CHECK(r.limit == doctest::Approx(p.alpha / p.b));
            CHECK(r.lambda < 0);
        }
    }
}

TEST_CASE("closed_form matches the RK4 oracle") {
    CHECK(closed_form(kControlled, 0.0) == 0.0);

    const double at1 = closed_form(kControlled, 1.0);
    CHECK(std::abs(at1 - oracle::rk4_at(ode(kControlled), 0.0, 1.0)) <= 1e-6);
    CHECK(at1 == doctest::Approx(7.614).epsilon(1e-4));

    const double at10 = closed_form(kControlled, 10.0);
    CHECK(std::abs(at10 - oracle::rk4_at(ode(kControlled), 0.0, 10.0)) <= 1e-6);
    CHECK(at10 == doctest::Approx(19.706).epsilon(1e-4));

    const double sat10 = closed_form(kSaturation, 10.0);
    const double e = std::exp(0.5);
    CHECK(sat10 == doctest::Approx(1000.0 * (e - 1.0) / (10.0 * e - 5.0)).epsilon(1e-13));
    CHECK(std::abs(sat10 - oracle::rk4_at(ode(kSaturation), 0.0, 10.0)) <= 1e-6);

    const double crit20 = closed_form(kCritical, 20.0);
    CHECK(crit20 == doctest::Approx(50.0).epsilon(1e-14));
    CHECK(std::abs(crit20 - oracle::rk4_at(ode(kCritical), 0.0, 20.0)) <= 1e-6);
}

TEST_CASE("closed_form edge cases") {
    CHECK(closed_form(kControlled.with_n0(100.0), 5.0) == 100.0);
    CHECK(closed_form(kSaturation.with_n0(100.0), 5.0) == 100.0);
    CHECK(closed_form({0.0, 0.0, 100.0, 30.0}, 5.0) == 30.0);
    CHECK_THROWS_AS(closed_form(kControlled, -1.0), InvalidInput);
    CHECK_THROWS_AS(closed_form(kControlled, std::numeric_limits<double>::infinity()), InvalidInput);
    // Large t neither overflows nor loses the limit.
    CHECK(closed_form(kSaturation, 1e6) == 100.0);
    CHECK(closed_form(kControlled, 1e6) == doctest::Approx(20.0).epsilon(1e-15));
    // Decay from above the inner equilibrium.
    const ModelParams decay{0.0, 1.0, 100.0, 50.0};
    CHECK(closed_form(decay, 10.0) < closed_form(decay, 1.0));
    CHECK(std::abs(closed_form(decay, 2.0) - oracle::rk4_at(ode(decay), 50.0, 2.0)) <= 1e-6);
}

TEST_CASE("closed_form properties on random parameters") {
    oracle::Gen g(7);
    for (int i = 0; i < 300; ++i) {
        ModelParams p = random_params(g);
        p.n0 = g.uniform(0.0, p.n_max);
        CHECK(closed_form(p, 0.0) == p.n0);

        const Regime r = classify_regime(p);
        if (r.kind == RegimeKind::Critical || r.stationary) continue;

        // Long-run limit at T = 20/|lambda|.
        if (p.n0 < r.limit) {
            const double t_long = 20.0 / std::abs(r.lambda);
            CHECK(std::abs(closed_form(p, t_long) - r.limit) <= 1e-3 * r.limit);
        }

        // Monotone in t toward the limit.
        double prev = p.n0;
        const double scale = 1.0 / std::abs(r.lambda);
        for (int k = 1; k <= 40; ++k) {
            const double v = closed_form(p, scale * k * 0.1);
            if (p.n0 < r.limit) {
                CHECK(v >= prev);
            } else {
                CHECK(v <= prev);
            }
            prev = v;
        }
    }
}

TEST_CASE("closed_form is continuous across the Critical band") {
    for (double t : {0.5, 5.0, 50.0}) {
        for (double n0 : {0.0, 40.0}) {
            const ModelParams crit{5.0, 0.05, 100.0, n0};
            const double degenerate = closed_form(crit, t);
            for (double sign : {-1.0, 1.0}) {
                ModelParams near = crit;
                near.alpha = 5.0 * (1.0 + sign * 1e-6);
                REQUIRE(classify_regime(near).kind != RegimeKind::Critical);
                CHECK(closed_form(near, t) == doctest::Approx(degenerate).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("settling_time") {
    const auto t95 = settling_time(kControlled, 0.95);
    REQUIRE(t95);
    CHECK(*t95 == doctest::Approx(std::log(810.0 / 50.0) / 0.4).epsilon(1e-12));
    CHECK(*t95 == doctest::Approx(6.963).epsilon(1e-4));
    CHECK(std::abs(closed_form(kControlled, *t95) - 19.0) <= 1e-6 * 20.0);

    // Saturation: frozen from the RK4 dense-output oracle (first sample >= 50).
    const auto t50 = settling_time(kSaturation, 0.5);
    REQUIRE(t50);
    const double h = 1e-4;
    const auto dense = oracle::rk4_dense(ode(kSaturation), 0.0, 12.0, h);
    std::size_t k = 0;
    while (dense[k] < 50.0) ++k;
    CHECK(std::abs(*t50 - k * h) <= h);
    CHECK(*t50 == doctest::Approx(8.109302162163).epsilon(1e-10));

    const auto crit = settling_time(kCritical, 0.5);
    REQUIRE(crit);
    CHECK(*crit == doctest::Approx(20.0).epsilon(1e-12));

    CHECK(settling_time(kControlled.with_n0(19.5), 0.95) == 0.0);
    CHECK(settling_time(kControlled.with_n0(60.0), 0.5) == 0.0);
    CHECK(settling_time({0.0, 0.0, 100.0, 10.0}, 0.5) == 0.0);
    CHECK_THROWS_AS(settling_time(kControlled, 1.0), InvalidInput);
    CHECK_THROWS_AS(settling_time(kControlled, 0.0), InvalidInput);
}

TEST_CASE("Trajectory enforces strictly increasing times") {
    CHECK_NOTHROW(Trajectory({0, 1, 2}, {0, 1, 2}));
    CHECK_THROWS_AS(Trajectory({0, 1, 1}, {0, 1, 2}), InvalidInput);
    CHECK_THROWS_AS(Trajectory({0, 1}, {0, 1, 2}), InvalidInput);
    Trajectory t;
    t.push_back(0.0, 1.0);
    CHECK_THROWS_AS(t.push_back(0.0, 1.0), InvalidInput);
}
