#include <doctest.h>

#include <cmath>

#include "ipdyn/errors.hpp"
#include "ipdyn/policy.hpp"
#include "oracles.hpp"

using namespace ipdyn;

namespace {
const ModelParams kBase{10.0, 0.0, 100.0, 0.0};
const CostSpec kSpec{1.0, 5.0, 20.0};
const Interval kRange{0.0, 10.0};

/// Cost of a uniform schedule from the test oracle: RK4 integral per segment.
double oracle_cost(const std::vector<double>& levels, const CostSpec& spec, double h = 1e-4) {
    const double w = spec.horizon / static_cast<double>(levels.size());
    double n = 0.0;
    double j = 0.0;
    for (double b : levels) {
        double end = 0.0;
        j += spec.c_infringe * oracle::rk4_integral({10.0, b, 100.0}, n, w, h, &end) + spec.c_protect * b * w;
        n = end;
    }
    return j;
}
}  // namespace

TEST_CASE("cost") {
    CHECK(cost(kBase, PolicySchedule::constant(20.0, 0.5), {1.0, 0.0, 20.0}) == 10.0);
    CHECK(cost({0.0, 0.0, 100.0, 0.0}, PolicySchedule::constant(20.0, 0.0), kSpec) == 0.0);

    const double j = cost(kBase, PolicySchedule::constant(20.0, 0.5), {1.0, 1.0, 20.0});
    CHECK(j == doctest::Approx(oracle_cost({0.5}, {1.0, 1.0, 20.0})).epsilon(1e-9));

    const auto sched = PolicySchedule::uniform(20.0, {0.0, 2.0, 0.1, 0.7});
    CHECK(cost(kBase, sched, kSpec) == doctest::Approx(oracle_cost({0.0, 2.0, 0.1, 0.7}, kSpec)).epsilon(1e-9));

    CHECK_THROWS_AS(cost(kBase, PolicySchedule::constant(20.0, 0.5), {1.0, 1.0, 10.0}), InvalidInput);
    CHECK_THROWS_AS(PolicySchedule::uniform(20.0, {}), InvalidInput);
    CHECK_THROWS_AS(CostSpec({0.0, 0.0, 1.0}).validate(), InvalidInput);
}

TEST_CASE("breakpoint states carry across segments") {
    const auto sched = PolicySchedule::uniform(20.0, {0.1, 1.0});
    const auto states = breakpoint_states(kBase, sched);
    REQUIRE(states.size() == 3);
    CHECK(states[0] == 0.0);
    CHECK(states[1] == doctest::Approx(oracle::rk4_at({10.0, 0.1, 100.0}, 0.0, 10.0)).epsilon(1e-9));
    CHECK(states[2] == doctest::Approx(oracle::rk4_at({10.0, 1.0, 100.0}, states[1], 10.0)).epsilon(1e-9));

    // A schedule with equal levels is the constant schedule.
    const double split = cost(kBase, PolicySchedule::uniform(20.0, {0.4, 0.4, 0.4}), kSpec);
    CHECK(split == doctest::Approx(cost(kBase, PolicySchedule::constant(20.0, 0.4), kSpec)).epsilon(1e-10));
}

TEST_CASE("cost is continuous in the levels") {
    const double a = cost(kBase, PolicySchedule::uniform(20.0, {0.3, 0.6}), kSpec);
    const double b = cost(kBase, PolicySchedule::uniform(20.0, {0.3 + 1e-6, 0.6}), kSpec);
    const double c = cost(kBase, PolicySchedule::uniform(20.0, {0.3 + 1e-7, 0.6}), kSpec);
    CHECK(std::abs(a - b) < 1e-2);
    CHECK(std::abs(a - c) < 0.2 * std::abs(a - b));
}

TEST_CASE("optimize_static") {
    const StaticOptimum o = optimize_static(kBase, kSpec, kRange);
    double best = 1e300;
    double arg = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double b = 10.0 * i / 10000.0;
        const double j = cost(kBase, PolicySchedule::constant(20.0, b), kSpec);
        if (j < best) best = j, arg = b;
    }
    CHECK(o.cost <= best + 1e-9);
    CHECK(std::abs(o.level - arg) <= 1e-3);

    // Free protection: push to the top. Free infringement: no protection.
    CHECK(optimize_static(kBase, {0.0, 1.0, 20.0}, kRange).level == 10.0);
    CHECK(optimize_static(kBase, {1.0, 0.0, 20.0}, kRange).level == 0.0);
    CHECK(optimize_static(kBase, kSpec, {0.7, 0.7}).level == 0.7);
    CHECK_THROWS_AS(optimize_static(kBase, kSpec, {2.0, 1.0}), InvalidInput);
}

TEST_CASE("optimize_schedule nests the static optimum") {
    const StaticOptimum s = optimize_static(kBase, kSpec, kRange);
    const ScheduleOptimum one = optimize_schedule(kBase, kSpec, 1, kRange, 0);
    CHECK(one.cost == doctest::Approx(s.cost).epsilon(1e-12));
    double prev = one.cost;
    for (std::size_t k : {2u, 4u}) {
        const ScheduleOptimum r = optimize_schedule(kBase, kSpec, k, kRange, 0);
        CHECK(r.schedule.levels.size() == k);
        CHECK(r.cost <= s.cost + 1e-9);
        CHECK(r.cost == doctest::Approx(cost(kBase, r.schedule, kSpec)).epsilon(1e-12));
        if (k == 4) CHECK(r.cost <= prev + 1e-9);
        prev = r.cost;
    }
}

TEST_CASE("optimize_schedule with no infringement cost keeps every level at the bottom") {
    const ScheduleOptimum r = optimize_schedule(kBase, {1.0, 0.0, 20.0}, 3, {0.2, 5.0}, 1);
    for (double b : r.schedule.levels) CHECK(b == 0.2);
    CHECK(r.cost == doctest::Approx(0.2 * 20.0));
}

TEST_CASE("optimize_schedule is deterministic given seed") {
    const ScheduleOptimum a = optimize_schedule(kBase, kSpec, 2, kRange, 11);
    const ScheduleOptimum b = optimize_schedule(kBase, kSpec, 2, kRange, 11);
    CHECK(a.schedule.levels == b.schedule.levels);
    CHECK(a.cost == b.cost);
}
