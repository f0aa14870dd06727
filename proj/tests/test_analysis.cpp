#include <doctest.h>

#include <cmath>

#include "ipdyn/analysis.hpp"
#include "ipdyn/errors.hpp"
#include "oracles.hpp"

using namespace ipdyn;

namespace {
const ModelParams kControlled{10.0, 0.5, 100.0, 0.0};

int rank(RegimeKind k) {
    switch (k) {
        case RegimeKind::Saturation: return 0;
        case RegimeKind::Critical: return 1;
        case RegimeKind::Controlled: return 2;
    }
    return -1;
}
}  // namespace

TEST_CASE("compare_levels") {
    const ModelParams base{10.0, 0.0, 100.0, 0.0};
    const ComparisonTable t = compare_levels(base, {0.05, 0.5}, {0.0, 10.0});
    REQUIRE(t.values.size() == 2);
    CHECK(t.values[0][0] == 0.0);
    CHECK(t.values[1][0] == 0.0);
    CHECK(t.values[0][1] == doctest::Approx(56.47).epsilon(1e-4));
    CHECK(t.values[1][1] == doctest::Approx(19.706).epsilon(1e-4));
    CHECK(t.values[1][1] < t.values[0][1]);

    const ComparisonTable same = compare_levels(base, {0.3, 0.3}, {1.0, 2.0, 3.0});
    CHECK(same.values[0] == same.values[1]);

    CHECK_THROWS_AS(compare_levels(base, {}, {1.0}), InvalidInput);
    CHECK_THROWS_AS(compare_levels(base, {-0.1}, {1.0}), InvalidInput);
    CHECK_THROWS_AS(compare_levels(base, {0.1}, {2.0, 1.0}), InvalidInput);
}

TEST_CASE("comparative statics: trajectories are pointwise nonincreasing in b up to rounding") {
    oracle::Gen g(5);
    for (int i = 0; i < 50; ++i) {
        const ModelParams base{g.log_uniform(0.5, 50), 0.0, g.log_uniform(20, 500), 0.0};
        std::vector<double> bs;
        for (int k = 0; k < 8; ++k) bs.push_back(g.log_uniform(1e-3, 2.0));
        std::sort(bs.begin(), bs.end());
        const ComparisonTable t = compare_levels(base, bs, {0.1, 1.0, 5.0, 20.0, 100.0});
        for (std::size_t r = 1; r < bs.size(); ++r) {
            for (std::size_t c = 0; c < t.t_grid.size(); ++c) CHECK(t.values[r][c] <= t.values[r - 1][c] + 1e-12);
        }
    }
}

TEST_CASE("sensitivity") {
    const Sensitivity late = sensitivity(kControlled, 50.0, SensitivityTarget::B, 1e-5);
    CHECK_FALSE(late.one_sided);
    CHECK(late.derivative == doctest::Approx(-40.0).epsilon(1e-4));

    const Sensitivity start = sensitivity(kControlled, 0.0, SensitivityTarget::Alpha, 1e-5);
    CHECK(start.derivative == 0.0);

    // Trajectory-pair oracle: finite difference of independent RK4 solutions.
    const Sensitivity early = sensitivity(kControlled, 1.0, SensitivityTarget::B, 1e-5);
    const double d = 1e-4;
    const double up = oracle::rk4_at({10.0, 0.5 + d, 100.0}, 0.0, 1.0, 1e-4);
    const double down = oracle::rk4_at({10.0, 0.5 - d, 100.0}, 0.0, 1.0, 1e-4);
    CHECK(early.derivative < 0.0);
    CHECK(early.derivative == doctest::Approx((up - down) / (2 * d)).epsilon(1e-5));

    // Halving the bump changes the estimate by far less than 10%.
    for (auto target : {SensitivityTarget::Alpha, SensitivityTarget::B, SensitivityTarget::NMax}) {
        const double a = sensitivity(kControlled, 3.0, target, 1e-4).derivative;
        const double b = sensitivity(kControlled, 3.0, target, 5e-5).derivative;
        CHECK(std::abs(a - b) <= 0.1 * std::abs(b));
    }

    CHECK(parse_sensitivity_target("n_max") == SensitivityTarget::NMax);
    CHECK_THROWS_AS(parse_sensitivity_target("gamma"), InvalidInput);
    CHECK_THROWS_AS(sensitivity(kControlled, 1.0, SensitivityTarget::B, 1e-9), InvalidInput);
}

TEST_CASE("sensitivity flags bumps that cross the Critical boundary") {
    const ModelParams crit{5.0, 0.05, 100.0, 0.0};
    const Sensitivity s = sensitivity(crit, 5.0, SensitivityTarget::B, 1e-4);
    CHECK(s.branch_crossing);
    CHECK(s.one_sided);
    CHECK(s.derivative < 0.0);

    // b = 0 cannot be bumped downward.
    const Sensitivity zero = sensitivity({10.0, 0.0, 100.0, 0.0}, 5.0, SensitivityTarget::B, 1e-4);
    CHECK(zero.one_sided);
}

TEST_CASE("regime_map") {
    const RegimeMap m = regime_map({5.0, 10.0}, {0.05, 0.5}, 100.0);
    CHECK(m.cells[1][0].kind == RegimeKind::Saturation);
    CHECK(m.cells[1][1].kind == RegimeKind::Controlled);
    CHECK(m.cells[0][0].kind == RegimeKind::Critical);
    CHECK_THROWS_AS(regime_map({}, {0.1}, 100.0), InvalidInput);
}

TEST_CASE("regime_map rows move Saturation -> Critical -> Controlled exactly once") {
    std::vector<double> bs;
    for (int k = 0; k <= 40; ++k) bs.push_back(0.005 * k);
    const RegimeMap m = regime_map({1.0, 5.0, 10.0, 17.5}, bs, 100.0);
    for (const auto& row : m.cells) {
        int changes = 0;
        for (std::size_t j = 1; j < row.size(); ++j) {
            CHECK(rank(row[j].kind) >= rank(row[j - 1].kind));
            if ((row[j].kind == RegimeKind::Controlled) != (row[j - 1].kind == RegimeKind::Controlled)) ++changes;
        }
        CHECK(changes == 1);
    }
}

TEST_CASE("simulate_stochastic trivial cases") {
    const std::vector<double> grid{0.0, 1.0, 5.0};
    const StochasticSummary none = simulate_stochastic({0.0, 0.0, 100.0, 0.0}, grid, 50, 1);
    for (double m : none.mean) CHECK(m == 0.0);
    const StochasticSummary full = simulate_stochastic({10.0, 0.5, 100.0, 100.0}, grid, 50, 1);
    for (double m : full.mean) CHECK(m == 100.0);
    for (double s : full.stderr_mean) CHECK(s == 0.0);

    CHECK_THROWS_AS(simulate_stochastic({10.0, 0.5, 100.5, 0.0}, grid, 10, 1), InvalidInput);
    CHECK_THROWS_AS(simulate_stochastic(kControlled, grid, 0, 1), InvalidInput);
    CHECK_THROWS_AS(simulate_stochastic(kControlled, {2.0, 1.0}, 10, 1), InvalidInput);
}

TEST_CASE("simulate_stochastic is seeded and tracks the ODE") {
    const std::vector<double> grid{1.0, 5.0, 10.0};
    const StochasticSummary a = simulate_stochastic(kControlled, grid, 500, 42);
    const StochasticSummary b = simulate_stochastic(kControlled, grid, 500, 42);
    const StochasticSummary c = simulate_stochastic(kControlled, grid, 500, 43);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_mean == b.stderr_mean);
    CHECK(a.mean != c.mean);

    const StochasticSummary big = simulate_stochastic(kControlled, grid, 2000, 7);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(big.mean[i] - closed_form(kControlled, grid[i])) <= 0.03 * closed_form(kControlled, grid[i]));
    }

    // Standard error halves when the ensemble quadruples.
    const StochasticSummary four = simulate_stochastic(kControlled, grid, 8000, 7);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(four.stderr_mean[i] / big.stderr_mean[i] == doctest::Approx(0.5).epsilon(0.1));
    }
}
