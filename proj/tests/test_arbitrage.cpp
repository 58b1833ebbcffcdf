#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rgbm/arbitrage.hpp"

using namespace rgbm;
using Catch::Matchers::WithinAbs;

namespace {
const ModelParams fig1{0.0, 0.5, 1.0, 0.0, 0.0, 2.0};

PiecewiseConstant constant(double v) { return {{0.0}, {v}}; }
}  // namespace

TEST_CASE("no boundary contact means zero value throughout") {
    // start far above a low boundary over a short horizon
    ModelParams p{0.0, 0.1, 0.01, 0.0, 0.0, 1.0};
    const auto traj = run_reflection_arbitrage(p, {0.0, 0.5, 1000}, 3);
    for (double v : traj.value) CHECK(v == 0.0);
    for (double pos : traj.position) CHECK(pos == 0.0);
}

TEST_CASE("r = 0 value equals the reflection term bit for bit") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto traj = run_reflection_arbitrage(fig1, {0.0, 1.0, 1000}, seed);
        const auto path = simulate_rgbm_path(fig1, {0.0, 1.0, 1000}, seed);
        REQUIRE(traj.value.size() == path.l.size());
        for (std::size_t i = 0; i < traj.value.size(); ++i)
            CHECK(traj.value[i] == path.l[i]);
    }
}

TEST_CASE("value is stepwise non-decreasing, also with interest") {
    ModelParams p{0.0, 0.5, 1.0, 0.1, 0.0, 1.2};
    for (std::uint64_t seed : {5ull, 6ull}) {
        const auto traj = run_reflection_arbitrage(p, {0.0, 2.0, 2000}, seed);
        for (std::size_t i = 1; i < traj.value.size(); ++i)
            CHECK(traj.value[i] >= traj.value[i - 1]);
        CHECK(traj.value.front() == 0.0);
    }
}

TEST_CASE("value stays exactly zero before the first reflection") {
    ModelParams p{0.0, 0.5, 1.0, 0.05, 0.0, 1.5};
    const auto traj = run_reflection_arbitrage(p, {0.0, 5.0, 5000}, 8);
    const auto path = simulate_rgbm_path(p, {0.0, 5.0, 5000}, 8);
    std::size_t first = path.s.size();
    for (std::size_t i = 0; i < path.s.size(); ++i)
        if (path.reflected[i]) {
            first = i;
            break;
        }
    REQUIRE(first < path.s.size());  // seed chosen so the boundary is hit
    for (std::size_t i = 0; i < first; ++i) CHECK(traj.value[i] == 0.0);
    CHECK(traj.value.back() > 0.0);
}

TEST_CASE("position marks exactly the on-boundary states") {
    const auto traj = run_reflection_arbitrage(fig1, {0.0, 2.0, 2000}, 9);
    const auto path = simulate_rgbm_path(fig1, {0.0, 2.0, 2000}, 9);
    for (std::size_t i = 0; i < traj.position.size(); ++i)
        CHECK(traj.position[i] == (path.s[i] == fig1.b ? 1.0 : 0.0));
}

TEST_CASE("two-rate profit vanishes when the volatility density never vanishes") {
    CharacteristicsSpec spec{constant(0.02), constant(0.07), constant(1.0),
                             constant(1.0), 1.0};
    const auto traj = run_two_rate_increasing_profit(spec, 0.02);
    for (double v : traj.value) CHECK(v == 0.0);
    for (double pos : traj.position) CHECK(pos == 0.0);
}

TEST_CASE("two-rate profit matches the closed form on constant data") {
    // a = 0 and |b - rho| = 0.05 on [0, 1]: value(t) = e^{rho t}(e^{0.05 t} - 1)
    CharacteristicsSpec spec{constant(0.02), constant(0.07), constant(0.0),
                             constant(1.0), 1.0};
    const auto traj = run_two_rate_increasing_profit(spec, 0.02);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        CHECK_THAT(traj.value[i],
                   WithinAbs(std::exp(0.02 * t) * std::expm1(0.05 * t), 1e-14));
        CHECK(traj.position[i] == 1.0);
    }
    CHECK_THAT(traj.value.back(), WithinAbs(std::exp(0.02) * std::expm1(0.05), 1e-15));
}

TEST_CASE("two-rate profit accrues only where the integrand is active") {
    // volatility switches on at t = 0.5, freezing the integral at 0.05 * 0.5
    CharacteristicsSpec spec{constant(0.02), constant(0.07),
                             {{0.0, 0.5}, {0.0, 1.0}}, constant(1.0), 1.0};
    const auto traj = run_two_rate_increasing_profit(spec, 0.0);
    const double frozen = std::expm1(0.05 * 0.5);
    CHECK_THAT(traj.value.back(), WithinAbs(frozen, 1e-14));
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        // position[i] describes the interval ending at times[i]
        if (traj.times[i] > 0.5) CHECK(traj.position[i] == 0.0);
        if (traj.times[i] > 0.5) CHECK_THAT(traj.value[i], WithinAbs(frozen, 1e-14));
    }
}

TEST_CASE("two-rate profit scales with the clock density") {
    CharacteristicsSpec one{constant(0.0), constant(0.1), constant(0.0),
                            constant(1.0), 2.0};
    CharacteristicsSpec three{constant(0.0), constant(0.1), constant(0.0),
                              constant(3.0), 2.0};
    const double v1 = run_two_rate_increasing_profit(one, 0.0).value.back();
    const double v3 = run_two_rate_increasing_profit(three, 0.0).value.back();
    CHECK_THAT(std::log1p(v3), WithinAbs(3.0 * std::log1p(v1), 1e-12));
}

TEST_CASE("characteristics validation") {
    CharacteristicsSpec bad{constant(0.0), constant(0.0), constant(0.0),
                            constant(-1.0), 1.0};
    CHECK_THROWS_AS(validate_characteristics(bad), ValidationError);
    CharacteristicsSpec nonzero_knot{{{0.5}, {0.0}}, constant(0.0), constant(0.0),
                                     constant(1.0), 1.0};
    CHECK_THROWS_AS(validate_characteristics(nonzero_knot), ValidationError);
    CharacteristicsSpec ok{constant(0.0), constant(0.0), constant(0.0),
                           constant(1.0), 1.0};
    CHECK_NOTHROW(validate_characteristics(ok));
    CHECK_THROWS_AS(run_two_rate_increasing_profit(ok, 0.0, 0), ValidationError);
}

TEST_CASE("diagnostic masses vanish without boundary contact") {
    ModelParams p{0.0, 0.1, 0.01, 0.0, 0.0, 1.0};
    const auto rep = structure_condition_diagnostic(p, {0.0, 0.5, 500}, 8, 1);
    CHECK(rep.a_hat_reflection_mass == 0.0);
    CHECK(rep.qv_reflection_mass == 0.0);
    CHECK(rep.a_hat_interior_mass == 0.0);  // mu == r
    CHECK(rep.n_paths == 8);
}

TEST_CASE("diagnostic reflection mass equals the mean reflection term at r = 0") {
    const TimeGrid grid{0.0, 1.0, 2000};
    const int n_paths = 16;
    const auto rep = structure_condition_diagnostic(fig1, grid, n_paths, 21);
    double mean_l = 0.0;
    for (int i = 0; i < n_paths; ++i)
        mean_l += simulate_rgbm_path(fig1, grid, 21, i).l.back();
    mean_l /= n_paths;
    CHECK_THAT(rep.a_hat_reflection_mass, WithinAbs(mean_l, 1e-12));
    CHECK(rep.qv_reflection_mass > 0.0);
    CHECK(rep.dt_used == grid.dt());
}

TEST_CASE("diagnostic rejects a non-positive path count") {
    CHECK_THROWS_AS(structure_condition_diagnostic(fig1, {0.0, 1.0, 10}, 0, 1),
                    ValidationError);
}
