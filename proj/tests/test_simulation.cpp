#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "snlevy/definetti.hpp"
#include "snlevy/simulation.hpp"

using namespace snlevy;
using namespace snlevy::sim;

namespace {
LevyModel cl_exp() { return LevyModel::make_bv(1.0, JumpMeasure::exponential(1.0, 2.0), "cl"); }
}

TEST_CASE("philox known-answer vector and stream behaviour") {
    // Random123 reference: philox4x32-10 with zero counter and key
    std::uint32_t ctr[4] = {0, 0, 0, 0}, key[2] = {0, 0}, out[4];
    PhiloxStream::block(ctr, key, out);
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    // distinct paths decorrelate; same path reproduces bitwise
    PhiloxStream a(42, 0), b(42, 0), c(42, 1);
    for (int i = 0; i < 100; ++i) {
        double ua = a.next_u01();
        CHECK(ua == b.next_u01());
        CHECK(ua != c.next_u01());
        CHECK(ua > 0.0);
        CHECK(ua < 1.0);
    }
}

TEST_CASE("deterministic estimates, independent of thread count") {
    auto m = cl_exp();
    SimOptions o1;
    o1.n_threads = 1;
    SimOptions o4;
    o4.n_threads = 4;
    auto e1 = simulate_value(m, StrategySpec::barrier(2.0), 0.1, 2.0, 20000, 99, o1);
    auto e4 = simulate_value(m, StrategySpec::barrier(2.0), 0.1, 2.0, 20000, 99, o4);
    CHECK(e1.mean == e4.mean); // bit identical
    CHECK(e1.std_error == e4.std_error);
    auto e1b = simulate_value(m, StrategySpec::barrier(2.0), 0.1, 2.0, 20000, 99, o1);
    CHECK(e1.mean == e1b.mean);
}

TEST_CASE("initial lump sum is paid in every path when x0 > a") {
    auto m = cl_exp();
    std::vector<double> vals;
    SimOptions opt;
    opt.n_threads = 1;
    opt.path_values = &vals;
    double a = 1.0, x0 = 3.0;
    auto est = simulate_value(m, StrategySpec::barrier(a), 0.1, x0, 5000, 7, opt);
    REQUIRE(vals.size() == 5000);
    for (double v : vals) CHECK(v >= x0 - a);
    CHECK(est.mean >= x0 - a);
}

TEST_CASE("heavy discounting collapses the value to the lump sum") {
    auto m = cl_exp();
    double q = 50.0, a = 1.0, x0 = 2.5;
    SimOptions opt;
    opt.n_threads = 1;
    auto est = simulate_value(m, StrategySpec::barrier(a), q, x0, 20000, 11, opt);
    CHECK(std::abs(est.mean - (x0 - a)) <= 3.0 * m.bv_drift / q);
}

TEST_CASE("Monte Carlo agrees with the analytic barrier value") {
    auto m = cl_exp();
    double q = 0.1;
    definetti::SolveOptions so;
    so.n_threads = 1;
    auto sol = definetti::solve(m, q, so);
    double a = sol.a_star.value;
    SimOptions opt;
    opt.n_threads = 1;
    for (double f : {0.5, 1.0, 2.0}) {
        double x0 = f * a;
        double want = definetti::barrier_value(sol.grid, a, x0);
        auto est = simulate_value(m, StrategySpec::barrier(a), q, x0, 50000, 4242, opt);
        CHECK(std::abs(est.mean - want) <= 3.0 * est.std_error);
        CHECK(est.std_error <= 0.01 * want);
        CHECK(est.truncation_bias_bound <= 1e-12);
    }
}

TEST_CASE("doubling the horizon moves the estimate less than the bias bound") {
    auto m = cl_exp();
    SimOptions o1;
    o1.n_threads = 1;
    o1.horizon = 80.0; // q T = 8: visible truncation
    auto e1 = simulate_value(m, StrategySpec::barrier(2.0), 0.1, 2.0, 30000, 5, o1);
    SimOptions o2 = o1;
    o2.horizon = 160.0;
    auto e2 = simulate_value(m, StrategySpec::barrier(2.0), 0.1, 2.0, 30000, 5, o2);
    CHECK(std::abs(e2.mean - e1.mean) <= e1.truncation_bias_bound);
}

TEST_CASE("classical ruin probability smoke test (no dividends, q -> 0 proxy)") {
    auto m = cl_exp();
    SimOptions opt;
    opt.n_threads = 1;
    auto est = simulate_value(m, StrategySpec::none(), 1e-3, 1.0, 20000, 7, opt);
    double W1 = 2.0 - std::exp(-1.0); // 0-scale function of the CL model at 1
    double classical = 1.0 - 0.5 * W1;
    CHECK(std::abs(est.ruin_fraction - classical) <= 5e-2);
    CHECK(est.mean == 0.0); // no dividends under `none`
}

TEST_CASE("strategy comparison under common random numbers") {
    auto m = cl_exp();
    double q = 0.1, astar = 2.107;
    std::vector<StrategySpec> strategies{
        StrategySpec::barrier(astar),   StrategySpec::barrier(astar / 2),
        StrategySpec::barrier(2 * astar), StrategySpec::threshold(astar, 0.5),
        StrategySpec::barrier(astar)}; // duplicate of the champion
    SimOptions opt;
    opt.n_threads = 1;
    auto cmp = compare_strategies(m, q, astar, strategies, 20000, 31337, opt);
    // identical strategy, same seed: identical estimate bit-for-bit
    CHECK(cmp.estimates[4].mean == cmp.estimates[0].mean);
    CHECK(cmp.diff_vs_first[4] == 0.0);
    // the optimal barrier is not beaten
    CHECK(!cmp.first_beaten);
    // threshold with rate < c stays below barrier(a*) + 3 se
    CHECK(cmp.estimates[3].mean <= cmp.estimates[0].mean + 3 * cmp.estimates[3].std_error);
    // and the comparison is deterministic
    auto cmp2 = compare_strategies(m, q, astar, strategies, 20000, 31337, opt);
    CHECK(cmp2.estimates[1].mean == cmp.estimates[1].mean);
}

TEST_CASE("unsupported models are rejected") {
    auto bm = LevyModel::make(0.0, 1.0, JumpMeasure::none(), "bm");
    CHECK_THROWS_AS(simulate_value(bm, StrategySpec::barrier(1.0), 0.1, 1.0, 10, 1, {}),
                    DomainError);
}

TEST_CASE("piecewise power claims are sampled through the quantile table") {
    auto m = LevyModel::make_bv(3.0, JumpMeasure::piecewise_power(1.5, 0.5, 1.0, 0.1, 0.01),
                                "pp");
    SimOptions opt;
    opt.n_threads = 1;
    auto est = simulate_value(m, StrategySpec::barrier(1.3), 0.5, 1.3, 2000, 3, opt);
    CHECK(est.mean > 0.0);
    CHECK(std::isfinite(est.std_error));
}
