#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "snlevy/interpolation.hpp"
#include "snlevy/quadrature.hpp"

using namespace snlevy;

TEST_CASE("adaptive GK on finite intervals") {
    auto r = integrate_real([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    r = integrate_real([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

    // integrable endpoint singularity
    r = integrate_real([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("complex-valued quadrature") {
    auto r = integrate<std::complex<double>>(
        [](double x) { return std::exp(std::complex<double>(0.0, x)); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value.real() == doctest::Approx(std::sin(1.0)).epsilon(1e-13));
    CHECK(r.value.imag() == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-13));
}

TEST_CASE("semi-infinite tails") {
    auto r = integrate_to_inf<double>([](double x) { return std::exp(-x); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));

    // slow power tail
    r = integrate_to_inf<double>([](double x) { return std::pow(x, -1.5); }, 1.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("pchip interpolates nodes exactly and preserves monotonicity") {
    std::vector<double> xs{0.0, 0.3, 1.0, 2.5, 4.0};
    std::vector<double> ys{0.0, 0.1, 0.9, 2.0, 2.1};
    PchipInterpolant p(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(p(xs[i]) == doctest::Approx(ys[i]));
    double prev = -1;
    for (double x = 0.0; x <= 4.0; x += 1e-3) {
        double v = p(x);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
    CHECK_THROWS_AS(p(4.5), RangeError);
}

TEST_CASE("pchip reproduces linear data exactly, with matching transform") {
    std::vector<double> xs{0.0, 0.5, 1.2, 2.0, 3.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(2.0 + 3.0 * x);
    PchipInterpolant p(xs, ys);
    CHECK(p(1.7) == doctest::Approx(2.0 + 3.0 * 1.7).epsilon(1e-14));
    CHECK(p.derivative(0.9) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(p.integrate(0.0, 3.0) == doctest::Approx(2.0 * 3 + 1.5 * 9).epsilon(1e-13));

    // int_0^3 e^{-sx}(2+3x) dx against an independent quadrature oracle
    for (std::complex<double> s : {std::complex<double>(0.8, 1.3),
                                   std::complex<double>(1e-4, 2e-5),
                                   std::complex<double>(4.0, -9.0)}) {
        auto oracle = integrate<std::complex<double>>(
            [&](double x) { return std::exp(-s * x) * (2.0 + 3.0 * x); }, 0.0, 3.0);
        REQUIRE(oracle.converged);
        auto got = p.laplace(s);
        CHECK(std::abs(got - oracle.value) <= 1e-11 * std::abs(oracle.value));
    }
}

TEST_CASE("fornberg weights differentiate smooth functions") {
    std::vector<double> nodes{-0.2, -0.05, 0.0, 0.11, 0.3};
    auto w = fd_weights(0.0, nodes, 2);
    double d1 = 0, d2 = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        d1 += w[1][i] * std::sin(nodes[i]);
        d2 += w[2][i] * std::sin(nodes[i]);
    }
    CHECK(d1 == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(d2 == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("grid derivative on a non-uniform grid") {
    auto xs = log_spaced(0.1, 10.0, 200);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(x * x * x);
    auto d1 = grid_derivative(xs, ys, 1);
    auto d2 = grid_derivative(xs, ys, 2);
    for (std::size_t i = 0; i < xs.size(); i += 17) {
        CHECK(d1[i] == doctest::Approx(3 * xs[i] * xs[i]).epsilon(1e-7));
        CHECK(d2[i] == doctest::Approx(6 * xs[i]).epsilon(1e-5));
    }
}

TEST_CASE("scale grid layout") {
    auto g = scale_grid_points(1e-4, 0.1, 10.0, 2048);
    CHECK(g.front() == doctest::Approx(1e-4));
    CHECK(g.back() == doctest::Approx(10.0));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("pairwise sum is order-fixed and accurate") {
    std::vector<double> v(1000);
    for (int i = 0; i < 1000; ++i) v[i] = std::sin(i) * 1e-3;
    double a = pairwise_sum(v.data(), v.size());
    long double ref = 0;
    for (double x : v) ref += x;
    CHECK(a == doctest::Approx(double(ref)).epsilon(1e-14));
}
