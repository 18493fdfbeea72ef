#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "snlevy/laplace_inversion.hpp"

using namespace snlevy;
using cplx = std::complex<double>;

TEST_CASE("euler inversion of elementary transforms") {
    // 1/s -> 1
    LaplaceTransform one = [](cplx s) { return 1.0 / s; };
    for (double t : {1e-4, 0.01, 0.5, 3.0, 20.0})
        CHECK(euler_invert(one, t) == doctest::Approx(1.0).epsilon(5e-8));

    // 1/s^2 -> t
    LaplaceTransform ramp = [](cplx s) { return 1.0 / (s * s); };
    for (double t : {0.01, 0.5, 3.0, 20.0})
        CHECK(euler_invert(ramp, t) == doctest::Approx(t).epsilon(5e-8));

    // 1/(s+1) -> e^{-t}
    LaplaceTransform dec = [](cplx s) { return 1.0 / (s + 1.0); };
    for (double t : {0.1, 1.0, 4.0})
        CHECK(euler_invert(dec, t) == doctest::Approx(std::exp(-t)).epsilon(1e-7));

    // (1 - e^{-2t}) has transform 2/(s(s+2)); relative accuracy at small t
    LaplaceTransform f = [](cplx s) { return 2.0 / (s * (s + 2.0)); };
    for (double t : {0.01, 0.1, 1.0}) {
        double want = -std::expm1(-2.0 * t);
        CHECK(euler_invert(f, t) == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("talbot inversion cross-checks euler") {
    LaplaceTransform f = [](cplx s) { return 2.0 / (s * (s + 2.0)); };
    for (double t : {0.05, 0.7, 5.0}) {
        double e = euler_invert(f, t);
        double tv = talbot_invert(f, t);
        // euler carries ~e^{-A} aliasing error; talbot is near machine precision
        CHECK(e == doctest::Approx(tv).epsilon(5e-8));
    }
}

TEST_CASE("grid inversion is deterministic across thread counts") {
    LaplaceTransform f = [](cplx s) { return 1.0 / (s * s + s); };
    std::vector<double> ts;
    for (int i = 1; i <= 64; ++i) ts.push_back(0.05 * i);
    auto a = euler_invert_grid(f, ts, {}, 1);
    auto b = euler_invert_grid(f, ts, {}, 4);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(a[i] == b[i]); // bit identical
}
