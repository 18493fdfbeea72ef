#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "snlevy/quadrature.hpp"
#include "snlevy/scale_fn.hpp"

using namespace snlevy;
using namespace snlevy::scale;

namespace {

LevyModel brownian() { return LevyModel::make(0.0, 1.0, JumpMeasure::none(), "brownian"); }
LevyModel cl_exp() { return LevyModel::make_bv(1.0, JumpMeasure::exponential(1.0, 2.0), "cl"); }

// W^{(q)} for sigma=1 driftless Brownian motion: (2/sqrt(2q)) sinh(sqrt(2q) x)
double bm_w(double q, double x) {
    double s = std::sqrt(2.0 * q);
    return 2.0 / s * std::sinh(s * x);
}
double bm_w1(double q, double x) { return 2.0 * std::cosh(std::sqrt(2.0 * q) * x); }

// Two-exponential closed form for the Cramer-Lundberg model with Exp(mu)
// claims: 1/(psi - q) = (mu+th) / (c (th - Phi)(th + zeta)), inverted by
// partial fractions.  Verified below against quadrature of the Laplace
// identity before being used as an oracle.
struct ClClosed {
    double phi, zeta, A, B;
    ClClosed(double c, double lambda, double mu, double q) {
        double b = c * mu - lambda - q;
        double disc = std::sqrt(b * b + 4.0 * c * q * mu);
        phi = (-b + disc) / (2.0 * c);
        zeta = (b + disc) / (2.0 * c);
        A = (mu + phi) / (c * (phi + zeta));
        B = (mu - zeta) / (-c * (phi + zeta));
    }
    double w(double x) const { return A * std::exp(phi * x) + B * std::exp(-zeta * x); }
    double w1(double x) const {
        return A * phi * std::exp(phi * x) - B * zeta * std::exp(-zeta * x);
    }
};

} // namespace

TEST_CASE("closed-form CL oracle satisfies the Laplace identity") {
    ClClosed cf(1.0, 1.0, 2.0, 0.1);
    auto m = cl_exp();
    for (double th : {1.0, 2.0, 4.0}) {
        auto I = integrate_to_inf<double>(
            [&](double x) { return std::exp(-th * x) * cf.w(x); }, 0.0, 1.0);
        REQUIRE(I.converged);
        double psi_q = model::psi(m, th) - 0.1;
        CHECK(I.value * psi_q == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("Brownian scale function matches the sinh formula") {
    auto m = brownian();
    double q = 0.5;
    GridSpec spec;
    auto g = compute_scale(m, q, spec, {}, 1);
    CHECK(g.phi_q == doctest::Approx(1.0).epsilon(1e-12)); // sqrt(2q) = 1
    // spec example: W^{(1/2)}(1) = 2 sinh(1)
    CHECK(g.evaluate(1.0).w == doctest::Approx(2.0 * std::sinh(1.0)).epsilon(1e-8));
    for (double x : {0.01, 0.1, 0.7, 2.0, 5.0, 9.5}) {
        CHECK(g.evaluate(x).w == doctest::Approx(bm_w(q, x)).epsilon(1e-7));
        CHECK(g.evaluate(x).w1 == doctest::Approx(bm_w1(q, x)).epsilon(1e-7));
    }
    // x < 0: zero extension with undefined derivative
    auto e = g.evaluate(-1.0);
    CHECK(e.w == 0.0);
    CHECK(!e.defined);
    CHECK_THROWS_AS(g.evaluate(11.0), RangeError);
    // unbounded variation: W(0+) = 0
    CHECK(g.w0 == 0.0);
    CHECK(g.evaluate(0.0).w == doctest::Approx(0.0));
}

TEST_CASE("CL scale function matches the two-exponential formula") {
    auto m = cl_exp();
    for (double q : {0.0, 0.1, 1.0}) {
        ClClosed cf(1.0, 1.0, 2.0, q);
        auto g = compute_scale(m, q, {}, {}, 1);
        CHECK(g.phi_q == doctest::Approx(cf.phi).epsilon(1e-11));
        for (double x : {0.01, 0.05, 0.3, 1.0, 2.5, 6.0, 9.0}) {
            CHECK(g.evaluate(x).w == doctest::Approx(cf.w(x)).epsilon(1e-7));
            CHECK(g.evaluate(x).w1 == doctest::Approx(cf.w1(x)).epsilon(1e-7));
        }
        // bounded variation: W(0+) = 1/delta
        CHECK(g.w0 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(g.w.front() == doctest::Approx(cf.w(g.xs.front())).epsilon(1e-7));
    }
}

TEST_CASE("grid values are exact at nodes and stable under refinement") {
    auto m = cl_exp();
    auto g = compute_scale(m, 0.1, {}, {}, 1);
    std::size_t i = g.xs.size() / 2;
    CHECK(g.evaluate(g.xs[i]).w == g.w[i]);

    GridSpec fine;
    fine.n = 4096;
    auto g2 = compute_scale(m, 0.1, fine, {}, 1);
    for (double x : {0.02, 0.37, 1.9, 7.3}) {
        CHECK(g.evaluate(x).w ==
              doctest::Approx(g2.evaluate(x).w).epsilon(1e-6)); // grid-refinement oracle
    }
}

TEST_CASE("Eq 2.2 closure and independent u_q refinement check") {
    auto m = cl_exp();
    auto g = compute_scale(m, 0.1, {}, {}, 1);
    for (std::size_t i = 0; i < g.xs.size(); i += 97) {
        CHECK(g.w1[i] - g.phi_q * g.w[i] - g.u_q[i] == doctest::Approx(0.0)); // by construction
    }
    GridSpec fine;
    fine.n = 4096;
    auto g2 = compute_scale(m, 0.1, fine, {}, 1);
    for (double x : {0.1, 0.9, 3.0, 8.0}) {
        double u_coarse = g.interp_uq.eval(x);
        double u_fine = g2.interp_uq.eval(x);
        CHECK(u_coarse == doctest::Approx(u_fine).epsilon(1e-6));
    }
    // u_q non-increasing for this log-convex-tail model
    for (std::size_t i = 1; i < g.xs.size(); i += 13)
        CHECK(g.u_q[i] <= g.u_q[i - 1] * (1 + 1e-9) + 1e-12);
}

TEST_CASE("laplace residual is small and reports its truncation bound") {
    auto m = cl_exp();
    double q = 0.1;
    GridSpec spec;
    spec.x_max = 16.0;
    auto g = compute_scale(m, q, spec, {}, 1);
    for (double off : {1.0, 2.0, 5.0}) {
        auto r = laplace_residual(g, m, q, g.phi_q + off);
        CHECK(r.residual <= 1e-5);
        CHECK(r.truncation_bound >= 0.0);
    }
    CHECK_THROWS_AS(laplace_residual(g, m, q, g.phi_q + 0.2), PreconditionError);
}

TEST_CASE("tilted and direct inversion agree (tilt identity cross-check)") {
    auto m = cl_exp();
    double q = 0.1;
    auto g = compute_scale(m, q, {}, {}, 1);
    std::vector<double> xs;
    for (double x = 0.1; x <= 5.0; x += 0.35) xs.push_back(x);
    auto direct = compute_scale_direct(m, q, xs, 1.0, {}, 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(direct[i] == doctest::Approx(g.evaluate(xs[i]).w).epsilon(1e-6));
}

TEST_CASE("fixed-Talbot fallback agrees for meromorphic transforms") {
    auto m = cl_exp();
    double q = 0.5;
    auto g = compute_scale(m, q, {}, {}, 1);
    std::vector<double> xs{0.2, 1.0, 3.0};
    auto tv = talbot_scale(m, q, xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(tv[i] == doctest::Approx(g.evaluate(xs[i]).w).epsilon(1e-8));
}

TEST_CASE("csv serialization is deterministic") {
    auto m = cl_exp();
    GridSpec s;
    s.n = 128;
    auto g = compute_scale(m, 0.1, s, {}, 1);
    std::ostringstream a, b;
    g.write_csv(a);
    auto g2 = compute_scale(m, 0.1, s, {}, 4);
    g2.write_csv(b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("x,W,W1,W2,u_q") != std::string::npos);
}

TEST_CASE("recover_exponent round-trips the Brownian exponent") {
    // W(x) = 2x is the 0-scale function of standard Brownian motion
    auto xs = lin_spaced(1e-3, 12.0, 600);
    CandidateScale cand;
    cand.xs = xs;
    for (double x : xs) {
        cand.w.push_back(2.0 * x);
        cand.w1.push_back(2.0);
        cand.w2.push_back(0.0);
    }
    auto res = recover_exponent(cand, {1.0, 2.0, 5.0});
    for (std::size_t i = 0; i < res.thetas.size(); ++i) {
        double th = res.thetas[i];
        CHECK(res.psi_hat[i] == doctest::Approx(0.5 * th * th).epsilon(1e-6));
    }
    CHECK(res.exponent_valid);
}

TEST_CASE("recover_exponent on W = 1 - e^{-x} gives theta(theta+1)") {
    auto xs = lin_spaced(1e-3, 25.0, 1200);
    CandidateScale cand;
    cand.xs = xs;
    for (double x : xs) {
        cand.w.push_back(-std::expm1(-x));
        cand.w1.push_back(std::exp(-x));
        cand.w2.push_back(-std::exp(-x));
    }
    auto res = recover_exponent(cand, {0.5, 1.0, 2.0});
    for (std::size_t i = 0; i < res.thetas.size(); ++i) {
        double th = res.thetas[i];
        CHECK(res.psi_hat[i] == doctest::Approx(th * (th + 1.0)).epsilon(1e-6));
    }
    CHECK(res.exponent_valid);
}

TEST_CASE("recover_exponent rejects convex candidates") {
    auto xs = lin_spaced(1e-3, 5.0, 200);
    CandidateScale cand;
    cand.xs = xs;
    for (double x : xs) {
        cand.w.push_back(x * x); // convex: violates concavity hypothesis
        cand.w1.push_back(2.0 * x);
        cand.w2.push_back(2.0);
    }
    CHECK_THROWS_AS(recover_exponent(cand, {1.0}), PreconditionError);
}
