#pragma once

#include <functional>
#include <optional>
#include <string>

#include "snlevy/jump_measure.hpp"
#include "snlevy/shape_report.hpp"

namespace snlevy {

enum class Variation { bounded, unbounded };

// Spectrally negative Levy process with Laplace exponent
//   psi(theta) = gamma theta + sigma^2 theta^2 / 2
//                - int_0^inf (1 - e^{-theta x} - theta x 1{0<x<1}) Pi(dx).
// The compensation cutoff is fixed at 1; gamma is the linear coefficient in
// exactly this representation.
struct LevyModel {
    double gamma = 0.0;
    double sigma = 0.0;
    JumpMeasure jumps;
    std::string name;

    Variation variation = Variation::unbounded;
    double bv_drift = 0.0; // delta in X_t = delta t - S_t, bounded variation only

    static LevyModel make(double gamma, double sigma, JumpMeasure jumps, std::string name = "");
    // Convenience: bounded-variation model specified by its premium rate
    // delta (the drift of X between jumps): gamma = delta - int_0^1 x Pi(dx).
    static LevyModel make_bv(double delta, JumpMeasure jumps, std::string name = "");
};

namespace model {

// Laplace exponent and its derivative.
double psi(const LevyModel& m, double theta);
cplx psi(const LevyModel& m, cplx theta);
// psi(theta0 + j step) for j = 0..count-1 (batched jump transform).
std::vector<cplx> psi_batch(const LevyModel& m, cplx theta0, cplx step, int count);
double psi_derivative(const LevyModel& m, double theta);

// Largest root of psi(theta) = q on [Phi(0), inf); Phi(0) itself for q = 0.
double phi_inverse(const LevyModel& m, double q);

// Tail of the jump measure, Pi(x, inf).
double pi_tail(const LevyModel& m, double x);

// Tail of the descending-ladder Levy measure:
//   Ubar(x) = e^{Phi(0)x} int_x^inf e^{-Phi(0)z} Pibar(z) dz.
double upsilon_tail(const LevyModel& m, double x);

// Bivariate descending ladder exponent kappa-hat(q, theta) =
// (q - psi(theta)) / (Phi(q) - theta), with the removable singularity at
// theta = Phi(q) evaluated as psi'(Phi(q)).
double ladder_exponent(const LevyModel& m, double q, double theta);

struct UpsilonQ {
    double tail;    // Ubar_q(x) = e^{Phi(q)x} int_x^inf e^{-Phi(q)y} Pibar(y) dy
    double density; // upsilon_q(x) = e^{Phi(q)x} int_x^inf e^{-Phi(q)z} pi(z) dz
};
UpsilonQ upsilon_q(const LevyModel& m, double q, double x);
// Same with Phi(q) already known (avoids re-running the root search inside
// nested quadratures).
UpsilonQ upsilon_q_at(const LevyModel& m, double phi_q, double x);

// psi'(0+) = gamma - int_[1,inf) x Pi(dx); -inf when the tail mean diverges.
double drift_sign(const LevyModel& m);

// Ladder exponent descriptor (killing q/Phi(q), drift sigma^2/2, tail and
// density of its Levy measure as evaluable maps).
struct LadderExponent {
    double q = 0.0;
    double killing = 0.0;
    double drift = 0.0;
    std::function<double(double)> tail_q;
    std::function<double(double)> density_q;
};
LadderExponent ladder(const LevyModel& m, double q);

// Midpoint log-convexity certification of f > 0 on a geometric grid over
// [a, b]: at every interior node the chord of log f must lie above the node
// value (weights account for the non-uniform spacing).
ShapeReport log_convexity_check(const std::function<double(double)>& f, double a, double b,
                                int n = 512, double tol = 1e-7);

// Finite-difference probe of complete monotonicity: checks the sign pattern
// (-1)^k f^(k) >= 0 for k = 1..order at sample points.  A heuristic
// certificate, not a proof.
ShapeReport complete_monotonicity_probe(const std::function<double(double)>& f, double a, double b,
                                        int order = 8, int samples = 24);

} // namespace model
} // namespace snlevy
