#pragma once

#include <iosfwd>
#include <vector>

#include "snlevy/interpolation.hpp"
#include "snlevy/laplace_inversion.hpp"
#include "snlevy/levy_model.hpp"
#include "snlevy/shape_report.hpp"

namespace snlevy {
namespace scale {

struct GridSpec {
    double x_min = 1e-4;
    double split = 0.1;   // log-spaced below, linear above
    double x_max = 10.0;
    int n = 2048;
    double log_fraction = 0.25;
};

// Tabulated q-scale function.  The tilted columns hold the bounded original
// W_{Phi(q)}(x) = e^{-Phi(q)x} W^{(q)}(x) and its derivative, which are what
// the numerical inversion actually produces; the exponential factor is applied
// analytically.  w1 = Phi(q) w + u_q holds identically by construction.
struct ScaleGrid {
    double q = 0.0;
    double phi_q = 0.0;
    std::vector<double> xs, w, w1, w2, u_q;
    std::vector<double> w_tilt;  // W_{Phi(q)}; equals g_q(x) = e^{-Phi(q)x}W^{(q)}(x)
    std::vector<double> w1_tilt; // W_{Phi(q)}' = e^{-Phi(q)x} u_q(x)
    std::string method;
    double w0 = 0.0;        // W^{(q)}(0+): 1/delta for bounded variation, else 0
    Variation variation = Variation::unbounded;
    double delta = 0.0;     // bv drift when bounded variation
    std::vector<std::size_t> kink_indices; // w2 flagged distributional here

    struct Eval {
        double w = 0.0;
        double w1 = 0.0;
        bool defined = true; // false for x < 0 (W == 0 there, W' undefined)
    };
    // Monotone cubic interpolation; returns (0, undefined) for x < 0, throws
    // RangeError beyond x_max.
    Eval evaluate(double x) const;
    double eval_w(double x) const { return evaluate(x).w; }
    double eval_w1(double x) const;
    double x_max() const { return xs.back(); }

    void write_csv(std::ostream& os) const;

    // interpolants are built once and shared (immutable afterwards)
    PchipInterpolant interp_w, interp_w1, interp_w2, interp_uq;
    void build_interpolants();
};

// Compute W^{(q)} by Abate-Whitt Euler inversion of the Esscher-tilted
// transform 1/psi_q, psi_q(s) = psi(s + Phi(q)) - q, then untilt.  W' is
// inverted directly from s/psi_q - W_tilt(0+), so no numerical
// differentiation enters w1 or u_q.
ScaleGrid compute_scale(const LevyModel& m, double q, const GridSpec& spec = {},
                        const EulerOptions& opt = {}, int n_threads = 0);

// Cross-check mode: invert 1/(psi - q) on a vertical contour at
// Phi(q) + margin instead of tilting by exactly Phi(q).
std::vector<double> compute_scale_direct(const LevyModel& m, double q,
                                         const std::vector<double>& xs, double margin = 1.0,
                                         const EulerOptions& opt = {}, int n_threads = 0);

// Fixed-Talbot evaluation of W^{(q)} at selected points (fallback
// cross-check; requires a transform analytic off the negative real axis, so
// not available for the piecewise power family).
std::vector<double> talbot_scale(const LevyModel& m, double q, const std::vector<double>& xs,
                                 int M = 48);

struct ResidualReport {
    double residual = 0.0;         // |(psi(theta)-q) * int_0^xmax e^{-theta x} W - 1|
    double truncation_bound = 0.0; // bound on the discarded tail contribution
};
// theta must exceed Phi(q) + margin (default 0.5) so the truncated tail is
// controlled; the remainder bound is reported, not subtracted.
ResidualReport laplace_residual(const ScaleGrid& g, const LevyModel& m, double q, double theta,
                                double margin = 0.5);

// Candidate scale-function table for the inverse direction.
struct CandidateScale {
    std::vector<double> xs, w, w1, w2;
};

struct RecoverResult {
    std::vector<double> thetas;
    std::vector<double> psi_hat; // 1 / Laplace(W)(theta)
    std::vector<ShapeReport> hypothesis_reports;
    bool exponent_valid = false; // psi_hat(0+)=0, convex, psi_hat/theta concave
    std::string validity_note;
};

// Corollary-2.4-style inverse direction: verify the candidate's hypotheses
// (concave non-decreasing W, non-increasing W', -W'' non-increasing and log
// convex, lim x W'(x) < inf), then recover psi_hat = 1/L[W] and probe that it
// is a valid Laplace exponent.  Throws PreconditionError naming the violated
// hypothesis.
RecoverResult recover_exponent(const CandidateScale& cand, const std::vector<double>& thetas);

} // namespace scale
} // namespace snlevy
