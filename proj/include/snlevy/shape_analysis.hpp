#pragma once

#include <vector>

#include "snlevy/scale_fn.hpp"
#include "snlevy/shape_report.hpp"

namespace snlevy {
namespace shape {

// Certify convexity / concavity / monotonicity of tabulated values on the
// part of the grid inside [lo, hi].  The defect at each interior node is the
// (locally normalized) chord excess; tolerance is folded into the defect, so
// report.pass <=> worst_violation <= 0.  `strict` demands a positive margin
// tol_strict instead (used for strict convexity).
ShapeReport convexity_report(const std::vector<double>& xs, const std::vector<double>& ys,
                             double lo, double hi, ShapeReport::Property property,
                             double tol = 1e-7, bool strict = false, double tol_strict = 1e-10);

// Largest global minimizer of W^{(q)'}.
struct AStar {
    double value = 0.0;        // a* (right edge of the plateau)
    double w1_min = 0.0;       // global minimum of W^{(q)'}
    double plateau_left = 0.0; // tie region at relative tolerance 1e-9
    double plateau_right = 0.0;
};

// Requires the grid to extend beyond the minimum: W'(x_max) must exceed the
// minimum by >= 10% of its magnitude, else throws NumericError("a* not
// localized...") so the caller can extend the grid and retry.
AStar find_a_star(const scale::ScaleGrid& g);

enum class SmoothLevel { C2, C1, not_C1, unknown };
struct SmoothnessClass {
    SmoothLevel level = SmoothLevel::unknown;
    bool tail_continuous = true;
    double atom_location = 0.0; // first atom when not_C1
    std::string reason;
};
SmoothnessClass smoothness_class(const LevyModel& m);

// Conjugate ladder tail at q = 0: Ustar(x) = W'(x) - W'(x_max), the
// finite-sample proxy for W'(x) - W'(inf).  Requires Phi(0) = 0 and a
// log-convexity certificate for Pibar (vacuous for models without jumps).
struct ConjugateTail {
    std::vector<double> xs;
    std::vector<double> tail;
    double w1_at_xmax = 0.0; // proxy for W'(inf); bias O(W'(x_max) - W'(inf))
    ShapeReport non_increasing;
    ShapeReport non_negative;
};
ConjugateTail conjugate_tail(const scale::ScaleGrid& g, const ShapeReport& pibar_logconvex_cert);

// Corollary-2.3-style check on a candidate potential density u = W' (with
// derivative u' = W'' supplied): verify the hypotheses, then recover the
// underlying Levy density through the conjugate pair (H -> H* -> H) and test
// that it is non-increasing (equivalently, the potential density of H* is
// convex).
struct Corollary23Result {
    std::vector<ShapeReport> hypothesis_reports;
    ShapeReport conclusion;
    bool pass = false;
};
Corollary23Result corollary23_check(const std::vector<double>& xs, const std::vector<double>& u,
                                    const std::vector<double>& u1);

// Largest grid point at which u_q is resolvable above the inversion noise
// floor: the tilted derivative e^{-Phi(q)x} u_q(x) carries a roughly uniform
// absolute error, so u_q is trustworthy while w1_tilt stays above
// snr * max(w1_tilt).  Shape certificates for u_q are restricted to this
// range (and the report states the certified interval).
double uq_resolvable_upper(const scale::ScaleGrid& g, double snr = 1e-4);

// Tail of the excursion-height measure for bounded-variation models:
//   T(z) = (1/delta) Pi(z,inf)
//        + (1/delta) int_(0,z) Pi(dx) (1 - W(z-x)/W(z)),
// with strict conventions at atoms (an atom at exactly z enters neither
// term, so the computed function has both one-sided jumps there).
double excursion_sup_tail(const LevyModel& m, const scale::ScaleGrid& w0_grid, double z);

// Total discontinuity of the excursion tail across an atom location:
// [T(a-eps) - T(a)] + [T(a+eps) - T(a)].
double excursion_atom_jump(const LevyModel& m, const scale::ScaleGrid& w0_grid, double a,
                           double eps = 1e-9);

} // namespace shape
} // namespace snlevy
