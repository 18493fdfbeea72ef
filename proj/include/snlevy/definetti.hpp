#pragma once

#include <functional>
#include <string>
#include <vector>

#include "snlevy/scale_fn.hpp"
#include "snlevy/shape_analysis.hpp"

namespace snlevy {
namespace definetti {

// C^1 function bundle with an a.e. second derivative, defined on all of R
// (zero on the negative axis), as required by the generator.
struct Cfunction {
    std::function<double(double)> f;
    std::function<double(double)> f1;
    std::function<double(double)> f2;
    // points where f, f', f'' lose smoothness (splits for the quadrature)
    std::vector<double> kinks;
    // value functions vanish on the negative axis, which turns the large-jump
    // tail of the generator integral into an exact closed form; generic test
    // functions keep their own values there (and must stay Pi-integrable)
    bool zero_on_negative = false;
};

// Barrier dividend value
//   v_a(x) = W^{(q)}(x)/W^{(q)'}(a)            for x <= a,
//            x - a + W^{(q)}(a)/W^{(q)'}(a)    for x > a,
// with W == 0 on the negatives.
double barrier_value(const scale::ScaleGrid& g, double a, double x);

// Function bundle for v_a built on the scale grid (used by the HJB checks).
Cfunction barrier_value_fn(const scale::ScaleGrid& g, double a);

// Generator of the process applied to f at x > 0:
//   Gamma f(x) = gamma f'(x) + (sigma^2/2) f''(x)
//              + int_0^inf [f(x-y) - f(x) + y f'(x) 1{y<=1}] Pi(dy).
// The small-jump part (y < eps(x) = min(0.1, x/4)) is evaluated through the
// exact second-order Taylor remainder int_0^y (y-s) f''(x-s) ds, which avoids
// the cancellation of the raw difference.  Throws DomainError when the
// integral fails its convergence check.
double generator_apply(const LevyModel& m, const Cfunction& f, double x);

// (Gamma - q) v_a at each requested point.
std::vector<double> hjb_residual(const LevyModel& m, const scale::ScaleGrid& g, double a,
                                 double q, const std::vector<double>& xs);

enum class Verdict { optimal_certified, condition_violated, inconclusive };
const char* verdict_name(Verdict v);

struct BarrierSolution {
    double q = 0.0;
    shape::AStar a_star;
    std::vector<double> xs;    // value grid
    std::vector<double> value; // v_{a*} on xs
    std::vector<double> hjb_xs_interior, hjb_interior;
    std::vector<double> hjb_xs_exterior, hjb_exterior;
    ShapeReport condition_13;    // W^{(q)'} non-decreasing on (a*, x_max)
    ShapeReport pi_log_convex;   // hypothesis record (pass or fail)
    Verdict verdict = Verdict::inconclusive;
    std::string notes;
    double hjb_tol_rel = 5e-4;   // tolerance factor: |residual| <= tol * q * v(x)
    double max_interior_rel = 0.0, max_exterior_rel = 0.0;
    scale::ScaleGrid grid;       // the scale grid the solution was built on
};

struct SolveOptions {
    scale::GridSpec grid;        // x_max is adapted to 10 * max(a*, 1)
    EulerOptions inversion;
    int hjb_points = 48;         // residual sample points per side
    double hjb_tol_rel = 5e-4;
    int n_threads = 0;
    double logconvex_lo = 1e-2, logconvex_hi = 50.0;
};

// Full pipeline: compute_scale -> find_a_star (grid auto-extended until the
// minimum is interior) -> condition-(1.3) certificate -> barrier value ->
// HJB residuals -> verdict.  optimal_certified requires the log-convex
// density certificate AND condition 1.3 AND residuals within tolerance.
BarrierSolution solve(const LevyModel& m, double q, const SolveOptions& opt = {});

} // namespace definetti
} // namespace snlevy
