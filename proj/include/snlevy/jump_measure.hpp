#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "snlevy/quadrature.hpp"

namespace snlevy {

using cplx = std::complex<double>;

struct Atom {
    double location;
    double mass;
};

enum class JumpKind { none, density, finite_activity_atoms };

// Levy measure of the (negative) jumps, supported on (0,inf).  Jump sizes are
// stored positive; the process only jumps down.
//
// Families with exponential structure (Cramer-Lundberg, piecewise exponential,
// tabulated densities under log-linear interpolation) carry closed-form tails
// and transforms.  The piecewise power family evaluates its complex transform
// by rotating the integration contour into the decaying quadrant, which keeps
// the integrand non-oscillatory for the Laplace-inversion abscissae.
class JumpMeasure {
public:
    JumpKind kind = JumpKind::none;
    std::string family = "none";

    std::function<double(double)> density_fn;           // pi(x), x > 0
    std::function<double(double)> tail_exact_fn;        // exact tail, may be null
    std::function<cplx(cplx)> laplace_fn;               // int e^{-sx} pi(x) dx, Re s > 0
    std::function<double(double)> mean_above_fn;        // int_y^inf x Pi(dx), may be null
    std::vector<Atom> atoms;
    std::vector<double> breakpoints;                    // density kinks, for panel splits

    bool finite_activity = true;
    double mass = 0.0;       // Pi(0,inf); meaningful when finite_activity
    double m1 = 0.0;         // int_0^1 x Pi(dx)
    bool mean_finite = true; // int_1^inf x Pi(dx) < inf ?
    double mean_above_one = 0.0;

    bool empty() const { return kind == JumpKind::none; }
    double density(double x) const;
    // Pi(x, inf) (atoms strictly above x in the atomic case)
    double tail(double x) const;
    // J(theta) = int (1 - e^{-theta x} - theta x 1{x<1}) Pi(dx), real theta >= 0
    double compensated_integral(double theta) const;
    // Same at complex theta (requires finite activity or closed form).
    cplx compensated_integral(cplx theta) const;
    bool has_complex_transform() const;
    cplx laplace_density(cplx s) const;
    // L(s0 + j step) for j = 0..count-1.  For the piecewise power family the
    // contour-rotated quadrature nodes are shared across the batch (the phase
    // factors form a geometric sequence), which is what makes Laplace
    // inversion affordable; other families just loop the closed forms.
    std::vector<cplx> laplace_density_batch(cplx s0, cplx step, int count) const;

    // Numerically verify int (1 ^ x^2) Pi(dx) < inf on a test grid; throws
    // DomainError when the measure is not an admissible Levy measure.
    void validate() const;

    // --- constructors -----------------------------------------------------
    static JumpMeasure none();
    // pi(x) = lambda * mu * e^{-mu x}
    static JumpMeasure exponential(double lambda, double mu);
    // Exponential segments pi(x) = k_i e^{-r_i x} on [a_i, a_{i+1}) with
    // a_last = +inf.  Used by the piecewise-exponential family and by
    // tabulated densities (log-linear interpolation).
    struct ExpSegment {
        double k, r, a, b; // b = +inf allowed on the last segment
    };
    static JumpMeasure exp_segments(std::vector<ExpSegment> segs, std::string family);
    // Paper-style two-piece exponential: f(x)=e^{2-x} on (0,alpha),
    // g(x)=e^{1-lambda x} on [alpha,inf), alpha = 1/(1-lambda), scaled by `scale`.
    static JumpMeasure piecewise_exp(double lambda, double scale = 1.0);
    // pi(x) = scale * e^{-temper/x} * x^{-(1+lambda1)} on (0,alpha),
    //         scale * e^{-temper/x} * x^{-(1+lambda2)} on [alpha,inf).
    static JumpMeasure piecewise_power(double lambda1, double lambda2, double alpha,
                                       double scale, double temper);
    static JumpMeasure finite_atoms(std::vector<Atom> atoms);
    // Generic evaluable density; moments by quadrature, no complex transform.
    static JumpMeasure from_density(std::function<double(double)> pi,
                                    std::vector<double> breakpoints = {},
                                    std::string family = "custom");
    // Two-column table (x, pi(x)); log-linear in between, exponential
    // extrapolation at both ends (the tail slope must be negative).
    static JumpMeasure table_density(const std::vector<double>& xs,
                                     const std::vector<double>& ys);

private:
    // piecewise power parameters (kind==density, family=="piecewise_power")
    struct PowerParams {
        double k, lam1, lam2, alpha, c;
    };
    std::vector<ExpSegment> segs_;
    PowerParams pow_{};
    bool is_power_ = false;
    cplx power_laplace(cplx s) const;
    void power_laplace_batch(cplx s0, cplx step, std::vector<cplx>& out) const;
    friend struct JumpMeasureTestAccess;
};

} // namespace snlevy
