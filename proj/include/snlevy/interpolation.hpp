#pragma once

#include <complex>
#include <vector>

namespace snlevy {

// Shape-preserving piecewise-cubic Hermite interpolant (Fritsch-Carlson
// slopes) on a strictly increasing, possibly non-uniform grid.
class PchipInterpolant {
public:
    PchipInterpolant() = default;
    PchipInterpolant(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const { return eval(x); }
    double eval(double x) const;
    double derivative(double x) const;

    // Exact integral of the interpolant over [a, b] within the grid range.
    double integrate(double a, double b) const;

    // Exact Laplace transform of the interpolant over its grid range:
    //   int_{x0}^{xn} e^{-s x} p(x) dx,  computed cell by cell in closed form.
    std::complex<double> laplace(std::complex<double> s) const;

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    const std::vector<double>& slopes() const { return ms_; }

private:
    std::size_t cell(double x) const;
    std::vector<double> xs_, ys_, ms_;
};

// Finite-difference weights on arbitrary nodes (Fornberg's algorithm).
// Returns w[k][i] so that f^(k)(x0) ~= sum_i w[k][i] f(nodes[i]) for
// k = 0..max_order.
std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& nodes,
                                            int max_order);

// Derivative of tabulated values on a non-uniform grid using a centered
// `width`-point stencil (one-sided at the edges).  width must be odd.
std::vector<double> grid_derivative(const std::vector<double>& xs, const std::vector<double>& ys,
                                    int order, int width = 5);

// Log-spaced points on [a, b] inclusive.
std::vector<double> log_spaced(double a, double b, int n);
// Linear points on [a, b] inclusive.
std::vector<double> lin_spaced(double a, double b, int n);

// Grid used for scale functions: log-spaced on [x_min, split], linear on
// [split, x_max]; strictly increasing, no duplicates.
std::vector<double> scale_grid_points(double x_min, double split, double x_max, int n_total,
                                      double log_fraction = 0.25);

// Deterministic pairwise (tree) sum; independent of chunking/thread count.
double pairwise_sum(const double* data, std::size_t n);

} // namespace snlevy
