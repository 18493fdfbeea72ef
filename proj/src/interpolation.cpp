#include "snlevy/interpolation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "snlevy/errors.hpp"

namespace snlevy {

PchipInterpolant::PchipInterpolant(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n) throw DomainError("pchip: need >= 2 matching points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs_[i] > xs_[i - 1])) throw DomainError("pchip: grid not strictly increasing");

    ms_.assign(n, 0.0);
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = xs_[i + 1] - xs_[i];
        d[i] = (ys_[i + 1] - ys_[i]) / h[i];
    }
    if (n == 2) {
        ms_[0] = ms_[1] = d[0];
        return;
    }
    // Interior slopes: weighted harmonic mean where secants agree in sign.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
            ms_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            ms_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d0 == 0.0 || (m > 0) != (d0 > 0))
            m = 0.0;
        else if ((d0 > 0) != (d1 > 0) && std::abs(m) > 3.0 * std::abs(d0))
            m = 3.0 * d0;
        return m;
    };
    ms_[0] = endpoint(h[0], h[1], d[0], d[1]);
    ms_[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

std::size_t PchipInterpolant::cell(double x) const {
    if (x < xs_.front() || x > xs_.back())
        throw RangeError("pchip: evaluation outside grid range");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = (it == xs_.begin()) ? 0 : std::size_t(it - xs_.begin()) - 1;
    if (i + 1 >= xs_.size()) i = xs_.size() - 2;
    return i;
}

double PchipInterpolant::eval(double x) const {
    std::size_t i = cell(x);
    double h = xs_[i + 1] - xs_[i];
    double t = (x - xs_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    return h00 * ys_[i] + h10 * h * ms_[i] + h01 * ys_[i + 1] + h11 * h * ms_[i + 1];
}

double PchipInterpolant::derivative(double x) const {
    std::size_t i = cell(x);
    double h = xs_[i + 1] - xs_[i];
    double t = (x - xs_[i]) / h;
    double t2 = t * t;
    double dh00 = (6 * t2 - 6 * t) / h;
    double dh10 = 3 * t2 - 4 * t + 1;
    double dh01 = (-6 * t2 + 6 * t) / h;
    double dh11 = 3 * t2 - 2 * t;
    return dh00 * ys_[i] + dh10 * ms_[i] + dh01 * ys_[i + 1] + dh11 * ms_[i + 1];
}

namespace {
// Coefficients of the Hermite cubic on cell i in the local variable u = x-x_i:
// p(u) = c0 + c1 u + c2 u^2 + c3 u^3.
struct CellPoly {
    double c0, c1, c2, c3;
};
CellPoly cell_poly(double h, double y0, double y1, double m0, double m1) {
    CellPoly p;
    p.c0 = y0;
    p.c1 = m0;
    p.c2 = (3.0 * (y1 - y0) / h - 2.0 * m0 - m1) / h;
    p.c3 = (2.0 * (y0 - y1) / h + m0 + m1) / (h * h);
    return p;
}
} // namespace

double PchipInterpolant::integrate(double a, double b) const {
    if (a > b) return -integrate(b, a);
    std::size_t ia = cell(a), ib = cell(b);
    double total = 0.0;
    for (std::size_t i = ia; i <= ib; ++i) {
        double lo = (i == ia) ? a : xs_[i];
        double hi = (i == ib) ? b : xs_[i + 1];
        double h = xs_[i + 1] - xs_[i];
        CellPoly p = cell_poly(h, ys_[i], ys_[i + 1], ms_[i], ms_[i + 1]);
        auto F = [&](double x) {
            double u = x - xs_[i];
            return u * (p.c0 + u * (p.c1 / 2 + u * (p.c2 / 3 + u * p.c3 / 4)));
        };
        total += F(hi) - F(lo);
    }
    return total;
}

std::complex<double> PchipInterpolant::laplace(std::complex<double> s) const {
    using cplx = std::complex<double>;
    // I_j(h) = int_0^h u^j e^{-s u} du, computed by series for small |s h|
    // and by the upward recurrence otherwise.
    auto cell_transform = [&](double h, const CellPoly& p) {
        cplx I[4];
        cplx sh = s * h;
        if (std::abs(sh) < 0.5) {
            for (int j = 0; j < 4; ++j) {
                cplx term = 1.0 / double(j + 1);
                cplx sum = term;
                cplx msh = -sh;
                cplx pw = 1.0;
                double fact = 1.0;
                for (int m = 1; m < 30; ++m) {
                    pw *= msh;
                    fact *= m;
                    term = pw / (fact * double(j + m + 1));
                    sum += term;
                    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
                }
                I[j] = sum * std::pow(h, j + 1);
            }
        } else {
            cplx e = std::exp(-sh);
            I[0] = (1.0 - e) / s;
            double hj = 1.0;
            for (int j = 1; j < 4; ++j) {
                hj *= h;
                I[j] = (double(j) * I[j - 1] - hj * e) / s;
            }
        }
        return p.c0 * I[0] + p.c1 * I[1] + p.c2 * I[2] + p.c3 * I[3];
    };
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
        double h = xs_[i + 1] - xs_[i];
        CellPoly p = cell_poly(h, ys_[i], ys_[i + 1], ms_[i], ms_[i + 1]);
        total += std::exp(-s * xs_[i]) * cell_transform(h, p);
    }
    return total;
}

std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& nodes,
                                            int max_order) {
    // B. Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    const int n = int(nodes.size()) - 1;
    const int m = max_order;
    std::vector<std::vector<std::vector<double>>> delta(
        m + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(n + 1, 0.0)));
    delta[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int nn = 1; nn <= n; ++nn) {
        double c2 = 1.0;
        for (int nu = 0; nu < nn; ++nu) {
            double c3 = nodes[nn] - nodes[nu];
            c2 *= c3;
            for (int k = 0; k <= std::min(nn, m); ++k) {
                delta[k][nn][nu] =
                    ((nodes[nn] - x0) * delta[k][nn - 1][nu] -
                     (k > 0 ? k * delta[k - 1][nn - 1][nu] : 0.0)) /
                    c3;
            }
        }
        for (int k = 0; k <= std::min(nn, m); ++k) {
            delta[k][nn][nn] = (c1 / c2) * ((k > 0 ? k * delta[k - 1][nn - 1][nn - 1] : 0.0) -
                                            (nodes[nn - 1] - x0) * delta[k][nn - 1][nn - 1]);
        }
        c1 = c2;
    }
    std::vector<std::vector<double>> w(m + 1, std::vector<double>(n + 1, 0.0));
    for (int k = 0; k <= m; ++k)
        for (int i = 0; i <= n; ++i) w[k][i] = delta[k][n][i];
    return w;
}

std::vector<double> grid_derivative(const std::vector<double>& xs, const std::vector<double>& ys,
                                    int order, int width) {
    const int n = int(xs.size());
    if (width % 2 == 0) ++width;
    width = std::min(width, n);
    if (width <= order) throw DomainError("grid_derivative: stencil too small for order");
    const int half = width / 2;
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        int lo = std::clamp(i - half, 0, n - width);
        std::vector<double> nodes(xs.begin() + lo, xs.begin() + lo + width);
        auto w = fd_weights(xs[i], nodes, order);
        double acc = 0.0;
        for (int j = 0; j < width; ++j) acc += w[order][j] * ys[lo + j];
        out[i] = acc;
    }
    return out;
}

std::vector<double> log_spaced(double a, double b, int n) {
    std::vector<double> out(n);
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) out[i] = std::exp(la + (lb - la) * i / double(n - 1));
    out.front() = a;
    out.back() = b;
    return out;
}

std::vector<double> lin_spaced(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / double(n - 1);
    out.front() = a;
    out.back() = b;
    return out;
}

std::vector<double> scale_grid_points(double x_min, double split, double x_max, int n_total,
                                      double log_fraction) {
    if (!(x_min > 0 && split > x_min && x_max > split))
        throw DomainError("scale grid: need 0 < x_min < split < x_max");
    int n_log = std::max(8, int(n_total * log_fraction));
    int n_lin = std::max(8, n_total - n_log);
    auto a = log_spaced(x_min, split, n_log);
    auto b = lin_spaced(split, x_max, n_lin + 1);
    a.insert(a.end(), b.begin() + 1, b.end());
    return a;
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

} // namespace snlevy
