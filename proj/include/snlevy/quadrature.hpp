#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "snlevy/errors.hpp"

namespace snlevy {

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_intervals = 4000;
    // Tail truncation: stop extending a semi-infinite integral once the
    // integrand has dropped below tail_cut * (peak integrand magnitude).
    double tail_cut = 1e-16;
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;   // error estimate (absolute)
    long evals = 0;
    bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1,1] (QUADPACK dqk15 values).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class T, class F>
void gk15_panel(const F& f, double a, double b, T& value, double& err, double& f_scale) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fc = f(c);
    T resk = gk15_wk[7] * fc;
    T resg = gk15_wg[3] * fc;
    double amax = std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk15_x[j];
        T f1 = f(c - dx);
        T f2 = f(c + dx);
        resk += gk15_wk[j] * (f1 + f2);
        if (j % 2 == 1) resg += gk15_wg[j / 2] * (f1 + f2);
        amax = std::max(amax, std::max(std::abs(f1), std::abs(f2)));
    }
    value = resk * h;
    // QUADPACK-style rescaled error estimate.
    double raw = std::abs(resk - resg) * std::abs(h);
    err = raw;
    double scale = std::abs(value);
    if (scale > 0.0 && raw > 0.0) {
        double r = std::pow(200.0 * raw / std::max(scale, 1e-300), 1.5);
        err = std::min(raw, scale * std::max(r, 1e-17));
        err = std::max(err, std::abs(value) * 5e-16);
    }
    f_scale = amax;
}

} // namespace detail

// Adaptive Gauss-Kronrod integration on a finite interval.  Worst-error
// interval is bisected until the global estimate meets tolerance.
template <class T, class F>
QuadResult<T> integrate(const F& f, double a, double b, const QuadOptions& opt = {}) {
    QuadResult<T> res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    struct Seg {
        double a, b, err;
        T val;
    };
    std::vector<Seg> segs;
    segs.reserve(64);
    T v;
    double e, fs;
    detail::gk15_panel<T>(f, a, b, v, e, fs);
    res.evals += 15;
    segs.push_back({a, b, e, v});
    for (;;) {
        T total{};
        double toterr = 0.0;
        int worst = -1;
        double worst_err = -1.0;
        for (int i = 0; i < (int)segs.size(); ++i) {
            total += segs[i].val;
            toterr += segs[i].err;
            if (segs[i].err > worst_err) {
                worst_err = segs[i].err;
                worst = i;
            }
        }
        res.value = total;
        res.error = toterr;
        if (toterr <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
            res.converged = true;
            return res;
        }
        if ((int)segs.size() >= opt.max_intervals) {
            res.converged = false;
            return res;
        }
        Seg s = segs[worst];
        double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b)) {  // interval exhausted at machine precision
            segs[worst].err = 0.0;
            continue;
        }
        T v1, v2;
        double e1, e2;
        detail::gk15_panel<T>(f, s.a, m, v1, e1, fs);
        detail::gk15_panel<T>(f, m, s.b, v2, e2, fs);
        res.evals += 30;
        segs[worst] = {s.a, m, e1, v1};
        segs.push_back({m, s.b, e2, v2});
    }
}

template <class F>
QuadResult<double> integrate_real(const F& f, double a, double b, const QuadOptions& opt = {}) {
    return integrate<double>(f, a, b, opt);
}

// Semi-infinite integral over [a, inf).  Expands in geometric blocks until the
// block contribution and the integrand magnitude are negligible relative to the
// running peak.  `scale_hint` sets the width of the first block.
template <class T, class F>
QuadResult<T> integrate_to_inf(const F& f, double a, double scale_hint = 1.0,
                               const QuadOptions& opt = {}) {
    QuadResult<T> res;
    double width = std::max(scale_hint, 1e-8);
    double lo = a;
    double peak = 0.0;
    double total_mag = 0.0;
    for (int block = 0; block < 220; ++block) {
        double hi = lo + width;
        T v;
        double e, fs;
        detail::gk15_panel<T>(f, lo, hi, v, e, fs);
        // refine the block adaptively if needed
        if (e > std::max(opt.abs_tol, opt.rel_tol * std::max(std::abs(v), total_mag))) {
            auto sub = integrate<T>(f, lo, hi, opt);
            v = sub.value;
            e = sub.error;
            res.evals += sub.evals;
        } else {
            res.evals += 15;
        }
        res.value += v;
        res.error += e;
        peak = std::max(peak, fs);
        total_mag = std::max(total_mag, std::abs(res.value));
        lo = hi;
        width *= 2.0;
        bool integrand_dead = fs <= opt.tail_cut * std::max(peak, 1e-300);
        bool block_dead = std::abs(v) <= std::max(opt.abs_tol, opt.rel_tol * total_mag) * 0.5;
        if (integrand_dead && block_dead) {
            res.converged = true;
            return res;
        }
    }
    res.converged = false;
    return res;
}

// Throwing wrappers used where the spec demands an error channel.
template <class F>
double integrate_or_throw(const F& f, double a, double b, const QuadOptions& opt = {},
                          const char* what = "quadrature failed to converge") {
    auto r = integrate<double>(f, a, b, opt);
    if (!r.converged) throw QuadratureError(what, r.error);
    return r.value;
}

template <class F>
double integrate_to_inf_or_throw(const F& f, double a, double scale_hint = 1.0,
                                 const QuadOptions& opt = {},
                                 const char* what = "tail quadrature failed to converge") {
    auto r = integrate_to_inf<double>(f, a, scale_hint, opt);
    if (!r.converged) throw QuadratureError(what, r.error);
    return r.value;
}

} // namespace snlevy
