#include "snlevy/levy_model.hpp"

#include <algorithm>
#include <cmath>

#include "snlevy/errors.hpp"
#include "snlevy/interpolation.hpp"
#include "snlevy/quadrature.hpp"

namespace snlevy {

LevyModel LevyModel::make(double gamma, double sigma, JumpMeasure jumps, std::string name) {
    if (!(sigma >= 0)) throw DomainError("sigma must be >= 0");
    jumps.validate();
    LevyModel m;
    m.gamma = gamma;
    m.sigma = sigma;
    m.jumps = std::move(jumps);
    m.name = std::move(name);
    bool bv = sigma == 0.0 && std::isfinite(m.jumps.m1);
    m.variation = bv ? Variation::bounded : Variation::unbounded;
    if (bv) {
        m.bv_drift = gamma + m.jumps.m1;
        if (!(m.bv_drift > 0))
            throw DomainError("bounded-variation model needs delta = gamma + int_0^1 x Pi(dx) > 0");
    }
    if (m.sigma == 0.0 && m.jumps.empty())
        throw DomainError("degenerate model: no Gaussian part and no jumps");
    return m;
}

LevyModel LevyModel::make_bv(double delta, JumpMeasure jumps, std::string name) {
    if (!std::isfinite(jumps.m1))
        throw DomainError("make_bv: jump measure has unbounded variation near 0");
    return make(delta - jumps.m1, 0.0, std::move(jumps), std::move(name));
}

namespace model {

double psi(const LevyModel& m, double theta) {
    if (!(theta >= 0)) throw DomainError("psi requires theta >= 0");
    return m.gamma * theta + 0.5 * m.sigma * m.sigma * theta * theta -
           m.jumps.compensated_integral(theta);
}

cplx psi(const LevyModel& m, cplx theta) {
    return m.gamma * theta + 0.5 * m.sigma * m.sigma * theta * theta -
           m.jumps.compensated_integral(theta);
}

std::vector<cplx> psi_batch(const LevyModel& m, cplx theta0, cplx step, int count) {
    std::vector<cplx> out(count);
    if (m.jumps.empty()) {
        for (int j = 0; j < count; ++j) {
            cplx th = theta0 + double(j) * step;
            out[j] = m.gamma * th + 0.5 * m.sigma * m.sigma * th * th;
        }
        return out;
    }
    if (!m.jumps.has_complex_transform())
        throw DomainError("psi_batch: jump measure lacks a complex transform");
    if (m.jumps.kind == JumpKind::finite_activity_atoms) {
        for (int j = 0; j < count; ++j) {
            cplx th = theta0 + double(j) * step;
            out[j] = m.gamma * th + 0.5 * m.sigma * m.sigma * th * th -
                     m.jumps.compensated_integral(th);
        }
        return out;
    }
    auto L = m.jumps.laplace_density_batch(theta0, step, count);
    for (int j = 0; j < count; ++j) {
        cplx th = theta0 + double(j) * step;
        cplx J = m.jumps.mass - L[j] - th * m.jumps.m1;
        out[j] = m.gamma * th + 0.5 * m.sigma * m.sigma * th * th - J;
    }
    return out;
}

double psi_derivative(const LevyModel& m, double theta) {
    double h = 1e-6 * std::max(1.0, std::abs(theta));
    if (theta - h < 0) h = theta / 2;
    if (h == 0.0) return drift_sign(m);
    return (psi(m, theta + h) - psi(m, theta - h)) / (2 * h);
}

double drift_sign(const LevyModel& m) {
    if (!m.jumps.mean_finite) return -std::numeric_limits<double>::infinity();
    double tail_mean = 0.0;
    if (!m.jumps.empty()) {
        if (m.jumps.kind == JumpKind::finite_activity_atoms) {
            for (const auto& a : m.jumps.atoms)
                if (a.location >= 1.0) tail_mean += a.mass * a.location;
        } else if (m.jumps.mean_above_fn) {
            tail_mean = m.jumps.mean_above_fn(1.0);
        } else {
            QuadOptions opt;
            opt.rel_tol = 1e-12;
            auto f = [&](double x) { return x * m.jumps.density_fn(x); };
            double lo = 1.0, v = 0.0;
            for (double b : m.jumps.breakpoints)
                if (b > lo) {
                    v += integrate_or_throw(f, lo, b, opt, "tail mean");
                    lo = b;
                }
            auto t = integrate_to_inf<double>(f, lo, 1.0, opt);
            if (!t.converged) throw QuadratureError("tail mean", t.error);
            tail_mean = v + t.value;
        }
    }
    return m.gamma - tail_mean;
}

namespace {

// Bisection/secant hybrid for increasing psi - q on [lo, hi].
double hybrid_root(const std::function<double(double)>& g, double lo, double hi, double glo,
                   double ghi) {
    for (int it = 0; it < 200; ++it) {
        double mid;
        // secant proposal, fall back to bisection when outside or stagnant
        double denom = ghi - glo;
        mid = (denom != 0.0) ? hi - ghi * (hi - lo) / denom : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (gm == 0.0) return mid;
        if (gm > 0) {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
            glo = gm;
        }
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

double phi_zero(const LevyModel& m) {
    double d = drift_sign(m);
    if (d >= 0) return 0.0;
    // psi dips negative then increases to +inf; find the positive root from
    // the right.
    auto g = [&](double th) { return psi(m, th); };
    double hi = 1.0;
    int guard = 0;
    while (g(hi) <= 0) {
        hi *= 2.0;
        if (++guard > 200) throw RootFindError("Phi(0): bracket expansion failed");
    }
    double lo = hi / 2;
    while (g(lo) > 0) {
        lo /= 2.0;
        if (lo < 1e-14) return 0.0; // psi'(0+) ~ 0 boundary
    }
    return hybrid_root(g, lo, hi, g(lo), g(hi));
}

} // namespace

double phi_inverse(const LevyModel& m, double q) {
    if (!(q >= 0)) throw DomainError("phi_inverse requires q >= 0");
    double p0 = phi_zero(m);
    if (q == 0.0) return p0;
    auto g = [&](double th) { return psi(m, th) - q; };
    double lo = p0;
    double glo = g(lo); // = -q at Phi(0)
    double hi = std::max(1.0, 2.0 * p0);
    int guard = 0;
    double ghi = g(hi);
    while (ghi <= 0) {
        hi *= 2.0;
        ghi = g(hi);
        if (++guard > 200)
            throw RootFindError("Phi(q): psi grows too slowly for bracket expansion");
    }
    return hybrid_root(g, lo, hi, glo, ghi);
}

double pi_tail(const LevyModel& m, double x) {
    if (!(x > 0)) throw DomainError("pi_tail requires x > 0");
    return m.jumps.tail(x);
}

namespace {

// e^{beta x} int_x^inf e^{-beta z} h(z) dz by adaptive quadrature with
// exponential-tail truncation; h non-increasing.
double tilted_tail_integral(const std::function<double(double)>& h, double beta, double x,
                            const std::vector<double>& splits) {
    QuadOptions opt;
    opt.rel_tol = 1e-11;
    auto f = [&](double z) { return std::exp(-beta * (z - x)) * h(z); };
    double v = 0.0;
    double lo = x;
    for (double b : splits)
        if (b > lo) {
            v += integrate_or_throw(f, lo, b, opt, "tilted tail integral");
            lo = b;
        }
    double span = beta > 0 ? std::max(1.0, 2.0 / beta) : std::max(1.0, x);
    auto t = integrate_to_inf<double>(f, lo, span, opt);
    if (!t.converged) throw QuadratureError("tilted tail integral", t.error);
    return v + t.value;
}

} // namespace

double upsilon_tail(const LevyModel& m, double x) {
    if (!(x > 0)) throw DomainError("upsilon_tail requires x > 0");
    if (m.jumps.empty()) return 0.0;
    double p0 = phi_zero(m);
    auto pibar = [&](double z) { return m.jumps.tail(z); };
    return tilted_tail_integral(pibar, p0, x, m.jumps.breakpoints);
}

double ladder_exponent(const LevyModel& m, double q, double theta) {
    if (!(theta >= 0) || !(q >= 0)) throw DomainError("ladder_exponent requires q, theta >= 0");
    double pq = phi_inverse(m, q);
    if (std::abs(theta - pq) < 1e-6) {
        // removable singularity: (q - psi)/(Phi(q) - theta) -> psi'(Phi(q))
        double h = 1e-5 * std::max(1.0, pq);
        if (pq - h < 0) h = pq > 0 ? pq / 2 : 1e-7;
        return (psi(m, pq + h) - psi(m, std::max(pq - h, 0.0))) /
               (pq + h - std::max(pq - h, 0.0));
    }
    return (q - psi(m, theta)) / (pq - theta);
}

UpsilonQ upsilon_q_at(const LevyModel& m, double phi_q, double x) {
    if (m.jumps.kind != JumpKind::density)
        throw DomainError("upsilon_q requires a jump density");
    if (!(x > 0)) throw DomainError("upsilon_q requires x > 0");
    UpsilonQ out;
    auto pibar = [&](double z) { return m.jumps.tail(z); };
    out.tail = tilted_tail_integral(pibar, phi_q, x, m.jumps.breakpoints);
    auto dens = [&](double z) { return m.jumps.density_fn(z); };
    out.density = tilted_tail_integral(dens, phi_q, x, m.jumps.breakpoints);
    return out;
}

UpsilonQ upsilon_q(const LevyModel& m, double q, double x) {
    return upsilon_q_at(m, phi_inverse(m, q), x);
}

LadderExponent ladder(const LevyModel& m, double q) {
    LadderExponent L;
    L.q = q;
    double pq = phi_inverse(m, q);
    if (pq > 0)
        L.killing = q / pq;
    else
        L.killing = drift_sign(m); // limit q/Phi(q) as q->0 with Phi(0)=0
    L.drift = 0.5 * m.sigma * m.sigma;
    LevyModel copy = m;
    L.tail_q = [copy, pq](double x) { return upsilon_q_at(copy, pq, x).tail; };
    L.density_q = [copy, pq](double x) { return upsilon_q_at(copy, pq, x).density; };
    return L;
}

ShapeReport log_convexity_check(const std::function<double(double)>& f, double a, double b, int n,
                                double tol) {
    if (!(a > 0 && b > a)) throw DomainError("log_convexity_check: need 0 < a < b");
    auto xs = log_spaced(a, b, n);
    std::vector<double> lf(n);
    for (int i = 0; i < n; ++i) {
        double v = f(xs[i]);
        if (!(v > 0)) throw DomainError("log_convexity_check: f must be positive on the grid");
        lf[i] = std::log(v);
    }
    ShapeReport rep;
    rep.property = ShapeReport::Property::log_convex;
    rep.lo = a;
    rep.hi = b;
    rep.worst_violation = -tol;
    rep.location = a;
    for (int i = 1; i + 1 < n; ++i) {
        double lam = (xs[i + 1] - xs[i]) / (xs[i + 1] - xs[i - 1]);
        double chord = lam * lf[i - 1] + (1.0 - lam) * lf[i + 1];
        double defect = (lf[i] - chord) - tol; // convexity of log f: node below chord
        if (defect > rep.worst_violation) {
            rep.worst_violation = defect;
            rep.location = xs[i];
        }
    }
    rep.pass = rep.worst_violation <= 0.0;
    return rep;
}

ShapeReport complete_monotonicity_probe(const std::function<double(double)>& f, double a, double b,
                                        int order, int samples) {
    if (!(order >= 2 && order <= 8)) throw DomainError("cm probe: order must be in [2, 8]");
    if (!(a > 0 && b > a)) throw DomainError("cm probe: need 0 < a < b");
    auto pts = log_spaced(a, b, samples);
    ShapeReport rep;
    rep.property = ShapeReport::Property::cm_probe;
    rep.lo = a;
    rep.hi = b;
    rep.worst_violation = -1.0;
    rep.location = a;
    int bad_order = 0;
    // Minimal-width centered stencils keep the weight magnitudes (and with
    // them the roundoff amplification ~ eps * sum|w|) under control.
    int width = order + 3;
    if (width % 2 == 0) ++width;
    const int half = width / 2;
    for (double x : pts) {
        double h = std::min(0.12 * x, (b - a) / 30.0);
        if (h < 1e-8 * x) throw NumericError("cm probe: step-size underflow");
        std::vector<double> nodes(width), vals(width);
        for (int j = 0; j < width; ++j) nodes[j] = x + (j - half) * h;
        while (nodes.front() <= 0) {
            h *= 0.5;
            if (h < 1e-8 * x) throw NumericError("cm probe: step-size underflow");
            for (int j = 0; j < width; ++j) nodes[j] = x + (j - half) * h;
        }
        double maxval = 0.0;
        for (int j = 0; j < width; ++j) {
            vals[j] = f(nodes[j]);
            maxval = std::max(maxval, std::abs(vals[j]));
        }
        auto w = fd_weights(x, nodes, order);
        for (int k = 1; k <= order; ++k) {
            double d = 0.0, sumw = 0.0;
            for (int j = 0; j < width; ++j) {
                d += w[k][j] * vals[j];
                sumw += std::abs(w[k][j]);
            }
            double signed_val = (k % 2 == 0) ? d : -d;
            // anything below the stencil's roundoff floor is indistinguishable
            // from zero
            double noise = 1.1e-16 * sumw * maxval + 1e-300;
            double threshold = 100.0 * noise;
            double defect = (-signed_val - threshold) / std::max(std::abs(d), threshold);
            if (defect > rep.worst_violation) {
                rep.worst_violation = defect;
                rep.location = x;
                bad_order = k;
            }
        }
    }
    rep.pass = rep.worst_violation <= 0.0;
    if (!rep.pass) rep.note = "sign_violation_order=" + std::to_string(bad_order);
    return rep;
}

} // namespace model
} // namespace snlevy
