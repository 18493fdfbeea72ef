#include "snlevy/scale_fn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "snlevy/errors.hpp"
#include "snlevy/quadrature.hpp"
#include "snlevy/shape_analysis.hpp"

namespace snlevy {
namespace scale {

void ScaleGrid::build_interpolants() {
    interp_w = PchipInterpolant(xs, w);
    interp_w1 = PchipInterpolant(xs, w1);
    interp_w2 = PchipInterpolant(xs, w2);
    interp_uq = PchipInterpolant(xs, u_q);
}

ScaleGrid::Eval ScaleGrid::evaluate(double x) const {
    Eval e;
    if (x < 0) {
        e.w = 0.0;
        e.w1 = 0.0;
        e.defined = false;
        return e;
    }
    if (x > xs.back() * (1.0 + 1e-12))
        throw RangeError("scale grid evaluation beyond x_max");
    x = std::min(x, xs.back());
    if (x < xs.front()) {
        // between 0 and the first grid node: W(0+) is known analytically
        e.w = w0 + (w.front() - w0) * (x / xs.front());
        e.w1 = w1.front();
        return e;
    }
    e.w = interp_w.eval(x);
    e.w1 = interp_w1.eval(x);
    return e;
}

double ScaleGrid::eval_w1(double x) const {
    if (x < 0) throw DomainError("W' undefined for x < 0");
    return evaluate(x).w1;
}

void ScaleGrid::write_csv(std::ostream& os) const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "# snlevy-scale q=%.17g phi_q=%.17g method=%s n=%zu w0=%.17g\n",
                  q, phi_q, method.c_str(), xs.size(), w0);
    os << buf << "x,W,W1,W2,u_q\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", xs[i], w[i], w1[i],
                      w2[i], u_q[i]);
        os << buf;
    }
}

ScaleGrid compute_scale(const LevyModel& m, double q, const GridSpec& spec,
                        const EulerOptions& opt, int n_threads) {
    if (!(q >= 0)) throw DomainError("compute_scale requires q >= 0");
    if (!m.jumps.has_complex_transform())
        throw DomainError("compute_scale: jump measure lacks a complex transform");
    const double pq = model::phi_inverse(m, q);

    ScaleGrid g;
    g.q = q;
    g.phi_q = pq;
    g.variation = m.variation;
    g.delta = m.variation == Variation::bounded ? m.bv_drift : 0.0;
    g.w0 = m.variation == Variation::bounded ? 1.0 / m.bv_drift : 0.0;
    const double dstar = g.w0;
    g.xs = scale_grid_points(spec.x_min, spec.split, spec.x_max, spec.n, spec.log_fraction);

    // One batched psi evaluation per grid point feeds both inversions:
    // F0 = 1/psi_q and F1 = s/psi_q - W_tilt(0+) share the contour samples.
    const std::size_t npts = g.xs.size();
    g.w_tilt.resize(npts);
    g.w1_tilt.resize(npts);
    const int K = opt.terms + opt.euler + 1;
    auto invert_at = [&](std::size_t i) {
        const double t = g.xs[i];
        const double a = opt.a_param / (2.0 * t);
        const cplx s0(a, 0.0);
        const cplx step(0.0, M_PI / t);
        auto psis = model::psi_batch(m, s0 + pq, step, K);
        std::vector<double> f0(K), f1(K);
        for (int k = 0; k < K; ++k) {
            cplx s = s0 + double(k) * step;
            cplx denom = psis[k] - q;
            f0[k] = (1.0 / denom).real();
            f1[k] = (s / denom).real() - dstar; // constant cancels exactly in the
                                                // Euler average but keeps the
                                                // partial sums small
        }
        g.w_tilt[i] = euler_combine(f0, t, opt);
        g.w1_tilt[i] = euler_combine(f1, t, opt);
    };
    int nt = resolve_thread_count(n_threads);
    if (nt <= 1) {
        for (std::size_t i = 0; i < npts; ++i) invert_at(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (npts + nt - 1) / nt;
        for (int w = 0; w < nt; ++w) {
            std::size_t lo = w * chunk, hi = std::min(npts, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi]() {
                for (std::size_t i = lo; i < hi; ++i) invert_at(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Inversion sanity: the tilted scale function is non-negative and
    // non-decreasing.  Small sub-tolerance wiggles are clamped; anything
    // larger is an inversion failure.
    double scale_mag = 0.0;
    for (double v : g.w_tilt) scale_mag = std::max(scale_mag, std::abs(v));
    const double osc_tol = 1e-7 * std::max(scale_mag, 1e-300);
    for (std::size_t i = 0; i < g.xs.size(); ++i) {
        if (g.w_tilt[i] < -osc_tol) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "inversion oscillation: W_tilt(%.6g) = %.6g < 0 (scale %.3g)",
                          g.xs[i], g.w_tilt[i], scale_mag);
            throw InversionError(msg);
        }
        if (i > 0 && g.w_tilt[i] < g.w_tilt[i - 1] - osc_tol) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "inversion oscillation: W_tilt not monotone at x=%.6g (drop %.3g)",
                          g.xs[i], g.w_tilt[i - 1] - g.w_tilt[i]);
            throw InversionError(msg);
        }
        if (g.w_tilt[i] < 0) g.w_tilt[i] = 0.0;
        if (i > 0 && g.w_tilt[i] < g.w_tilt[i - 1]) g.w_tilt[i] = g.w_tilt[i - 1];
    }

    const std::size_t n = g.xs.size();
    g.w.resize(n);
    g.w1.resize(n);
    g.u_q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ex = std::exp(pq * g.xs[i]);
        g.w[i] = ex * g.w_tilt[i];
        g.u_q[i] = ex * g.w1_tilt[i];
        g.w1[i] = pq * g.w[i] + g.u_q[i]; // W' = Phi(q) W + u_q
    }
    // W'' from one numerical differentiation of the (smooth, bounded) tilted
    // derivative; scaled back analytically.
    auto wtilt2 = grid_derivative(g.xs, g.w1_tilt, 1, 5);
    g.w2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ex = std::exp(pq * g.xs[i]);
        g.w2[i] = ex * (pq * pq * g.w_tilt[i] + 2.0 * pq * g.w1_tilt[i] + wtilt2[i]);
    }
    // flag cells where w2 jumps an order of magnitude against its neighbours
    for (std::size_t i = 2; i + 2 < n; ++i) {
        double jump = std::abs(g.w2[i + 1] - g.w2[i]);
        double nb = 0.5 * (std::abs(g.w2[i] - g.w2[i - 1]) + std::abs(g.w2[i + 2] - g.w2[i + 1]));
        if (jump > 10.0 * nb && jump > 1e-6 * std::abs(g.w2[i])) g.kink_indices.push_back(i);
    }
    char mbuf[64];
    std::snprintf(mbuf, sizeof mbuf, "euler%dE%dA%g", opt.terms, opt.euler, opt.a_param);
    g.method = mbuf;
    g.build_interpolants();
    return g;
}

std::vector<double> compute_scale_direct(const LevyModel& m, double q,
                                         const std::vector<double>& xs, double margin,
                                         const EulerOptions& opt, int n_threads) {
    const double pq = model::phi_inverse(m, q);
    const double shift = pq + margin;
    const LevyModel* mp = &m;
    LaplaceTransform F = [mp, shift, q](cplx s) {
        return 1.0 / (model::psi(*mp, s + shift) - q);
    };
    auto vals = euler_invert_grid(F, xs, opt, n_threads);
    for (std::size_t i = 0; i < xs.size(); ++i) vals[i] *= std::exp(shift * xs[i]);
    return vals;
}

std::vector<double> talbot_scale(const LevyModel& m, double q, const std::vector<double>& xs,
                                 int M) {
    if (m.jumps.family == "piecewise_power")
        throw DomainError("talbot_scale: piecewise power transform is not analytic left of 0");
    const double pq = model::phi_inverse(m, q);
    const LevyModel* mp = &m;
    LaplaceTransform F = [mp, pq, q](cplx s) { return 1.0 / (model::psi(*mp, s + pq) - q); };
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = std::exp(pq * xs[i]) * talbot_invert(F, xs[i], M);
    return out;
}

ResidualReport laplace_residual(const ScaleGrid& g, const LevyModel& m, double q, double theta,
                                double margin) {
    if (!(theta > g.phi_q + margin))
        throw PreconditionError("laplace_residual: theta must exceed Phi(q) + margin");
    double I = g.interp_w.laplace(cplx(theta, 0.0)).real();
    // head piece [0, x_min] with the analytic W(0+)
    const double x0 = g.xs.front();
    const double e0 = std::exp(-theta * x0);
    I += g.w0 * (1.0 - e0) / theta +
         (g.w.front() - g.w0) / x0 * ((1.0 - e0) / theta - x0 * e0) / theta;
    const double pt = model::psi(m, theta);
    ResidualReport r;
    r.residual = std::abs(I * (pt - q) - 1.0);
    r.truncation_bound = (pt - q) * g.w_tilt.back() *
                         std::exp(-(theta - g.phi_q) * g.xs.back()) / (theta - g.phi_q);
    return r;
}

namespace {

// Laplace transform of a tabulated candidate W with linear head (down to 0)
// and linear tail extension (concave W lies below its tangent, so the
// extension bias is one-sided and small for theta x_max >> 1).
double candidate_laplace(const PchipInterpolant& pw, double theta) {
    double I = pw.laplace(cplx(theta, 0.0)).real();
    const double x0 = pw.x_min();
    const double w_at0 = pw.ys().front();
    double head0 = std::max(0.0, w_at0 - pw.derivative(x0) * x0);
    const double e0 = std::exp(-theta * x0);
    I += head0 * (1.0 - e0) / theta +
         (w_at0 - head0) / x0 * ((1.0 - e0) / theta - x0 * e0) / theta;
    const double xm = pw.x_max();
    const double w_end = pw.ys().back();
    const double w1_end = std::max(0.0, pw.derivative(xm));
    I += std::exp(-theta * xm) * (w_end / theta + w1_end / (theta * theta));
    return I;
}

} // namespace

RecoverResult recover_exponent(const CandidateScale& cand, const std::vector<double>& thetas) {
    const auto& xs = cand.xs;
    if (xs.size() < 16) throw PreconditionError("recover_exponent: candidate grid too small");
    RecoverResult res;
    res.thetas = thetas;

    auto require = [&](const ShapeReport& rep, const char* what) {
        res.hypothesis_reports.push_back(rep);
        if (!rep.pass)
            throw PreconditionError(std::string("recover_exponent: candidate violates ") + what);
    };
    const double lo = xs.front(), hi = xs.back();
    require(shape::convexity_report(xs, cand.w, lo, hi, ShapeReport::Property::concave),
            "W concave");
    require(shape::convexity_report(xs, cand.w, lo, hi, ShapeReport::Property::non_decreasing),
            "W non-decreasing");
    require(shape::convexity_report(xs, cand.w1, lo, hi, ShapeReport::Property::non_increasing),
            "W' non-increasing");
    // -W'': degenerate (identically ~0) counts as vacuously admissible
    double w2mag = 0.0, w1mag = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        w2mag = std::max(w2mag, std::abs(cand.w2[i]));
        w1mag = std::max(w1mag, std::abs(cand.w1[i]));
    }
    if (w2mag > 1e-10 * std::max(w1mag, 1e-300)) {
        std::vector<double> neg_w2(cand.w2.size());
        for (std::size_t i = 0; i < neg_w2.size(); ++i) neg_w2[i] = -cand.w2[i];
        require(
            shape::convexity_report(xs, neg_w2, lo, hi, ShapeReport::Property::non_increasing),
            "-W'' non-increasing");
        bool positive = true;
        for (double v : neg_w2)
            if (!(v > 0)) positive = false;
        if (positive) {
            // nodal log-convexity (no resampling error at the grid ends)
            std::vector<double> logv(neg_w2.size());
            for (std::size_t i = 0; i < neg_w2.size(); ++i) logv[i] = std::log(neg_w2[i]);
            auto rep = shape::convexity_report(xs, logv, lo, hi, ShapeReport::Property::convex);
            rep.property = ShapeReport::Property::log_convex;
            require(rep, "-W'' log convex");
        }
    }
    // lim_{x->0} x W'(x) < inf: the sampled products must not grow as x -> 0
    {
        double first = xs[0] * cand.w1[0];
        double later = xs[8] * cand.w1[8];
        ShapeReport rep;
        rep.property = ShapeReport::Property::non_increasing;
        rep.lo = xs[0];
        rep.hi = xs[8];
        rep.note = "x*W'(x) bounded near 0";
        rep.worst_violation = first - 4.0 * std::max(later, 1e-300);
        rep.pass = rep.worst_violation <= 0.0 && std::isfinite(first);
        rep.location = xs[0];
        require(rep, "lim x W'(x) < inf");
    }

    PchipInterpolant pw(xs, cand.w);
    res.psi_hat.reserve(thetas.size());
    for (double th : thetas) {
        if (!(th > 0)) throw DomainError("recover_exponent: theta must be > 0");
        res.psi_hat.push_back(1.0 / candidate_laplace(pw, th));
    }
    // validity probe of the recovered exponent
    auto psi_hat = [&](double th) { return 1.0 / candidate_laplace(pw, th); };
    bool ok = true;
    std::string note;
    if (!(psi_hat(0.02) < 0.1 * psi_hat(0.5))) {
        ok = false;
        note = "psi_hat(0+) does not vanish;";
    }
    double th_hi = 5.0;
    for (double th : thetas) th_hi = std::max(th_hi, th);
    auto ts = lin_spaced(0.1, th_hi, 40);
    std::vector<double> vals(ts.size()), phis(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        vals[i] = psi_hat(ts[i]);
        phis[i] = vals[i] / ts[i];
    }
    auto cvx = shape::convexity_report(ts, vals, ts.front(), ts.back(),
                                       ShapeReport::Property::convex, 1e-6);
    auto ccv = shape::convexity_report(ts, phis, ts.front(), ts.back(),
                                       ShapeReport::Property::concave, 1e-6);
    if (!cvx.pass) {
        ok = false;
        note += "psi_hat not convex;";
    }
    if (!ccv.pass) {
        ok = false;
        note += "psi_hat/theta not concave (Bernstein probe);";
    }
    res.exponent_valid = ok;
    res.validity_note = note;
    return res;
}

} // namespace scale
} // namespace snlevy
