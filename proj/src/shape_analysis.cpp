#include "snlevy/shape_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "snlevy/errors.hpp"
#include "snlevy/laplace_inversion.hpp"
#include "snlevy/quadrature.hpp"

namespace snlevy {
namespace shape {

ShapeReport convexity_report(const std::vector<double>& xs, const std::vector<double>& ys,
                             double lo, double hi, ShapeReport::Property property, double tol,
                             bool strict, double tol_strict) {
    ShapeReport rep;
    rep.property = property;
    rep.lo = lo;
    rep.hi = hi;
    rep.location = lo;
    std::size_t i0 = 0, i1 = xs.size();
    while (i0 < xs.size() && xs[i0] < lo) ++i0;
    while (i1 > 0 && xs[i1 - 1] > hi) --i1;
    if (i1 < i0 + 8) throw DomainError("convexity_report: need >= 8 points in interval");
    double mag = 0.0;
    for (std::size_t i = i0; i < i1; ++i) mag = std::max(mag, std::abs(ys[i]));
    const double floor = 1e-12 * mag + 1e-300;
    rep.worst_violation = -std::max(tol, tol_strict);
    using P = ShapeReport::Property;
    for (std::size_t i = i0 + 1; i + 1 < i1; ++i) {
        double scale =
            std::max({std::abs(ys[i - 1]), std::abs(ys[i]), std::abs(ys[i + 1]), floor});
        double defect = 0.0;
        if (property == P::convex || property == P::concave) {
            double lam = (xs[i + 1] - xs[i]) / (xs[i + 1] - xs[i - 1]);
            double excess = lam * ys[i - 1] + (1.0 - lam) * ys[i + 1] - ys[i]; // >= 0 iff convex
            double rel = excess / scale;
            if (property == P::convex)
                defect = strict ? (tol_strict - rel) : (-rel - tol);
            else
                defect = strict ? (tol_strict + rel) : (rel - tol);
        } else if (property == P::non_increasing) {
            defect = (ys[i + 1] - ys[i]) / scale - tol;
        } else if (property == P::non_decreasing) {
            defect = (ys[i] - ys[i + 1]) / scale - tol;
        } else {
            throw DomainError("convexity_report: unsupported property");
        }
        if (defect > rep.worst_violation) {
            rep.worst_violation = defect;
            rep.location = xs[i];
        }
    }
    // monotonicity also checks the first pair
    if (property == P::non_increasing || property == P::non_decreasing) {
        double scale = std::max({std::abs(ys[i0]), std::abs(ys[i0 + 1]), floor});
        double defect = (property == P::non_increasing ? ys[i0 + 1] - ys[i0]
                                                       : ys[i0] - ys[i0 + 1]) /
                            scale -
                        tol;
        if (defect > rep.worst_violation) {
            rep.worst_violation = defect;
            rep.location = xs[i0];
        }
    }
    rep.pass = rep.worst_violation <= 0.0;
    return rep;
}

AStar find_a_star(const scale::ScaleGrid& g) {
    const auto& xs = g.xs;
    const auto& w1 = g.w1;
    std::size_t imin = 0;
    for (std::size_t i = 1; i < w1.size(); ++i)
        if (w1[i] < w1[imin]) imin = i;
    const double w1min_grid = w1[imin];
    const double span = std::abs(w1.back() - w1min_grid);
    if (!(span >= 0.1 * std::max(std::abs(w1min_grid), 1e-12)) || imin + 1 == w1.size())
        throw NumericError("a* not localized: W' at x_max does not exceed the minimum by 10%");

    const double tie = 1e-9 * std::max(std::abs(w1min_grid), 1e-300);
    std::size_t left = imin, right = imin;
    for (std::size_t i = 0; i < w1.size(); ++i) {
        if (std::abs(w1[i] - w1min_grid) <= tie) {
            left = std::min(left, i);
            right = std::max(right, i);
        }
    }

    AStar a;
    if (right > left) {
        // genuine plateau at grid resolution: the sup definition picks the
        // right edge
        a.plateau_left = xs[left];
        a.plateau_right = xs[right];
        a.value = xs[right];
        a.w1_min = w1min_grid;
        return a;
    }
    if (imin == 0) {
        // minimum at the left endpoint: W' increases from the start, a* = 0
        a.value = 0.0;
        a.plateau_left = a.plateau_right = 0.0;
        a.w1_min = w1.front();
        return a;
    }
    // Unique interior grid minimum: golden-section on a local polynomial
    // through the five nearest nodes.  (The monotone pchip interpolant clamps
    // slopes to zero around an extremum, which would bias the minimizer by
    // O(h); an unconstrained local fit does not.)
    std::size_t lo_i = imin >= 2 ? imin - 2 : 0;
    lo_i = std::min(lo_i, xs.size() - 5);
    std::vector<double> nx(xs.begin() + lo_i, xs.begin() + lo_i + 5);
    std::vector<double> ny(w1.begin() + lo_i, w1.begin() + lo_i + 5);
    auto local = [&](double x) {
        // Lagrange polynomial through the 5 nodes
        double s = 0.0;
        for (int j = 0; j < 5; ++j) {
            double lj = 1.0;
            for (int k = 0; k < 5; ++k)
                if (k != j) lj *= (x - nx[k]) / (nx[j] - nx[k]);
            s += ny[j] * lj;
        }
        return s;
    };
    double lo = xs[imin - 1];
    double hi = xs[std::min(imin + 1, xs.size() - 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = local(c), fd = local(d);
    for (int it = 0; it < 120 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = local(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = local(d);
        }
    }
    a.value = 0.5 * (lo + hi);
    a.w1_min = local(a.value);
    a.plateau_left = a.plateau_right = a.value;
    return a;
}

SmoothnessClass smoothness_class(const LevyModel& m) {
    SmoothnessClass sc;
    if (m.jumps.kind == JumpKind::finite_activity_atoms) {
        sc.tail_continuous = m.jumps.atoms.empty();
        if (!sc.tail_continuous) {
            double first = m.jumps.atoms.front().location;
            for (const auto& a : m.jumps.atoms) first = std::min(first, a.location);
            sc.atom_location = first;
        }
        if (m.variation == Variation::bounded) {
            sc.level = sc.tail_continuous ? SmoothLevel::C1 : SmoothLevel::not_C1;
            sc.reason = sc.tail_continuous ? "bounded variation, continuous tail"
                                           : "bounded variation, atom in the jump measure";
        } else {
            sc.level = SmoothLevel::unknown;
            sc.reason = "atomic measure with unbounded variation";
        }
        return sc;
    }
    // density-represented measures are treated as atomless
    sc.tail_continuous = true;
    bool logcx = false;
    if (m.jumps.empty()) {
        logcx = true; // no jumps: vacuously log convex
    } else {
        try {
            logcx = model::log_convexity_check([&](double x) { return m.jumps.density_fn(x); },
                                               1e-2, 50.0, 256)
                        .pass;
        } catch (const NumericError&) {
            logcx = false;
        }
    }
    if (m.sigma > 0 && logcx) {
        sc.level = SmoothLevel::C2;
        sc.reason = "Gaussian part with log-convex jump density";
    } else if (m.variation == Variation::bounded) {
        sc.level = SmoothLevel::C1;
        sc.reason = "bounded variation, continuous tail";
    } else if (m.sigma == 0 && logcx) {
        sc.level = SmoothLevel::C1;
        sc.reason = "unbounded variation, sigma = 0, log-convex density (W' = Phi W + u_q)";
    } else {
        sc.level = SmoothLevel::unknown;
        sc.reason = "no applicable criterion";
    }
    return sc;
}

ConjugateTail conjugate_tail(const scale::ScaleGrid& g, const ShapeReport& cert) {
    if (std::abs(g.q) > 0 || std::abs(g.phi_q) > 1e-10)
        throw PreconditionError("conjugate_tail requires the 0-scale grid of a Phi(0)=0 model");
    if (!(cert.property == ShapeReport::Property::log_convex && cert.pass))
        throw PreconditionError("conjugate_tail: Pibar log-convexity certificate missing/failed");
    ConjugateTail ct;
    ct.xs = g.xs;
    ct.w1_at_xmax = g.w1.back();
    ct.tail.resize(g.xs.size());
    for (std::size_t i = 0; i < g.xs.size(); ++i) ct.tail[i] = g.w1[i] - ct.w1_at_xmax;
    // Violations are measured against the W' scale: a tail that vanishes
    // identically (e.g. no jumps, W' constant) is all inversion noise and
    // must not fail its own sign checks.
    const double tol = 1e-7;
    double scale = std::abs(ct.w1_at_xmax);
    for (double v : ct.tail) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1e-300);
    ShapeReport ni;
    ni.property = ShapeReport::Property::non_increasing;
    ni.lo = ct.xs.front();
    ni.hi = ct.xs.back();
    ni.worst_violation = -tol;
    ni.location = ct.xs.front();
    for (std::size_t i = 0; i + 1 < ct.tail.size(); ++i) {
        double defect = (ct.tail[i + 1] - ct.tail[i]) / scale - tol;
        if (defect > ni.worst_violation) {
            ni.worst_violation = defect;
            ni.location = ct.xs[i];
        }
    }
    ni.pass = ni.worst_violation <= 0.0;
    ct.non_increasing = ni;
    ShapeReport nn;
    nn.property = ShapeReport::Property::non_decreasing; // used as ">= 0" report
    nn.lo = ct.xs.front();
    nn.hi = ct.xs.back();
    nn.note = "tail >= 0";
    nn.worst_violation = -tol;
    nn.location = ct.xs.front();
    for (std::size_t i = 0; i < ct.tail.size(); ++i) {
        double defect = -ct.tail[i] / scale - tol;
        if (defect > nn.worst_violation) {
            nn.worst_violation = defect;
            nn.location = ct.xs[i];
        }
    }
    nn.pass = nn.worst_violation <= 0.0;
    ct.non_negative = nn;
    return ct;
}

Corollary23Result corollary23_check(const std::vector<double>& xs, const std::vector<double>& u,
                                    const std::vector<double>& u1) {
    if (xs.size() != u.size() || xs.size() != u1.size() || xs.size() < 16)
        throw DomainError("corollary23_check: need matching grids with >= 16 points");
    Corollary23Result out;
    auto add = [&](ShapeReport rep) {
        out.hypothesis_reports.push_back(rep);
        return out.hypothesis_reports.back().pass;
    };
    bool ok = true;
    ok &= add(convexity_report(xs, u, xs.front(), xs.back(),
                               ShapeReport::Property::non_increasing, 1e-7));
    std::vector<double> neg_u1(u1.size());
    for (std::size_t i = 0; i < u1.size(); ++i) neg_u1[i] = -u1[i];
    ok &= add(convexity_report(xs, neg_u1, xs.front(), xs.back(),
                               ShapeReport::Property::non_increasing, 1e-7));
    bool positive = std::all_of(neg_u1.begin(), neg_u1.end(), [](double v) { return v > 0; });
    if (positive) {
        std::vector<double> logv(neg_u1.size());
        for (std::size_t i = 0; i < neg_u1.size(); ++i) logv[i] = std::log(neg_u1[i]);
        auto rep = convexity_report(xs, logv, xs.front(), xs.back(),
                                    ShapeReport::Property::convex, 1e-7);
        rep.property = ShapeReport::Property::log_convex;
        ok &= add(rep);
    }
    if (!ok) {
        out.pass = false;
        out.conclusion.note = "hypotheses violated; conclusion not evaluated";
        out.conclusion.pass = false;
        return out;
    }
    // Conclusion at grid level: H has potential density u.  Its conjugate H*
    // has Laplace exponent h*(s) = s / h(s) with 1/h(s) = L[u](s); the tail of
    // H's Levy measure equals the potential density u* of H*, so the Levy
    // density of H is non-increasing iff u* is convex.
    PchipInterpolant pu(xs, u);
    const double x0 = xs.front();
    const double u_head0 = std::max(0.0, u.front() - pu.derivative(x0) * x0);
    auto lap_u = [&](cplx s) -> cplx {
        cplx I = pu.laplace(s);
        // constant extension of the non-increasing density beyond the grid
        I += std::exp(-s * xs.back()) * u.back() / s;
        // head: linear continuation down to 0
        cplx e0 = std::exp(-s * x0);
        I += u_head0 * (1.0 - e0) / s + (u.front() - u_head0) / x0 * ((1.0 - e0) / s - x0 * e0) / s;
        return I;
    };
    // 1/h*(s) = 1/(s L[u](s)).  As s -> inf this tends to 1/u(0+), which is
    // the atom of the H* potential at 0; subtract it before inverting for the
    // density u*.
    const double atom = 1.0 / u.front();
    LaplaceTransform Fustar = [&](cplx s) -> cplx { return 1.0 / (s * lap_u(s)) - atom; };
    auto zs = lin_spaced(std::max(xs.front() * 4.0, 0.02 * xs.back()), xs.back() / 3.0, 160);
    EulerOptions opt;
    auto ustar = euler_invert_grid(Fustar, zs, opt, 1);
    // The e^{A/2}/t prefactor amplifies the candidate-transform error at small
    // t, so this consistency check runs at a grid-level tolerance.
    out.conclusion = convexity_report(zs, ustar, zs.front(), zs.back(),
                                      ShapeReport::Property::convex, 1e-3);
    out.conclusion.note = "recovered potential density of the conjugate is convex "
                          "(<=> recovered Levy density non-increasing)";
    out.pass = out.conclusion.pass;
    return out;
}

double uq_resolvable_upper(const scale::ScaleGrid& g, double snr) {
    double mx = 0.0;
    for (double v : g.w1_tilt) mx = std::max(mx, std::abs(v));
    double upper = g.xs.front();
    for (std::size_t i = 0; i < g.xs.size(); ++i)
        if (std::abs(g.w1_tilt[i]) >= snr * mx) upper = g.xs[i];
    return upper;
}

double excursion_sup_tail(const LevyModel& m, const scale::ScaleGrid& g, double z) {
    if (m.variation != Variation::bounded)
        throw DomainError("excursion_sup_tail requires a bounded-variation model");
    if (!(z > 0)) throw DomainError("excursion_sup_tail requires z > 0");
    const double delta = m.bv_drift;
    const double Wz = g.evaluate(z).w;
    if (!(Wz > 0)) throw NumericError("excursion_sup_tail: W(z) <= 0");
    if (m.jumps.kind == JumpKind::finite_activity_atoms) {
        double acc = 0.0;
        for (const auto& a : m.jumps.atoms) {
            if (a.location > z)
                acc += a.mass;
            else if (a.location < z)
                acc += a.mass * (1.0 - g.evaluate(z - a.location).w / Wz);
            // an atom at exactly z contributes to neither term
        }
        return acc / delta;
    }
    double tail = m.jumps.tail(z);
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    std::vector<double> splits;
    for (double b : m.jumps.breakpoints)
        if (b > 0 && b < z) splits.push_back(b);
    splits.push_back(z);
    auto f = [&](double x) {
        return m.jumps.density_fn(x) * (1.0 - g.evaluate(z - x).w / Wz);
    };
    double I = 0.0, lo = 0.0;
    for (double b : splits) {
        I += integrate_or_throw(f, lo, b, opt, "excursion tail integral");
        lo = b;
    }
    return (tail + I) / delta;
}

double excursion_atom_jump(const LevyModel& m, const scale::ScaleGrid& g, double a, double eps) {
    double tm = excursion_sup_tail(m, g, a - eps);
    double t0 = excursion_sup_tail(m, g, a);
    double tp = excursion_sup_tail(m, g, a + eps);
    return (tm - t0) + (tp - t0);
}

} // namespace shape
} // namespace snlevy
