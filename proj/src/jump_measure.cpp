#include "snlevy/jump_measure.hpp"

#include <algorithm>
#include <cmath>

#include "snlevy/errors.hpp"
#include "snlevy/interpolation.hpp"

namespace snlevy {

namespace {

// int_a^b e^{-s x} dx, stable for small |s (b-a)|.  b may be +inf (Re s > 0
// or s real > 0 required there).
template <class S>
S expdiff(S s, double a, double b) {
    if (std::isinf(b)) return std::exp(-s * a) / s;
    if (std::abs(s) * (b - a) < 0.5) {
        // e^{-sa} (b-a) sum_m (-s(b-a))^m / (m+1)!
        S z = -s * (b - a);
        S term = 1.0, sum = 1.0;
        for (int m = 1; m < 25; ++m) {
            term *= z / double(m + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return std::exp(-s * a) * (b - a) * sum;
    }
    return (std::exp(-s * a) - std::exp(-s * b)) / s;
}

// int_a^b x e^{-r x} dx (real r, r may be 0; b may be +inf when r > 0)
double mean_piece(double r, double a, double b) {
    if (r == 0.0) {
        if (std::isinf(b)) return std::numeric_limits<double>::infinity();
        return 0.5 * (b * b - a * a);
    }
    auto F = [&](double x) { return -std::exp(-r * x) * (x / r + 1.0 / (r * r)); };
    double fb = std::isinf(b) ? 0.0 : F(b);
    return fb - F(a);
}

double stable_compensator(double theta, double x) {
    // 1 - e^{-theta x} - theta x  (without the cutoff indicator)
    return -(std::expm1(-theta * x) + theta * x);
}

} // namespace

double JumpMeasure::density(double x) const {
    if (kind != JumpKind::density) throw DomainError("jump measure has no density");
    if (!(x > 0)) throw DomainError("density requires x > 0");
    return density_fn(x);
}

double JumpMeasure::tail(double x) const {
    if (!(x > 0)) throw DomainError("tail requires x > 0");
    switch (kind) {
        case JumpKind::none:
            return 0.0;
        case JumpKind::finite_activity_atoms: {
            double s = 0.0;
            for (const auto& a : atoms)
                if (a.location > x) s += a.mass;
            return s;
        }
        case JumpKind::density: {
            if (tail_exact_fn) return tail_exact_fn(x);
            QuadOptions opt;
            opt.rel_tol = 1e-12;
            double v = 0.0;
            double lo = x;
            for (double b : breakpoints) {
                if (b > lo) {
                    v += integrate_or_throw(density_fn, lo, b, opt, "jump tail quadrature");
                    lo = b;
                }
            }
            auto tailq = integrate_to_inf<double>(density_fn, lo, std::max(lo, 1.0), opt);
            if (!tailq.converged) throw QuadratureError("jump tail quadrature", tailq.error);
            return v + tailq.value;
        }
    }
    return 0.0;
}

double JumpMeasure::compensated_integral(double theta) const {
    if (!(theta >= 0)) throw DomainError("compensated integral requires theta >= 0");
    if (theta == 0.0) return 0.0;
    switch (kind) {
        case JumpKind::none:
            return 0.0;
        case JumpKind::finite_activity_atoms: {
            double s = 0.0;
            for (const auto& a : atoms) {
                double c = a.location < 1.0 ? stable_compensator(theta, a.location)
                                            : -std::expm1(-theta * a.location);
                s += a.mass * c;
            }
            return s;
        }
        case JumpKind::density:
            break;
    }
    // density case: split at breakpoints and the compensation cutoff 1
    std::vector<double> splits = breakpoints;
    splits.push_back(1.0);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    double v = 0.0;
    double lo = 0.0;
    for (double b : splits) {
        if (b <= lo) continue;
        auto f = [&](double x) {
            double base = -(std::expm1(-theta * x)); // 1 - e^{-theta x}
            if (x < 1.0) base = stable_compensator(theta, x);
            return base * density_fn(x);
        };
        v += integrate_or_throw(f, lo, b, opt, "compensated jump integral");
        lo = b;
    }
    auto f_tail = [&](double x) { return -std::expm1(-theta * x) * density_fn(x); };
    auto tq = integrate_to_inf<double>(f_tail, std::max(lo, 1.0), 1.0, opt);
    if (!tq.converged) throw QuadratureError("compensated jump integral tail", tq.error);
    return v + tq.value;
}

bool JumpMeasure::has_complex_transform() const {
    return kind == JumpKind::none || kind == JumpKind::finite_activity_atoms ||
           (kind == JumpKind::density && (laplace_fn || is_power_) && finite_activity);
}

std::vector<cplx> JumpMeasure::laplace_density_batch(cplx s0, cplx step, int count) const {
    std::vector<cplx> out(count);
    if (kind == JumpKind::none) return out;
    if (is_power_) {
        power_laplace_batch(s0, step, out);
        return out;
    }
    for (int j = 0; j < count; ++j) out[j] = laplace_density(s0 + double(j) * step);
    return out;
}

cplx JumpMeasure::laplace_density(cplx s) const {
    if (kind == JumpKind::finite_activity_atoms) {
        cplx v = 0.0;
        for (const auto& a : atoms) v += a.mass * std::exp(-s * a.location);
        return v;
    }
    if (kind != JumpKind::density) return 0.0;
    if (is_power_) return power_laplace(s);
    if (!laplace_fn) throw DomainError("jump measure lacks a complex transform");
    return laplace_fn(s);
}

cplx JumpMeasure::compensated_integral(cplx theta) const {
    if (theta == cplx(0.0)) return 0.0;
    if (kind == JumpKind::none) return 0.0;
    if (theta.imag() == 0.0 && kind == JumpKind::density && !laplace_fn && !is_power_)
        return compensated_integral(theta.real());
    if (!has_complex_transform())
        throw DomainError("jump measure lacks a complex transform (infinite activity?)");
    if (kind == JumpKind::finite_activity_atoms) {
        cplx v = 0.0;
        for (const auto& a : atoms) {
            cplx c = 1.0 - std::exp(-theta * a.location);
            if (a.location < 1.0) c -= theta * a.location;
            v += a.mass * c;
        }
        return v;
    }
    return mass - laplace_density(theta) - theta * m1;
}

void JumpMeasure::validate() const {
    if (kind == JumpKind::none) return;
    if (kind == JumpKind::finite_activity_atoms) {
        for (const auto& a : atoms)
            if (!(a.location > 0 && a.mass > 0))
                throw DomainError("atoms need location > 0 and mass > 0");
        return;
    }
    // density must be non-negative on a test grid
    for (double x : log_spaced(1e-3, 1e3, 25))
        if (!(density_fn(x) >= 0) || !std::isfinite(density_fn(x)))
            throw DomainError("jump density must be finite and >= 0");
    // int_0^1 x^2 pi(x) dx finite: sum dyadic head blocks and require a
    // convergent (geometric) remainder.
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    double prev = std::numeric_limits<double>::infinity();
    double total = 0.0;
    double hi = 1.0;
    bool head_ok = false;
    for (int k = 0; k < 60; ++k) {
        double lo = hi * 0.5;
        auto r = integrate<double>([&](double x) { return x * x * density_fn(x); }, lo, hi, opt);
        double b = r.value;
        total += b;
        if (b <= 1e-14 * std::max(total, 1e-30)) {
            head_ok = true;
            break;
        }
        if (k >= 8 && prev > 0) {
            double ratio = b / prev;
            if (ratio < 0.98) {
                double rem = b * ratio / (1.0 - ratio);
                if (rem <= 1e-8 * std::max(total, 1e-12)) {
                    head_ok = true;
                    break;
                }
            }
        }
        prev = b;
        hi = lo;
    }
    if (!head_ok)
        throw DomainError("jump density fails int_0^1 x^2 Pi(dx) < inf on the test grid");
    // tail must vanish
    double t1 = tail(1.0), t2 = tail(64.0);
    if (!(t2 <= t1) || !std::isfinite(t1))
        throw DomainError("jump tail not non-increasing / not finite");
}

// --- constructors ---------------------------------------------------------

JumpMeasure JumpMeasure::none() {
    JumpMeasure j;
    j.kind = JumpKind::none;
    j.family = "none";
    return j;
}

JumpMeasure JumpMeasure::exp_segments(std::vector<ExpSegment> segs, std::string family) {
    if (segs.empty()) throw DomainError("exp_segments: empty");
    JumpMeasure j;
    j.kind = JumpKind::density;
    j.family = std::move(family);
    if (!(segs.back().b == std::numeric_limits<double>::infinity() && segs.back().r > 0))
        throw DomainError("exp_segments: last segment must be infinite with positive rate");
    j.segs_ = segs;
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) j.breakpoints.push_back(segs[i].b);
    j.density_fn = [segs](double x) -> double {
        for (const auto& s : segs)
            if (x >= s.a && x < s.b) return s.k * std::exp(-s.r * x);
        return 0.0;
    };
    j.tail_exact_fn = [segs](double x) -> double {
        double v = 0.0;
        for (const auto& s : segs) {
            double lo = std::max(x, s.a);
            if (lo >= s.b) continue;
            v += (s.r == 0.0) ? s.k * (s.b - lo) : s.k * expdiff(s.r, lo, s.b);
        }
        return v;
    };
    j.laplace_fn = [segs](cplx s) -> cplx {
        cplx v = 0.0;
        for (const auto& seg : segs) v += seg.k * expdiff(cplx(seg.r) + s, seg.a, seg.b);
        return v;
    };
    j.mean_above_fn = [segs](double y) -> double {
        double v = 0.0;
        for (const auto& s : segs) {
            double lo = std::max(y, s.a);
            if (lo >= s.b) continue;
            v += s.k * mean_piece(s.r, lo, s.b);
        }
        return v;
    };
    j.finite_activity = true;
    j.mass = j.tail_exact_fn(0.0 + 1e-300); // tail at 0+ equals total mass here
    {
        // m1 = int_0^1 x pi = mean_above(0) - mean_above(1) restricted below 1
        double v = 0.0;
        for (const auto& s : segs) {
            double lo = s.a, hi = std::min(s.b, 1.0);
            if (lo >= hi) continue;
            v += s.k * mean_piece(s.r, lo, hi);
        }
        j.m1 = v;
    }
    j.mean_finite = true;
    j.mean_above_one = j.mean_above_fn(1.0);
    return j;
}

JumpMeasure JumpMeasure::exponential(double lambda, double mu) {
    if (!(lambda > 0 && mu > 0)) throw DomainError("exponential jumps need lambda, mu > 0");
    auto j = exp_segments({{lambda * mu, mu, 0.0, std::numeric_limits<double>::infinity()}},
                          "cramer_lundberg_exp");
    return j;
}

JumpMeasure JumpMeasure::piecewise_exp(double lambda, double scale) {
    if (!(lambda > 0 && lambda < 1)) throw DomainError("piecewise_exp needs 0 < lambda < 1");
    double alpha = 1.0 / (1.0 - lambda);
    // f(x) = e^{2-x} = e^2 e^{-x};  g(x) = e^{1-lambda x} = e * e^{-lambda x}
    std::vector<ExpSegment> segs = {
        {scale * std::exp(2.0), 1.0, 0.0, alpha},
        {scale * std::exp(1.0), lambda, alpha, std::numeric_limits<double>::infinity()}};
    auto j = exp_segments(std::move(segs), "piecewise_exp");
    return j;
}

JumpMeasure JumpMeasure::table_density(const std::vector<double>& xs,
                                       const std::vector<double>& ys) {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw DomainError("table density: need >= 2 matching (x, pi(x)) rows");
    std::vector<ExpSegment> segs;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i + 1] > xs[i] && xs[i] > 0)) throw DomainError("table density: x not increasing");
        if (!(ys[i] > 0 && ys[i + 1] > 0)) throw DomainError("table density: pi(x) must be > 0");
        double r = -std::log(ys[i + 1] / ys[i]) / (xs[i + 1] - xs[i]);
        double k = ys[i] * std::exp(r * xs[i]);
        segs.push_back({k, r, xs[i], xs[i + 1]});
    }
    // head: continue the first segment's exponential down to 0
    segs.front().a = 0.0;
    // tail: continue the last slope; must decay
    if (!(segs.back().r > 0))
        throw DomainError("table density: tail slope must be negative (decaying density)");
    segs.back().b = std::numeric_limits<double>::infinity();
    return exp_segments(std::move(segs), "custom_density_table");
}

JumpMeasure JumpMeasure::finite_atoms(std::vector<Atom> atoms) {
    JumpMeasure j;
    j.kind = JumpKind::finite_activity_atoms;
    j.family = "finite_activity_atoms";
    j.atoms = std::move(atoms);
    j.finite_activity = true;
    for (const auto& a : j.atoms) {
        j.mass += a.mass;
        if (a.location < 1.0) j.m1 += a.mass * a.location;
        j.mean_above_one += a.location >= 1.0 ? a.mass * a.location : 0.0;
    }
    j.mean_finite = true;
    j.validate();
    return j;
}

JumpMeasure JumpMeasure::from_density(std::function<double(double)> pi,
                                      std::vector<double> breakpoints, std::string family) {
    JumpMeasure j;
    j.kind = JumpKind::density;
    j.family = std::move(family);
    j.density_fn = std::move(pi);
    j.breakpoints = std::move(breakpoints);
    std::sort(j.breakpoints.begin(), j.breakpoints.end());
    QuadOptions opt;
    opt.rel_tol = 1e-11;
    const auto& dens = j.density_fn;
    // total mass (may diverge near 0: probe and mark infinite activity)
    double head = 0.0;
    bool head_finite = true;
    {
        double hi = std::min(1.0, j.breakpoints.empty() ? 1.0 : j.breakpoints.front());
        double prev = std::numeric_limits<double>::infinity();
        double acc = 0.0;
        double edge = hi;
        for (int k = 0; k < 60; ++k) {
            double lo = edge * 0.5;
            auto r = integrate<double>(dens, lo, edge, opt);
            acc += r.value;
            if (r.value < 1e-13 * std::max(acc, 1e-30)) break;
            if (k > 45 && r.value >= prev) {
                head_finite = false;
                break;
            }
            prev = r.value;
            edge = lo;
        }
        head = acc;
        j.finite_activity = head_finite;
        if (head_finite) {
            double lo = hi;
            double v = head;
            for (double b : j.breakpoints)
                if (b > lo) {
                    v += integrate_or_throw(dens, lo, b, opt, "custom density mass");
                    lo = b;
                }
            auto t = integrate_to_inf<double>(dens, lo, std::max(lo, 1.0), opt);
            if (!t.converged) throw QuadratureError("custom density mass", t.error);
            j.mass = v + t.value;
        } else {
            j.mass = std::numeric_limits<double>::infinity();
        }
    }
    {
        auto xf = [&](double x) { return x * dens(x); };
        auto r = integrate<double>(xf, 0.0, 1.0, opt);
        j.m1 = r.converged ? r.value : std::numeric_limits<double>::infinity();
    }
    {
        auto xf = [&](double x) { return x * dens(x); };
        double lo = 1.0, v = 0.0;
        for (double b : j.breakpoints)
            if (b > lo) {
                v += integrate_or_throw(xf, lo, b, opt, "custom density mean");
                lo = b;
            }
        auto t = integrate_to_inf<double>(xf, lo, 1.0, opt);
        j.mean_finite = t.converged;
        j.mean_above_one = t.converged ? v + t.value : std::numeric_limits<double>::infinity();
    }
    return j;
}

JumpMeasure JumpMeasure::piecewise_power(double lambda1, double lambda2, double alpha,
                                         double scale, double temper) {
    if (!(lambda1 > 0 && lambda1 < 2 && lambda2 > 0 && lambda2 <= lambda1))
        throw DomainError("piecewise_power needs 0 < lambda2 <= lambda1 < 2");
    if (!(alpha > 0 && scale > 0 && temper >= 0)) throw DomainError("piecewise_power parameters");
    JumpMeasure j;
    j.kind = JumpKind::density;
    j.family = "piecewise_power";
    j.is_power_ = true;
    j.pow_ = {scale, lambda1, lambda2, alpha, temper};
    j.breakpoints = {alpha};
    PowerParams p = j.pow_;
    j.density_fn = [p](double x) -> double {
        double damp = p.c > 0 ? std::exp(-p.c / x) : 1.0;
        double lam = x < p.alpha ? p.lam1 : p.lam2;
        return p.k * damp * std::pow(x, -(1.0 + lam));
    };
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    const auto& dens = j.density_fn;
    if (temper > 0) {
        j.finite_activity = true;
        double head = integrate_or_throw(dens, 0.0, alpha, opt, "piecewise_power mass");
        auto tq = integrate_to_inf<double>(dens, alpha, std::max(alpha, 1.0), opt);
        if (!tq.converged) throw QuadratureError("piecewise_power mass tail", tq.error);
        j.mass = head + tq.value;
    } else {
        // x^{-(1+lambda)} is never integrable at 0: infinite activity.
        j.finite_activity = false;
        j.mass = std::numeric_limits<double>::infinity();
    }
    if (temper == 0.0 && lambda1 >= 1.0) {
        j.m1 = std::numeric_limits<double>::infinity(); // unbounded variation
    } else {
        auto xf = [&](double x) { return x * dens(x); };
        double v = integrate_or_throw(xf, 0.0, std::min(alpha, 1.0), opt, "piecewise_power m1");
        if (alpha < 1.0) v += integrate_or_throw(xf, alpha, 1.0, opt, "piecewise_power m1");
        j.m1 = v;
    }
    j.mean_finite = lambda2 > 1.0;
    if (j.mean_finite) {
        auto xf = [&](double x) { return x * dens(x); };
        double lo = 1.0, v = 0.0;
        if (alpha > 1.0) {
            v += integrate_or_throw(xf, 1.0, alpha, opt, "piecewise_power mean");
            lo = alpha;
        }
        auto tq = integrate_to_inf<double>(xf, lo, std::max(lo, 1.0), opt);
        if (!tq.converged) throw QuadratureError("piecewise_power mean tail", tq.error);
        j.mean_above_one = v + tq.value;
    } else {
        j.mean_above_one = std::numeric_limits<double>::infinity();
    }
    return j;
}

// Complex transform of the tempered piecewise power density.
//
// Each piece is analytic in Re z > 0, so the Laplace integral along [p, inf)
// can be rotated onto the ray p + e^{-i pi/4} u (for Im s >= 0).  Along the
// ray the factor e^{-s z} decays at rate Re(s e^{-i pi/4}) =
// (Re s + Im s)/sqrt(2), which removes the oscillation entirely.
//
// Batches evaluate L(s_0 + j step) for the whole Laplace-inversion contour in
// one sweep: the quadrature nodes are laid out for the least-damped member
// (j = 0) and the remaining members differ only by the per-node geometric
// phase factor e^{-step z_i}, accumulated by recurrence.
void JumpMeasure::power_laplace_batch(cplx s0, cplx step, std::vector<cplx>& out) const {
    const PowerParams& p = pow_;
    if (p.c <= 0) throw DomainError("untempered piecewise power has no stable transform");
    if (!(s0.real() > 0)) throw DomainError("power transform requires Re s > 0");
    if (s0.imag() < 0 || step.imag() < 0 || step.real() < 0)
        throw DomainError("power transform batch requires Im s0, Im step, Re step >= 0");
    const int K = int(out.size());
    const cplx rot = std::polar(1.0, -0.25 * M_PI);
    const double cosphi = std::cos(0.25 * M_PI);
    const double rate = (s0 * rot).real(); // decay rate of the j = 0 member

    auto ray = [&](double pstart, double lam, double sign, std::vector<cplx>& acc) {
        // prefactor/exponent bounds: if the j = 0 member cannot contribute,
        // the more strongly damped members cannot either
        if (pstart > 0 && s0.real() * pstart > 60.0) return;
        if (pstart == 0.0 && 2.0 * std::sqrt(rate * p.c * cosphi) > 60.0) return;
        auto g = [&](cplx z) -> cplx {
            return p.k * std::exp(-p.c / z) * std::pow(z, -cplx(1.0 + lam));
        };
        auto h0 = [&](double u) -> cplx {
            return std::exp(-s0 * (rot * u)) * g(pstart + rot * u);
        };
        const double u_peak = p.c * cosphi / (1.0 + lam);
        double U = 45.0 / rate;
        if (pstart == 0.0) U = std::max(U, 50.0 * u_peak);
        double u0 = std::min(0.25 / rate, U * 0.5);
        if (pstart == 0.0)
            u0 = std::min(u0, std::max(u_peak, std::sqrt(p.c * cosphi / rate)) / 16.0);

        struct Panel {
            double lo, hi, err;
            cplx val;
        };
        std::vector<Panel> panels;
        double lo = 0.0, hi = u0;
        double total_mag = 0.0;
        while (lo < U) {
            Panel pn;
            pn.lo = lo;
            pn.hi = hi;
            double fs;
            detail::gk15_panel<cplx>(h0, lo, hi, pn.val, pn.err, fs);
            total_mag += std::abs(pn.val);
            panels.push_back(pn);
            lo = hi;
            hi = std::min(2.0 * hi, U);
            if (hi <= lo) break;
        }
        // bisect the worst panels until the j = 0 error is harmless at the
        // scale of the full compensated integral (~ mass)
        const double tol = 1e-11 * std::max({total_mag, mass * 0.01, 1e-30});
        for (int round = 0; round < 200; ++round) {
            std::size_t worst = 0;
            double werr = 0.0, terr = 0.0;
            for (std::size_t i = 0; i < panels.size(); ++i) {
                terr += panels[i].err;
                if (panels[i].err > werr) {
                    werr = panels[i].err;
                    worst = i;
                }
            }
            if (terr <= tol || panels.size() > 400) break;
            Panel a = panels[worst], b;
            double mid = 0.5 * (a.lo + a.hi);
            if (!(mid > a.lo && mid < a.hi)) {
                panels[worst].err = 0.0;
                continue;
            }
            b.lo = mid;
            b.hi = a.hi;
            a.hi = mid;
            double fs;
            detail::gk15_panel<cplx>(h0, a.lo, a.hi, a.val, a.err, fs);
            detail::gk15_panel<cplx>(h0, b.lo, b.hi, b.val, b.err, fs);
            panels[worst] = a;
            panels.push_back(b);
        }
        // final sweep: accumulate every batch member on the shared nodes
        for (const auto& pn : panels) {
            const double c = 0.5 * (pn.lo + pn.hi);
            const double hw = 0.5 * (pn.hi - pn.lo);
            for (int jn = 0; jn < 15; ++jn) {
                double u, wgt;
                if (jn == 0) {
                    u = c;
                    wgt = detail::gk15_wk[7] * hw;
                } else {
                    int idx = (jn - 1) / 2;
                    double dx = hw * detail::gk15_x[idx];
                    u = (jn % 2 == 1) ? c - dx : c + dx;
                    wgt = detail::gk15_wk[idx] * hw;
                }
                cplx z = pstart + rot * u;
                cplx base = sign * wgt * rot * g(z) * std::exp(-s0 * z);
                if (K == 1) {
                    acc[0] += base;
                    continue;
                }
                cplx phase = std::exp(-step * z);
                cplx cur = base;
                for (int k = 0; k < K; ++k) {
                    acc[k] += cur;
                    cur *= phase;
                }
            }
        }
    };

    for (auto& v : out) v = 0.0;
    // int_0^alpha g1 + int_alpha^inf g2
    //   = [Ray(0, g1) - Ray(alpha, g1)] + Ray(alpha, g2)
    ray(0.0, p.lam1, +1.0, out);
    ray(p.alpha, p.lam1, -1.0, out);
    ray(p.alpha, p.lam2, +1.0, out);
}

cplx JumpMeasure::power_laplace(cplx s) const {
    if (s.imag() < 0) return std::conj(power_laplace(std::conj(s)));
    std::vector<cplx> out(1);
    power_laplace_batch(s, cplx(0.0, 0.0), out);
    return out[0];
}

} // namespace snlevy
