#include "snlevy/verification.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "snlevy/definetti.hpp"
#include "snlevy/errors.hpp"
#include "snlevy/model_config.hpp"
#include "snlevy/quadrature.hpp"
#include "snlevy/scale_fn.hpp"
#include "snlevy/shape_analysis.hpp"
#include "snlevy/simulation.hpp"

namespace snlevy {
namespace verify {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Engine {
    Options opt;
    std::map<std::string, scale::ScaleGrid> grids;
    std::map<std::string, LevyModel> models;

    Engine(const Options& o) : opt(o) {
        for (const auto& n : config::gallery_names()) models.emplace(n, config::gallery_model(n));
    }

    const scale::ScaleGrid& grid(const std::string& name, double q, double x_max = 16.0) {
        std::string key = fmt("%s|%.6g|%.6g", name.c_str(), q, x_max);
        auto it = grids.find(key);
        if (it != grids.end()) return it->second;
        scale::GridSpec spec;
        spec.x_max = x_max;
        auto g = scale::compute_scale(models.at(name), q, spec, {}, opt.n_threads);
        return grids.emplace(key, std::move(g)).first->second;
    }

    // --- criterion 1: Laplace identity ---------------------------------
    CriterionResult c1() {
        CriterionResult r{1, "laplace-identity", true, 0, 30.0, ""};
        double worst = 0.0;
        for (const auto& name : config::gallery_names()) {
            for (double q : {0.0, 0.1, 1.0}) {
                const auto& g = grid(name, q);
                for (double off : {1.0, 2.0, 5.0}) {
                    auto rep = scale::laplace_residual(g, models.at(name), q, g.phi_q + off);
                    worst = std::max(worst, rep.residual);
                    if (rep.residual > 1e-5) r.pass = false;
                }
            }
        }
        r.detail = fmt("max residual %.3e (tol 1e-5), 4 models x q in {0,0.1,1} x 3 thetas", worst);
        return r;
    }

    // --- criterion 2: closed-form oracles -------------------------------
    CriterionResult c2() {
        CriterionResult r{2, "closed-form-oracles", true, 0, 10.0, ""};
        double worst = 0.0;
        {
            double q = 0.5, s = std::sqrt(2.0 * q);
            const auto& g = grid("brownian", q, 10.0);
            for (int i = 0; i < 512; ++i) {
                double x = 0.01 + (10.0 - 0.01) * i / 511.0;
                double want = 2.0 / s * std::sinh(s * x);
                double rel = std::abs(g.evaluate(x).w - want) / want;
                worst = std::max(worst, rel);
            }
        }
        for (double q : {0.1, 1.0}) {
            double b = 2.0 - 1.0 - q, cc = -2.0 * q;
            double disc = std::sqrt(b * b - 4 * cc);
            double phi = (-b + disc) / 2, zeta = (b + disc) / 2;
            double A = (2.0 + phi) / (phi + zeta), B = (2.0 - zeta) / (-(phi + zeta));
            const auto& g = grid("cramer_lundberg_exp", q, 10.0);
            for (int i = 0; i < 512; ++i) {
                double x = 0.01 + (10.0 - 0.01) * i / 511.0;
                double want = A * std::exp(phi * x) + B * std::exp(-zeta * x);
                double rel = std::abs(g.evaluate(x).w - want) / want;
                worst = std::max(worst, rel);
            }
        }
        r.pass = worst <= 1e-6;
        r.detail = fmt("max relative error %.3e vs sinh/two-exponential forms (tol 1e-6)", worst);
        return r;
    }

    // --- criterion 3: Theorem 2.1/2.2/2.6 shape suite --------------------
    CriterionResult c3() {
        CriterionResult r{3, "shape-theorem-suite", true, 0, 20.0, ""};
        double worst = -1.0;
        std::string where;
        auto track = [&](const ShapeReport& rep, const std::string& tag) {
            if (!rep.pass) r.pass = false;
            if (rep.worst_violation > worst) {
                worst = rep.worst_violation;
                where = tag;
            }
        };
        for (const auto& name : {"cramer_lundberg_exp", "piecewise_exp", "piecewise_power"}) {
            for (double q : {0.1, 1.0}) {
                const auto& g = grid(name, q);
                auto astar = shape::find_a_star(g);
                track(shape::convexity_report(g.xs, g.w_tilt, g.xs.front(), g.xs.back(),
                                              ShapeReport::Property::concave, 1e-7),
                      fmt("%s q=%g g_q concave", name, q));
                track(shape::convexity_report(g.xs, g.w1, astar.value + 0.05, g.xs.back(),
                                              ShapeReport::Property::convex, 1e-7),
                      fmt("%s q=%g W' convex beyond a*", name, q));
                double xu = shape::uq_resolvable_upper(g);
                track(shape::convexity_report(g.xs, g.u_q, 0.05, xu,
                                              ShapeReport::Property::non_increasing, 1e-7),
                      fmt("%s q=%g u_q non-increasing", name, q));
                track(shape::convexity_report(g.xs, g.u_q, 0.05, xu,
                                              ShapeReport::Property::convex, 1e-7),
                      fmt("%s q=%g u_q convex", name, q));
            }
        }
        r.detail = fmt("worst defect %.3e (%s); tol 1e-7, zero violations required", worst,
                       where.c_str());
        return r;
    }

    // --- criterion 4: Lemma 2.7 / 2.8 -----------------------------------
    CriterionResult c4() {
        CriterionResult r{4, "ladder-duality", true, 0, 20.0, ""};
        double worst = 0.0;
        QuadOptions qopt;
        qopt.rel_tol = 1e-9;
        for (const auto& name : {"cramer_lundberg_exp", "piecewise_exp", "piecewise_power"}) {
            const auto& m = models.at(name);
            for (double q : {0.0, 0.1, 1.0}) {
                auto L = model::ladder(m, q);
                for (double th : {0.5, 1.0, 2.0, 5.0}) {
                    auto f = [&](double x) { return -std::expm1(-th * x) * L.density_q(x); };
                    double integral = integrate_or_throw(f, 0.0, 8.0, qopt);
                    integral += integrate_to_inf_or_throw(f, 8.0, 2.0, qopt);
                    double bernstein = L.killing + L.drift * th + integral;
                    double wh = model::ladder_exponent(m, q, th);
                    double diff = std::abs(wh - bernstein) / std::max(1.0, std::abs(wh));
                    worst = std::max(worst, diff);
                    if (diff > 1e-6) r.pass = false;
                }
            }
        }
        // Lemma 2.8: upsilon_q log convex for the log-convex-density models
        double worst_lc = -1.0;
        for (const auto& name : {"cramer_lundberg_exp", "piecewise_exp", "piecewise_power"}) {
            const auto& m = models.at(name);
            for (double q : {0.0, 0.1, 1.0}) {
                auto L = model::ladder(m, q);
                auto rep = model::log_convexity_check(L.density_q, 0.1, 6.0, 64, 1e-7);
                worst_lc = std::max(worst_lc, rep.worst_violation);
                if (!rep.pass) r.pass = false;
            }
        }
        r.detail = fmt("dual-representation max diff %.3e (tol 1e-6); "
                       "upsilon_q log-convexity worst defect %.3e",
                       worst, worst_lc);
        return r;
    }

    // --- criterion 5: Theorem 2.9 atom criterion -------------------------
    CriterionResult c5() {
        CriterionResult r{5, "excursion-atom", true, 0, 0.0, ""};
        auto atomic = LevyModel::make_bv(1.5, JumpMeasure::finite_atoms({{1.0, 1.0}}), "atomic");
        scale::GridSpec spec;
        auto g = scale::compute_scale(atomic, 0.0, spec, {}, opt.n_threads);
        double W0 = g.w0, W1 = g.evaluate(1.0).w;
        double want = (1.0 / 1.5) * (2.0 - W0 / W1);
        double got = shape::excursion_atom_jump(atomic, g, 1.0, 1e-9);
        double err_atom = std::abs(got - want);
        const auto& gcl = grid("cramer_lundberg_exp", 0.0, 16.0);
        double cont = std::abs(
            shape::excursion_atom_jump(models.at("cramer_lundberg_exp"), gcl, 1.0, 1e-9));
        r.pass = err_atom <= 1e-8 && cont <= 1e-8;
        r.detail = fmt("atom jump error %.3e, continuous-model jump %.3e (tol 1e-8)", err_atom,
                       cont);
        return r;
    }

    // --- criterion 6: HJB suite ------------------------------------------
    std::map<std::string, definetti::BarrierSolution> solutions;
    const definetti::BarrierSolution& solution(const std::string& name, double q) {
        std::string key = fmt("%s|%.6g", name.c_str(), q);
        auto it = solutions.find(key);
        if (it != solutions.end()) return it->second;
        definetti::SolveOptions so;
        so.n_threads = opt.n_threads;
        auto sol = definetti::solve(models.at(name), q, so);
        return solutions.emplace(key, std::move(sol)).first->second;
    }

    CriterionResult c6() {
        CriterionResult r{6, "hjb-suite", true, 0, 60.0, ""};
        std::string det;
        for (const auto& name : {"cramer_lundberg_exp", "piecewise_exp", "piecewise_power"}) {
            const auto& sol = solution(name, 0.1);
            bool ok = sol.max_interior_rel <= 1.0 && sol.max_exterior_rel <= 1.0;
            if (!ok) r.pass = false;
            det += fmt("%s: int %.2e ext %.2e of tol, %s; ", name, sol.max_interior_rel,
                       sol.max_exterior_rel, definetti::verdict_name(sol.verdict));
            if (sol.verdict != definetti::Verdict::optimal_certified) r.pass = false;
        }
        r.detail = det + "(tol 5e-4 q v(x) pointwise)";
        return r;
    }

    // --- criterion 7: Monte Carlo cross-check ----------------------------
    CriterionResult c7() {
        CriterionResult r{7, "mc-cross-check", true, 0, 120.0, ""};
        const auto& sol = solution("cramer_lundberg_exp", 0.1);
        double a = sol.a_star.value;
        const auto& m = models.at("cramer_lundberg_exp");
        sim::SimOptions so;
        so.n_threads = opt.n_threads;
        std::string det;
        for (double f : {0.5, 1.0, 2.0}) {
            double x0 = f * a;
            double want = definetti::barrier_value(sol.grid, a, x0);
            auto est = sim::simulate_value(m, sim::StrategySpec::barrier(a), 0.1, x0,
                                           opt.mc_paths, opt.seed, so);
            double z = (est.mean - want) / est.std_error;
            bool ok = std::abs(z) <= 3.0 && est.std_error <= 0.01 * want;
            if (!ok) r.pass = false;
            det += fmt("x0=%.3g: z=%.2f se/v=%.4f; ", x0, z, est.std_error / want);
        }
        r.detail = det + fmt("(%ld exact event-driven paths)", opt.mc_paths);
        return r;
    }

    // --- criterion 8: barrier dominance ----------------------------------
    CriterionResult c8() {
        CriterionResult r{8, "barrier-dominance", true, 0, 300.0, ""};
        const auto& sol = solution("cramer_lundberg_exp", 0.1);
        double a = sol.a_star.value;
        const auto& m = models.at("cramer_lundberg_exp");
        std::vector<sim::StrategySpec> strategies{sim::StrategySpec::barrier(a)};
        for (int i = 1; i <= 50; ++i)
            strategies.push_back(sim::StrategySpec::barrier(0.1 * a + (2.9 * a) * i / 50.0));
        strategies.push_back(sim::StrategySpec::threshold(a, 0.3));
        strategies.push_back(sim::StrategySpec::threshold(a, 0.6));
        strategies.push_back(sim::StrategySpec::threshold(a, 0.9));
        strategies.push_back(sim::StrategySpec::threshold(0.5 * a, 0.5));
        strategies.push_back(sim::StrategySpec::threshold(1.5 * a, 0.5));
        sim::SimOptions so;
        so.n_threads = opt.n_threads;
        auto cmp = sim::compare_strategies(m, 0.1, a, strategies, opt.dominance_paths, opt.seed,
                                           so);
        r.pass = !cmp.first_beaten;
        double worst_excess = -1e300;
        for (std::size_t s = 1; s < strategies.size(); ++s)
            worst_excess = std::max(worst_excess,
                                    cmp.diff_vs_first[s] / std::max(cmp.diff_se[s], 1e-300));
        r.detail = fmt("barrier(a*) vs 50 barriers + 5 thresholds: max excess %.2f joint SE "
                       "(threshold 3), best=%s",
                       worst_excess, cmp.strategies[cmp.best_index].label().c_str());
        return r;
    }

    // --- criterion 9: exponent recovery ----------------------------------
    CriterionResult c9() {
        CriterionResult r{9, "exponent-recovery", true, 0, 0.0, ""};
        const auto& g = grid("brownian", 0.0, 16.0);
        scale::CandidateScale cand{g.xs, g.w, g.w1, g.w2};
        auto res = scale::recover_exponent(cand, {1.0, 2.0, 5.0});
        double worst = 0.0;
        for (std::size_t i = 0; i < res.thetas.size(); ++i) {
            double th = res.thetas[i];
            double rel = std::abs(res.psi_hat[i] - 0.5 * th * th) / (0.5 * th * th);
            worst = std::max(worst, rel);
        }
        r.pass = worst <= 1e-6 && res.exponent_valid;
        r.detail = fmt("max relative error %.3e vs theta^2/2 (tol 1e-6), exponent_valid=%d",
                       worst, int(res.exponent_valid));
        return r;
    }

    // --- criterion 10: determinism ---------------------------------------
    void emit_artifacts(const std::string& dir) {
        fs::create_directories(dir);
        const auto& m = models.at("cramer_lundberg_exp");
        // scale CSV
        {
            const auto& g = grid("cramer_lundberg_exp", 0.1, 16.0);
            std::ofstream out(dir + "/scale_cl_q0.1.csv");
            g.write_csv(out);
        }
        // solve artifacts
        {
            const auto& sol = solution("cramer_lundberg_exp", 0.1);
            std::ofstream v(dir + "/definetti_value.csv");
            v << "# snlevy-definetti q=" << "0.1" << "\n" << "x,v\n";
            char buf[128];
            for (std::size_t i = 0; i < sol.xs.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sol.xs[i], sol.value[i]);
                v << buf;
            }
            std::ofstream res(dir + "/definetti_residuals.csv");
            res << "x,residual,side\n";
            for (std::size_t i = 0; i < sol.hjb_xs_interior.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,interior\n", sol.hjb_xs_interior[i],
                              sol.hjb_interior[i]);
                res << buf;
            }
            for (std::size_t i = 0; i < sol.hjb_xs_exterior.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,exterior\n", sol.hjb_xs_exterior[i],
                              sol.hjb_exterior[i]);
                res << buf;
            }
            std::ofstream verdict(dir + "/definetti_verdict.txt");
            std::snprintf(buf, sizeof buf, "a_star=%.17g\nw1_min=%.17g\nverdict=%s\n",
                          sol.a_star.value, sol.a_star.w1_min,
                          definetti::verdict_name(sol.verdict));
            verdict << buf;
        }
        // simulation estimate
        {
            const auto& sol = solution("cramer_lundberg_exp", 0.1);
            sim::SimOptions so;
            so.n_threads = opt.n_threads;
            auto est = sim::simulate_value(m, sim::StrategySpec::barrier(sol.a_star.value), 0.1,
                                           sol.a_star.value, 20000, opt.seed, so);
            std::ofstream out(dir + "/simulate_estimate.txt");
            char buf[320];
            std::snprintf(buf, sizeof buf,
                          "mean=%.17g\nstd_error=%.17g\nn_paths=%ld\nseed=%llu\nhorizon=%.17g\n"
                          "truncation_bias_bound=%.17g\nruin_fraction=%.17g\n",
                          est.mean, est.std_error, est.n_paths,
                          (unsigned long long)est.seed, est.horizon, est.truncation_bias_bound,
                          est.ruin_fraction);
            out << buf;
        }
        // shape report
        {
            const auto& g = grid("cramer_lundberg_exp", 0.1, 16.0);
            auto astar = shape::find_a_star(g);
            std::vector<ShapeReport> reps;
            reps.push_back(shape::convexity_report(g.xs, g.w_tilt, g.xs.front(), g.xs.back(),
                                                   ShapeReport::Property::concave, 1e-7));
            reps.push_back(shape::convexity_report(g.xs, g.w1, astar.value + 0.05, g.xs.back(),
                                                   ShapeReport::Property::convex, 1e-7));
            std::ofstream out(dir + "/shape_report.txt");
            for (const auto& rep : reps) out << rep.to_kv() << "\n";
            out << shape_table(reps);
        }
    }

    CriterionResult c10() {
        CriterionResult r{10, "determinism", true, 0, 0.0, ""};
        std::string base = opt.out_dir.empty() ? std::string("snlevy_verify_tmp") : opt.out_dir;
        std::string d1 = base + "/run1", d2 = base + "/run2";
        emit_artifacts(d1);
        emit_artifacts(d2);
        int n = 0, bad = 0;
        for (const auto& e : fs::directory_iterator(d1)) {
            std::ifstream a(e.path(), std::ios::binary);
            std::ifstream b(d2 + "/" + e.path().filename().string(), std::ios::binary);
            std::stringstream sa, sb;
            sa << a.rdbuf();
            sb << b.rdbuf();
            ++n;
            if (sa.str() != sb.str() || sa.str().empty()) ++bad;
        }
        r.pass = bad == 0 && n >= 5;
        r.detail = fmt("%d artifacts byte-compared, %d mismatches", n, bad);
        return r;
    }
};

} // namespace

std::vector<CriterionResult> run_acceptance(const Options& opt) {
    Engine eng(opt);
    std::vector<CriterionResult> out;
    auto timed = [&](auto&& fn) {
        auto t0 = Clock::now();
        CriterionResult r = fn();
        r.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();
        if (r.limit_s > 0 && r.elapsed_s > r.limit_s) {
            r.pass = false;
            r.detail += fmt(" [RUNTIME %.1fs exceeds %.0fs]", r.elapsed_s, r.limit_s);
        }
        out.push_back(std::move(r));
    };
    timed([&] { return eng.c1(); });
    timed([&] { return eng.c2(); });
    timed([&] { return eng.c3(); });
    timed([&] { return eng.c4(); });
    timed([&] { return eng.c5(); });
    timed([&] { return eng.c6(); });
    timed([&] { return eng.c7(); });
    timed([&] { return eng.c8(); });
    timed([&] { return eng.c9(); });
    timed([&] { return eng.c10(); });
    return out;
}

std::string format_table(const std::vector<CriterionResult>& results) {
    std::string out = "criterion                pass  time     detail\n";
    for (const auto& r : results) {
        out += fmt("%2d %-21s %-5s %6.1fs  %s\n", r.id, r.name.c_str(),
                   r.pass ? "PASS" : "FAIL", r.elapsed_s, r.detail.c_str());
    }
    return out;
}

bool all_pass(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace verify
} // namespace snlevy
