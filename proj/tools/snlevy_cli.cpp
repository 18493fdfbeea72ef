// Command-line front end: model ingestion, scale-function computation, shape
// analysis, the dividend-barrier solver, Monte Carlo simulation and the
// bundled verification suite.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "snlevy/definetti.hpp"
#include "snlevy/errors.hpp"
#include "snlevy/model_config.hpp"
#include "snlevy/scale_fn.hpp"
#include "snlevy/shape_analysis.hpp"
#include "snlevy/simulation.hpp"
#include "snlevy/verification.hpp"

namespace fs = std::filesystem;
using namespace snlevy;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
    std::string model_spec;
    std::string out_dir = "snlevy_out";
    double q = 0.1;
    int threads = 0;
};

std::string f17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_manifest(const Common& c, const std::string& command,
                    const std::map<std::string, double>& tolerances,
                    const std::vector<std::string>& artifacts, double wall_s,
                    std::uint64_t seed = 0) {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["model"] = c.model_spec;
    j["q"] = c.q;
    j["seed"] = seed;
    j["threads_requested"] = c.threads;
    j["tolerances"] = tolerances;
    j["artifacts"] = artifacts;
    j["wall_time_s"] = wall_s;
    std::ofstream out(c.out_dir + "/run_manifest.json");
    out << j.dump(2) << "\n";
}

scale::GridSpec grid_from_tolerances(const std::map<std::string, double>& tol) {
    scale::GridSpec spec;
    if (tol.count("x_min")) spec.x_min = tol.at("x_min");
    if (tol.count("split")) spec.split = tol.at("split");
    if (tol.count("x_max")) spec.x_max = tol.at("x_max");
    if (tol.count("grid_n")) spec.n = int(tol.at("grid_n"));
    return spec;
}

EulerOptions euler_from_tolerances(const std::map<std::string, double>& tol) {
    EulerOptions e;
    if (tol.count("inversion_terms")) e.terms = int(tol.at("inversion_terms"));
    if (tol.count("inversion_euler")) e.euler = int(tol.at("inversion_euler"));
    if (tol.count("inversion_a")) e.a_param = tol.at("inversion_a");
    return e;
}

sim::StrategySpec parse_strategy(const std::string& s) {
    auto get = [&](const std::string& key) {
        auto pos = s.find(key + "=");
        if (pos == std::string::npos)
            throw ConfigError("strategy spec missing '" + key + "=': " + s);
        return std::strtod(s.c_str() + pos + key.size() + 1, nullptr);
    };
    if (s.rfind("barrier", 0) == 0) return sim::StrategySpec::barrier(get("a"));
    if (s.rfind("threshold", 0) == 0) return sim::StrategySpec::threshold(get("b"), get("rate"));
    if (s == "none") return sim::StrategySpec::none();
    throw ConfigError("unknown strategy spec: " + s + " (barrier:a=..., threshold:b=...,rate=..., none)");
}

int cmd_compute_scale(const Common& c, double x_max_flag, int n_flag) {
    auto t0 = std::chrono::steady_clock::now();
    auto mc = config::resolve_model(c.model_spec);
    auto spec = grid_from_tolerances(mc.tolerances);
    if (x_max_flag > 0) spec.x_max = x_max_flag;
    if (n_flag > 0) spec.n = n_flag;
    auto g = scale::compute_scale(mc.model, c.q, spec, euler_from_tolerances(mc.tolerances),
                                  c.threads);
    fs::create_directories(c.out_dir);
    std::ofstream out(c.out_dir + "/scale.csv");
    g.write_csv(out);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(c, "compute-scale", mc.tolerances, {"scale.csv"}, wall);
    std::printf("wrote %s/scale.csv  (q=%s, Phi(q)=%s, n=%zu, method=%s)\n", c.out_dir.c_str(),
                f17(c.q).c_str(), f17(g.phi_q).c_str(), g.xs.size(), g.method.c_str());
    return 0;
}

int cmd_analyze_shape(const Common& c, double x_max_flag) {
    auto t0 = std::chrono::steady_clock::now();
    auto mc = config::resolve_model(c.model_spec);
    auto spec = grid_from_tolerances(mc.tolerances);
    if (x_max_flag > 0) spec.x_max = x_max_flag;
    auto g = scale::compute_scale(mc.model, c.q, spec, euler_from_tolerances(mc.tolerances),
                                  c.threads);
    std::vector<ShapeReport> reps;
    std::string astar_line = "a_star: not localized on this grid\n";
    try {
        auto astar = shape::find_a_star(g);
        astar_line = "a_star=" + f17(astar.value) + " w1_min=" + f17(astar.w1_min) +
                     " plateau=[" + f17(astar.plateau_left) + "," + f17(astar.plateau_right) +
                     "]\n";
        reps.push_back(shape::convexity_report(g.xs, g.w1, astar.value + 0.05, g.xs.back(),
                                               ShapeReport::Property::convex, 1e-7));
    } catch (const NumericError&) {
    }
    reps.push_back(shape::convexity_report(g.xs, g.w_tilt, g.xs.front(), g.xs.back(),
                                           ShapeReport::Property::concave, 1e-7));
    double xu = shape::uq_resolvable_upper(g);
    reps.push_back(shape::convexity_report(g.xs, g.u_q, std::min(0.05, xu / 2), xu,
                                           ShapeReport::Property::non_increasing, 1e-7));
    reps.push_back(shape::convexity_report(g.xs, g.u_q, std::min(0.05, xu / 2), xu,
                                           ShapeReport::Property::convex, 1e-7));
    auto sc = shape::smoothness_class(mc.model);
    const char* lvl = sc.level == shape::SmoothLevel::C2      ? "C2"
                      : sc.level == shape::SmoothLevel::C1    ? "C1"
                      : sc.level == shape::SmoothLevel::not_C1 ? "not_C1"
                                                               : "unknown";
    fs::create_directories(c.out_dir);
    std::ofstream out(c.out_dir + "/shape_report.txt");
    out << astar_line;
    out << "smoothness=" << lvl << " reason=\"" << sc.reason << "\"";
    if (sc.level == shape::SmoothLevel::not_C1) out << " atom_location=" << f17(sc.atom_location);
    out << "\n";
    for (const auto& r : reps) out << r.to_kv() << "\n";
    out << shape_table(reps);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(c, "analyze-shape", mc.tolerances, {"shape_report.txt"}, wall);
    std::cout << astar_line << "smoothness=" << lvl << "\n" << shape_table(reps);
    bool all = true;
    for (const auto& r : reps) all &= r.pass;
    return all ? 0 : 1;
}

int cmd_solve(const Common& c, int hjb_points) {
    auto t0 = std::chrono::steady_clock::now();
    auto mc = config::resolve_model(c.model_spec);
    definetti::SolveOptions so;
    so.grid = grid_from_tolerances(mc.tolerances);
    so.inversion = euler_from_tolerances(mc.tolerances);
    if (mc.tolerances.count("hjb_tol_rel")) so.hjb_tol_rel = mc.tolerances.at("hjb_tol_rel");
    if (hjb_points > 0) so.hjb_points = hjb_points;
    so.n_threads = c.threads;
    auto sol = definetti::solve(mc.model, c.q, so);
    fs::create_directories(c.out_dir);
    {
        std::ofstream v(c.out_dir + "/value.csv");
        v << "# snlevy-definetti q=" << f17(c.q) << " a_star=" << f17(sol.a_star.value) << "\n";
        v << "x,v\n";
        for (std::size_t i = 0; i < sol.xs.size(); ++i)
            v << f17(sol.xs[i]) << "," << f17(sol.value[i]) << "\n";
    }
    {
        std::ofstream res(c.out_dir + "/residuals.csv");
        res << "x,residual,side\n";
        for (std::size_t i = 0; i < sol.hjb_xs_interior.size(); ++i)
            res << f17(sol.hjb_xs_interior[i]) << "," << f17(sol.hjb_interior[i]) << ",interior\n";
        for (std::size_t i = 0; i < sol.hjb_xs_exterior.size(); ++i)
            res << f17(sol.hjb_xs_exterior[i]) << "," << f17(sol.hjb_exterior[i]) << ",exterior\n";
    }
    {
        std::ofstream verdict(c.out_dir + "/verdict.txt");
        verdict << "a_star=" << f17(sol.a_star.value) << "\n"
                << "w1_min=" << f17(sol.a_star.w1_min) << "\n"
                << "plateau=[" << f17(sol.a_star.plateau_left) << ","
                << f17(sol.a_star.plateau_right) << "]\n"
                << "pi_log_convex=" << (sol.pi_log_convex.pass ? 1 : 0) << "\n"
                << "condition_13=" << (sol.condition_13.pass ? 1 : 0) << " "
                << sol.condition_13.note << "\n"
                << "max_interior_residual_rel=" << f17(sol.max_interior_rel) << "\n"
                << "max_exterior_residual_rel=" << f17(sol.max_exterior_rel) << "\n"
                << "verdict=" << definetti::verdict_name(sol.verdict) << "\n";
        if (!sol.notes.empty()) verdict << "notes=" << sol.notes << "\n";
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(c, "solve-definetti", mc.tolerances,
                   {"value.csv", "residuals.csv", "verdict.txt"}, wall);
    std::printf("a*=%s  verdict=%s  (interior %.2e, exterior %.2e of tolerance)\n",
                f17(sol.a_star.value).c_str(), definetti::verdict_name(sol.verdict),
                sol.max_interior_rel, sol.max_exterior_rel);
    switch (sol.verdict) {
        case definetti::Verdict::optimal_certified: return 0;
        case definetti::Verdict::condition_violated: return 2;
        case definetti::Verdict::inconclusive: return 3;
    }
    return 3;
}

int cmd_simulate(const Common& c, const std::string& strategy, double x0, long paths,
                 std::uint64_t seed, double horizon, bool path_csv) {
    auto t0 = std::chrono::steady_clock::now();
    auto mc = config::resolve_model(c.model_spec);
    auto strat = parse_strategy(strategy);
    sim::SimOptions so;
    so.n_threads = c.threads;
    so.horizon = horizon;
    std::vector<double> vals;
    if (path_csv) so.path_values = &vals;
    auto est = sim::simulate_value(mc.model, strat, c.q, x0, paths, seed, so);
    fs::create_directories(c.out_dir);
    std::vector<std::string> artifacts{"estimate.txt"};
    {
        std::ofstream out(c.out_dir + "/estimate.txt");
        out << "strategy=" << strat.label() << "\n"
            << "mean=" << f17(est.mean) << "\n"
            << "std_error=" << f17(est.std_error) << "\n"
            << "n_paths=" << est.n_paths << "\n"
            << "seed=" << est.seed << "\n"
            << "horizon=" << f17(est.horizon) << "\n"
            << "truncation_bias_bound=" << f17(est.truncation_bias_bound) << "\n"
            << "ruin_fraction=" << f17(est.ruin_fraction) << "\n";
    }
    if (path_csv) {
        std::ofstream out(c.out_dir + "/paths.csv");
        out << "path,value\n";
        for (std::size_t i = 0; i < vals.size(); ++i)
            out << i << "," << f17(vals[i]) << "\n";
        artifacts.push_back("paths.csv");
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(c, "simulate", mc.tolerances, artifacts, wall, seed);
    std::printf("%s: mean=%s se=%s ruin=%.4f (paths=%ld, horizon=%s)\n", strat.label().c_str(),
                f17(est.mean).c_str(), f17(est.std_error).c_str(), est.ruin_fraction, paths,
                f17(est.horizon).c_str());
    return 0;
}

int cmd_verify(const Common& c, std::uint64_t seed, long mc_paths, long dom_paths) {
    auto t0 = std::chrono::steady_clock::now();
    verify::Options vo;
    vo.out_dir = c.out_dir;
    vo.seed = seed;
    vo.n_threads = c.threads;
    if (mc_paths > 0) vo.mc_paths = mc_paths;
    if (dom_paths > 0) vo.dominance_paths = dom_paths;
    fs::create_directories(c.out_dir);
    auto results = verify::run_acceptance(vo);
    auto table = verify::format_table(results);
    std::cout << table;
    std::ofstream out(c.out_dir + "/verify_table.txt");
    out << table;
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Common cc = c;
    cc.model_spec = "gallery";
    cc.q = 0.0;
    write_manifest(cc, "verify", {}, {"verify_table.txt", "run1/", "run2/"}, wall, seed);
    return verify::all_pass(results) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scale functions, shape certificates and dividend barriers for spectrally "
                 "negative Levy processes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common c;
    double x_max_flag = 0.0, horizon = 0.0, x0 = 0.0;
    int n_flag = 0, hjb_points = 0;
    long paths = 100000, mc_paths = 0, dom_paths = 0;
    std::uint64_t seed = 12345;
    std::string strategy = "barrier:a=1";
    bool path_csv = false;

    auto add_common = [&](CLI::App* sub, bool needs_model, bool needs_q) {
        if (needs_model) sub->add_option("--model", c.model_spec, "model file or gallery:<name>")
                             ->required();
        if (needs_q) sub->add_option("--q", c.q, "discount rate q");
        sub->add_option("--out", c.out_dir, "output directory");
        sub->add_option("--threads", c.threads, "worker threads (default: SNLEVY_THREADS or hw)");
    };

    auto* sc_cmd = app.add_subcommand("compute-scale", "tabulate W^(q) and its derivatives");
    add_common(sc_cmd, true, true);
    sc_cmd->add_option("--x-max", x_max_flag, "grid upper end");
    sc_cmd->add_option("--n", n_flag, "grid points");

    auto* sh_cmd = app.add_subcommand("analyze-shape", "certify shape properties of W^(q)");
    add_common(sh_cmd, true, true);
    sh_cmd->add_option("--x-max", x_max_flag, "grid upper end");

    auto* so_cmd = app.add_subcommand("solve-definetti", "optimal dividend barrier and HJB check");
    add_common(so_cmd, true, true);
    so_cmd->add_option("--hjb-points", hjb_points, "residual sample points per side");

    auto* si_cmd = app.add_subcommand("simulate", "Monte Carlo dividend valuation");
    add_common(si_cmd, true, true);
    si_cmd->add_option("--strategy", strategy, "barrier:a=V | threshold:b=V,rate=V | none");
    si_cmd->add_option("--x0", x0, "initial surplus")->required();
    si_cmd->add_option("--paths", paths, "number of paths");
    si_cmd->add_option("--seed", seed, "RNG seed");
    si_cmd->add_option("--horizon", horizon, "time horizon (default 40/q)");
    si_cmd->add_flag("--path-csv", path_csv, "dump per-path values (capped at 10k)");

    auto* ve_cmd = app.add_subcommand("verify", "run the bundled acceptance suite");
    add_common(ve_cmd, false, false);
    ve_cmd->add_option("--seed", seed, "RNG seed for the stochastic criteria");
    ve_cmd->add_option("--paths", mc_paths, "Monte Carlo paths for the cross-check");
    ve_cmd->add_option("--dominance-paths", dom_paths, "paths for the dominance scan");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (sc_cmd->parsed()) return cmd_compute_scale(c, x_max_flag, n_flag);
        if (sh_cmd->parsed()) return cmd_analyze_shape(c, x_max_flag);
        if (so_cmd->parsed()) return cmd_solve(c, hjb_points);
        if (si_cmd->parsed()) return cmd_simulate(c, strategy, x0, paths, seed, horizon, path_csv);
        if (ve_cmd->parsed()) return cmd_verify(c, seed, mc_paths, dom_paths);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const StageError& e) {
        std::cerr << "numeric failure " << e.what() << "\n";
        return 65;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 65;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
    return 0;
}
