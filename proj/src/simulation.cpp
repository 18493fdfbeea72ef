#include "snlevy/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <thread>

#include "snlevy/errors.hpp"
#include "snlevy/interpolation.hpp"
#include "snlevy/laplace_inversion.hpp"

namespace snlevy {
namespace sim {

namespace {
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = std::uint64_t(a) * b;
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
}
} // namespace

void PhiloxStream::block(const std::uint32_t ctr_in[4], const std::uint32_t key_in[2],
                         std::uint32_t out[4]) {
    std::uint32_t c0 = ctr_in[0], c1 = ctr_in[1], c2 = ctr_in[2], c3 = ctr_in[3];
    std::uint32_t k0 = key_in[0], k1 = key_in[1];
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k0 += kW0;
            k1 += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c0, hi0, lo0);
        mulhilo(kM1, c2, hi1, lo1);
        std::uint32_t n0 = hi1 ^ c1 ^ k0;
        std::uint32_t n1 = lo1;
        std::uint32_t n2 = hi0 ^ c3 ^ k1;
        std::uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t path) {
    key_[0] = std::uint32_t(seed);
    key_[1] = std::uint32_t(seed >> 32);
    path_[0] = std::uint32_t(path);
    path_[1] = std::uint32_t(path >> 32);
}

void PhiloxStream::refill() {
    std::uint32_t ctr[4] = {path_[0], path_[1], std::uint32_t(block_),
                            std::uint32_t(block_ >> 32)};
    std::uint32_t out[4];
    block(ctr, key_, out);
    ++block_;
    auto to_u01 = [](std::uint32_t hi, std::uint32_t lo) {
        std::uint64_t v = (std::uint64_t(hi) << 32) | lo;
        return double(v >> 11) * 0x1.0p-53 + 0x1.0p-54; // (0,1)
    };
    buf_[0] = to_u01(out[0], out[1]);
    buf_[1] = to_u01(out[2], out[3]);
    pos_ = 0;
}

double PhiloxStream::next_u01() {
    if (pos_ >= 2) refill();
    return buf_[pos_++];
}

double PhiloxStream::next_exp(double rate) { return -std::log(next_u01()) / rate; }

StrategySpec StrategySpec::barrier(double a) {
    if (!(a >= 0)) throw DomainError("barrier level must be >= 0");
    StrategySpec s;
    s.kind = Kind::barrier;
    s.a = a;
    return s;
}
StrategySpec StrategySpec::threshold(double b, double rate) {
    if (!(b >= 0) || !(rate >= 0)) throw DomainError("threshold needs b >= 0, rate >= 0");
    StrategySpec s;
    s.kind = Kind::threshold;
    s.b = b;
    s.rate = rate;
    return s;
}
StrategySpec StrategySpec::none() { return StrategySpec{}; }

std::string StrategySpec::label() const {
    char buf[64];
    switch (kind) {
        case Kind::barrier: std::snprintf(buf, sizeof buf, "barrier:a=%.6g", a); break;
        case Kind::threshold:
            std::snprintf(buf, sizeof buf, "threshold:b=%.6g,rate=%.6g", b, rate);
            break;
        case Kind::none: std::snprintf(buf, sizeof buf, "none"); break;
    }
    return buf;
}

namespace {

// Inverse-CDF claim sampler.  Exponential segments invert in closed form; the
// piecewise power family uses a monotone quantile table built from the exact
// tail (resolution ~1e-10 in probability).
class ClaimSampler {
public:
    explicit ClaimSampler(const JumpMeasure& jm) : jm_(&jm) {
        if (!jm.finite_activity || !(jm.mass > 0))
            throw DomainError("simulation requires a finite-activity claim measure");
        mass_ = jm.mass;
        if (jm.kind == JumpKind::finite_activity_atoms) {
            mode_ = Mode::atoms;
            return;
        }
        if (jm.family == "piecewise_power") {
            mode_ = Mode::table;
            build_table();
            return;
        }
        mode_ = Mode::tail_closed;
    }

    double sample(double u) const { // u in (0,1)
        switch (mode_) {
            case Mode::atoms: {
                double acc = 0.0;
                double target = u * mass_;
                for (const auto& a : jm_->atoms) {
                    acc += a.mass;
                    if (target <= acc) return a.location;
                }
                return jm_->atoms.back().location;
            }
            case Mode::tail_closed: {
                // solve Pibar(x) = (1-u) * mass by bisection on the closed tail
                double target = (1.0 - u) * mass_;
                double lo = 0.0, hi = 1.0;
                while (jm_->tail(hi) > target && hi < 1e9) hi *= 2.0;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if (jm_->tail(mid) > target)
                        lo = mid;
                    else
                        hi = mid;
                    if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
                }
                return 0.5 * (lo + hi);
            }
            case Mode::table:
                return table_->eval(u);
        }
        return 0.0;
    }

private:
    enum class Mode { atoms, tail_closed, table };
    void build_table() {
        // quantile nodes from the exact tail on a log grid
        auto xs = log_spaced(1e-7, 1e7, 4096);
        std::vector<double> us, qs;
        us.reserve(xs.size());
        qs.reserve(xs.size());
        double prev_u = -1.0;
        for (double x : xs) {
            double u = 1.0 - jm_->tail(x) / mass_;
            if (u <= prev_u + 1e-12 || u <= 0.0 || u >= 1.0) continue;
            us.push_back(u);
            qs.push_back(x);
            prev_u = u;
        }
        us.insert(us.begin(), 0.0);
        qs.insert(qs.begin(), 0.0);
        us.push_back(1.0);
        qs.push_back(qs.back() * 2.0);
        table_ = std::make_shared<PchipInterpolant>(us, qs);
    }
    const JumpMeasure* jm_;
    double mass_ = 0.0;
    Mode mode_ = Mode::tail_closed;
    std::shared_ptr<PchipInterpolant> table_;
};

struct PathResult {
    double value = 0.0;
    bool ruined = false;
};

// One exact event-driven path.  Dividends paid over [t1, t2] at rate r
// contribute r (e^{-q t1} - e^{-q t2}) / q.
PathResult run_path(const LevyModel& m, const ClaimSampler& sampler, const StrategySpec& st,
                    double q, double x0, double horizon, double escape, PhiloxStream& rng) {
    const double c = m.bv_drift; // premium rate
    const double lam = m.jumps.mass;
    PathResult res;
    double t = 0.0;
    double U = x0;
    if (st.kind == StrategySpec::Kind::barrier && x0 > st.a) {
        res.value += x0 - st.a; // lump sum at t = 0 (undiscounted)
        U = st.a;
    }
    auto disc_flow = [&](double rate, double t1, double t2) {
        return rate * (std::exp(-q * t1) - std::exp(-q * t2)) / q;
    };
    while (t < horizon) {
        double E = rng.next_exp(lam);
        double t_claim = std::min(t + E, horizon);
        bool claim_happens = t + E < horizon;
        // evolve deterministically on [t, t_claim)
        if (st.kind == StrategySpec::Kind::barrier) {
            double a = st.a;
            if (U < a) {
                double t_hit = t + (a - U) / c;
                if (t_hit >= t_claim) {
                    U += c * (t_claim - t);
                } else {
                    res.value += disc_flow(c, t_hit, t_claim);
                    U = a;
                }
            } else {
                res.value += disc_flow(c, t, t_claim);
            }
        } else if (st.kind == StrategySpec::Kind::threshold) {
            double seg_t = t;
            double b = st.b, r = st.rate;
            while (seg_t < t_claim) {
                if (U < b) {
                    double t_hit = seg_t + (b - U) / c;
                    if (t_hit >= t_claim) {
                        U += c * (t_claim - seg_t);
                        seg_t = t_claim;
                    } else {
                        U = b;
                        seg_t = t_hit;
                    }
                } else if (r >= c) {
                    // pinned at the threshold: net payout rate is the premium
                    res.value += disc_flow(c, seg_t, t_claim);
                    seg_t = t_claim;
                } else {
                    // drifts upward above b while paying at the nominal rate
                    res.value += disc_flow(r, seg_t, t_claim);
                    U += (c - r) * (t_claim - seg_t);
                    seg_t = t_claim;
                }
            }
        } else { // none
            U += c * (t_claim - t);
        }
        t = t_claim;
        if (!claim_happens) break;
        double Y = sampler.sample(rng.next_u01());
        U -= Y;
        if (U < 0) {
            res.ruined = true;
            break;
        }
        if (st.kind == StrategySpec::Kind::none && escape > 0 && U > escape) break;
    }
    return res;
}

struct Accum {
    double sum = 0.0, sum2 = 0.0;
    long ruins = 0;
};

} // namespace

SimEstimate simulate_value(const LevyModel& m, const StrategySpec& strat, double q, double x0,
                           long n_paths, std::uint64_t seed, const SimOptions& opt) {
    if (!(q > 0)) throw DomainError("simulate_value requires q > 0");
    if (!(x0 >= 0)) throw DomainError("simulate_value requires x0 >= 0");
    if (m.sigma != 0.0)
        throw DomainError("exact event-driven simulation requires sigma = 0 "
                          "(no Euler mode for Gaussian models)");
    if (m.variation != Variation::bounded || !m.jumps.finite_activity)
        throw DomainError("exact event-driven simulation requires a finite-activity "
                          "bounded-variation model");
    ClaimSampler sampler(m.jumps);
    const double horizon = opt.horizon > 0 ? opt.horizon : 40.0 / q;
    const double escape =
        strat.kind == StrategySpec::Kind::none
            ? (opt.escape_level > 0 ? opt.escape_level : x0 + 35.0)
            : 0.0;

    // fixed-size chunks keep the reduction order independent of threading
    const long chunk_size = 4096;
    const long n_chunks = (n_paths + chunk_size - 1) / chunk_size;
    std::vector<Accum> chunks(n_chunks);
    std::vector<double> dump;
    if (opt.path_values) dump.assign(std::min<long>(n_paths, 10000), 0.0);

    auto run_chunk = [&](long ci) {
        Accum acc;
        long lo = ci * chunk_size, hi = std::min(n_paths, lo + chunk_size);
        std::vector<double> vals;
        vals.reserve(hi - lo);
        for (long p = lo; p < hi; ++p) {
            PhiloxStream rng(seed, std::uint64_t(p));
            auto r = run_path(m, sampler, strat, q, x0, horizon, escape, rng);
            vals.push_back(r.value);
            if (r.ruined) ++acc.ruins;
            if (opt.path_values && p < (long)dump.size()) dump[p] = r.value;
        }
        acc.sum = pairwise_sum(vals.data(), vals.size());
        for (auto& v : vals) v *= v;
        acc.sum2 = pairwise_sum(vals.data(), vals.size());
        chunks[ci] = acc;
    };

    int nt = resolve_thread_count(opt.n_threads);
    if (nt <= 1 || n_chunks == 1) {
        for (long ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
    } else {
        std::vector<std::thread> pool;
        std::atomic<long> next{0};
        for (int w = 0; w < std::min<long>(nt, n_chunks); ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    long ci = next.fetch_add(1);
                    if (ci >= n_chunks) return;
                    run_chunk(ci);
                }
            });
        for (auto& th : pool) th.join();
    }
    std::vector<double> sums(n_chunks), sums2(n_chunks);
    long ruins = 0;
    for (long ci = 0; ci < n_chunks; ++ci) {
        sums[ci] = chunks[ci].sum;
        sums2[ci] = chunks[ci].sum2;
        ruins += chunks[ci].ruins;
    }
    double S = pairwise_sum(sums.data(), sums.size());
    double S2 = pairwise_sum(sums2.data(), sums2.size());
    SimEstimate est;
    est.n_paths = n_paths;
    est.seed = seed;
    est.horizon = horizon;
    est.mean = S / double(n_paths);
    double var = std::max(0.0, S2 / double(n_paths) - est.mean * est.mean);
    est.std_error = std::sqrt(var / double(n_paths));
    est.ruin_fraction = double(ruins) / double(n_paths);
    est.truncation_bias_bound = std::exp(-q * horizon) * (x0 + m.bv_drift / q +
                                                          (strat.kind == StrategySpec::Kind::barrier ? strat.a : 0.0));
    if (opt.path_values) *opt.path_values = std::move(dump);
    return est;
}

StrategyComparison compare_strategies(const LevyModel& m, double q, double x0,
                                      const std::vector<StrategySpec>& strategies, long n_paths,
                                      std::uint64_t seed, const SimOptions& opt) {
    if (strategies.empty()) throw DomainError("compare_strategies: no strategies");
    ClaimSampler sampler(m.jumps);
    if (m.sigma != 0.0 || m.variation != Variation::bounded)
        throw DomainError("compare_strategies requires a bounded-variation model with sigma=0");
    const double horizon = opt.horizon > 0 ? opt.horizon : 40.0 / q;
    const std::size_t S = strategies.size();

    struct ChunkAcc {
        std::vector<double> sum, sum2, dsum, dsum2;
        std::vector<long> ruins;
    };
    const long chunk_size = 4096;
    const long n_chunks = (n_paths + chunk_size - 1) / chunk_size;
    std::vector<ChunkAcc> chunks(n_chunks);

    auto run_chunk = [&](long ci) {
        ChunkAcc acc;
        acc.sum.assign(S, 0.0);
        acc.sum2.assign(S, 0.0);
        acc.dsum.assign(S, 0.0);
        acc.dsum2.assign(S, 0.0);
        acc.ruins.assign(S, 0);
        long lo = ci * chunk_size, hi = std::min(n_paths, lo + chunk_size);
        std::vector<std::vector<double>> vals(S);
        for (auto& v : vals) v.reserve(hi - lo);
        for (long p = lo; p < hi; ++p) {
            double v0 = 0.0;
            for (std::size_t s = 0; s < S; ++s) {
                // common random numbers: every strategy replays the stream
                PhiloxStream rng(seed, std::uint64_t(p));
                auto r = run_path(m, sampler, strategies[s], q, x0, horizon, 0.0, rng);
                vals[s].push_back(r.value);
                if (r.ruined) ++acc.ruins[s];
                if (s == 0) v0 = r.value;
            }
            (void)v0;
        }
        for (std::size_t s = 0; s < S; ++s) {
            auto& v = vals[s];
            acc.sum[s] = pairwise_sum(v.data(), v.size());
            std::vector<double> sq(v.size()), df(v.size()), df2(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                sq[i] = v[i] * v[i];
                df[i] = v[i] - vals[0][i];
                df2[i] = df[i] * df[i];
            }
            acc.sum2[s] = pairwise_sum(sq.data(), sq.size());
            acc.dsum[s] = pairwise_sum(df.data(), df.size());
            acc.dsum2[s] = pairwise_sum(df2.data(), df2.size());
        }
        chunks[ci] = std::move(acc);
    };

    int nt = resolve_thread_count(opt.n_threads);
    if (nt <= 1 || n_chunks == 1) {
        for (long ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
    } else {
        std::vector<std::thread> pool;
        std::atomic<long> next{0};
        for (int w = 0; w < std::min<long>(nt, n_chunks); ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    long ci = next.fetch_add(1);
                    if (ci >= n_chunks) return;
                    run_chunk(ci);
                }
            });
        for (auto& th : pool) th.join();
    }

    StrategyComparison cmp;
    cmp.strategies = strategies;
    cmp.estimates.resize(S);
    cmp.diff_vs_first.assign(S, 0.0);
    cmp.diff_se.assign(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        std::vector<double> a(n_chunks), b(n_chunks), d(n_chunks), d2(n_chunks);
        long ruins = 0;
        for (long ci = 0; ci < n_chunks; ++ci) {
            a[ci] = chunks[ci].sum[s];
            b[ci] = chunks[ci].sum2[s];
            d[ci] = chunks[ci].dsum[s];
            d2[ci] = chunks[ci].dsum2[s];
            ruins += chunks[ci].ruins[s];
        }
        double Sv = pairwise_sum(a.data(), a.size());
        double Sv2 = pairwise_sum(b.data(), b.size());
        double Sd = pairwise_sum(d.data(), d.size());
        double Sd2 = pairwise_sum(d2.data(), d2.size());
        SimEstimate& e = cmp.estimates[s];
        e.n_paths = n_paths;
        e.seed = seed;
        e.horizon = horizon;
        e.mean = Sv / double(n_paths);
        e.std_error = std::sqrt(std::max(0.0, Sv2 / n_paths - e.mean * e.mean) / n_paths);
        e.ruin_fraction = double(ruins) / double(n_paths);
        e.truncation_bias_bound = std::exp(-q * horizon) * (x0 + m.bv_drift / q);
        cmp.diff_vs_first[s] = Sd / double(n_paths);
        double dvar = std::max(0.0, Sd2 / n_paths - cmp.diff_vs_first[s] * cmp.diff_vs_first[s]);
        cmp.diff_se[s] = std::sqrt(dvar / n_paths);
    }
    cmp.best_index = 0;
    for (std::size_t s = 1; s < S; ++s)
        if (cmp.estimates[s].mean > cmp.estimates[cmp.best_index].mean) cmp.best_index = int(s);
    cmp.first_beaten = false;
    for (std::size_t s = 1; s < S; ++s)
        if (cmp.diff_vs_first[s] > 3.0 * std::max(cmp.diff_se[s], 1e-300)) cmp.first_beaten = true;
    return cmp;
}

} // namespace sim
} // namespace snlevy
