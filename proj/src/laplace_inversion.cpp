#include "snlevy/laplace_inversion.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "snlevy/errors.hpp"

namespace snlevy {

double euler_combine(const std::vector<double>& re_terms, double t, const EulerOptions& opt) {
    const int M = opt.terms;
    const int E = opt.euler;
    if ((int)re_terms.size() < M + E + 1)
        throw DomainError("euler_combine: not enough contour samples");
    std::vector<double> partial(M + E + 1);
    double acc = 0.5 * re_terms[0];
    double sign = -1.0;
    for (int k = 1; k <= M + E; ++k) {
        acc += sign * re_terms[k];
        sign = -sign;
        if (k >= M) partial[k] = acc;
    }
    // binomial averaging of the last E+1 partial sums
    double avg = 0.0;
    double binom = 1.0; // C(E, 0)
    double norm = std::ldexp(1.0, -E);
    for (int j = 0; j <= E; ++j) {
        avg += binom * norm * partial[M + j];
        binom = binom * double(E - j) / double(j + 1);
    }
    return std::exp(0.5 * opt.a_param) / t * avg;
}

double euler_invert(const LaplaceTransform& F, double t, const EulerOptions& opt) {
    if (!(t > 0)) throw DomainError("euler_invert requires t > 0");
    const double a = opt.a_param / (2.0 * t);
    std::vector<double> terms(opt.terms + opt.euler + 1);
    for (int k = 0; k <= opt.terms + opt.euler; ++k)
        terms[k] = F(std::complex<double>(a, k * M_PI / t)).real();
    return euler_combine(terms, t, opt);
}

std::vector<double> euler_invert_grid(const LaplaceTransform& F, const std::vector<double>& ts,
                                      const EulerOptions& opt, int n_threads) {
    std::vector<double> out(ts.size());
    int nt = resolve_thread_count(n_threads);
    if (nt <= 1 || ts.size() < 16) {
        for (std::size_t i = 0; i < ts.size(); ++i) out[i] = euler_invert(F, ts[i], opt);
        return out;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (ts.size() + nt - 1) / nt;
    for (int w = 0; w < nt; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(ts.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            for (std::size_t i = lo; i < hi; ++i) out[i] = euler_invert(F, ts[i], opt);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

double talbot_invert(const LaplaceTransform& F, double t, int M) {
    if (!(t > 0)) throw DomainError("talbot_invert requires t > 0");
    const double r = 2.0 * M / (5.0 * t);
    double sum = 0.5 * std::exp(r * t) * F(std::complex<double>(r, 0.0)).real();
    for (int k = 1; k < M; ++k) {
        double th = k * M_PI / M;
        double cot = std::cos(th) / std::sin(th);
        std::complex<double> s(r * th * cot, r * th);
        double sigma = th + (th * cot - 1.0) * cot;
        std::complex<double> val =
            std::exp(s * t) * F(s) * std::complex<double>(1.0, sigma);
        sum += val.real();
    }
    return sum * r / M;
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SNLEVY_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

} // namespace snlevy
