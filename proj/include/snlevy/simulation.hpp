#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snlevy/levy_model.hpp"

namespace snlevy {
namespace sim {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).  Streams
// are keyed by (seed, path index); identical configuration yields identical
// draws independent of threading.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t path);
    double next_u01(); // uniform on (0,1), never exactly 0 or 1
    double next_exp(double rate) ;
    static void block(const std::uint32_t ctr[4], const std::uint32_t key[2],
                      std::uint32_t out[4]);

private:
    std::uint32_t key_[2];
    std::uint32_t path_[2];
    std::uint64_t block_ = 0;
    int pos_ = 2;
    double buf_[2] = {0, 0};
    void refill();
};

struct StrategySpec {
    enum class Kind { barrier, threshold, none };
    Kind kind = Kind::none;
    double a = 0.0;    // barrier level
    double b = 0.0;    // threshold level
    double rate = 0.0; // payout rate above the threshold
    static StrategySpec barrier(double a);
    static StrategySpec threshold(double b, double rate);
    static StrategySpec none();
    std::string label() const;
};

struct SimEstimate {
    double mean = 0.0;      // discounted dividends E int e^{-qt} dL_t
    double std_error = 0.0; // sample std / sqrt(n_paths)
    long n_paths = 0;
    std::uint64_t seed = 0;
    double horizon = 0.0;
    double truncation_bias_bound = 0.0;
    double ruin_fraction = 0.0;
};

struct SimOptions {
    double horizon = 0.0;        // <= 0: 40/q, so e^{-q T} < 5e-18
    int n_threads = 0;
    // strategy `none` only: stop once the surplus exceeds this level (the
    // residual ruin probability is exponentially negligible)
    double escape_level = 0.0;   // <= 0: x0 + 35
    std::vector<double>* path_values = nullptr; // optional per-path dump
};

// Exact event-driven simulation for bounded-variation finite-activity models
// (sigma = 0): between claims the controlled surplus moves along closed-form
// linear segments and the discounted dividend flow over a pinned segment is
// integrated in closed form; there is no time-discretization bias.  Models
// with sigma > 0 or infinite activity are rejected.
SimEstimate simulate_value(const LevyModel& m, const StrategySpec& strat, double q, double x0,
                           long n_paths, std::uint64_t seed, const SimOptions& opt = {});

struct StrategyComparison {
    std::vector<StrategySpec> strategies;
    std::vector<SimEstimate> estimates;
    // difference of each strategy against strategies[0] under common random
    // numbers, with the standard error of the difference
    std::vector<double> diff_vs_first, diff_se;
    int best_index = 0;
    bool first_beaten = false; // some strategy beats strategies[0] by > 3 SE(diff)
};

// Common-random-number comparison: every strategy replays the same per-path
// claim sequence.  strategies[0] is the champion being tested.
StrategyComparison compare_strategies(const LevyModel& m, double q, double x0,
                                      const std::vector<StrategySpec>& strategies, long n_paths,
                                      std::uint64_t seed, const SimOptions& opt = {});

} // namespace sim
} // namespace snlevy
