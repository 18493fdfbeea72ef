#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace snlevy {
namespace verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double elapsed_s = 0.0;
    double limit_s = 0.0; // 0 = no runtime limit
    std::string detail;
};

struct Options {
    std::string out_dir;            // artifacts land here when non-empty
    std::uint64_t seed = 20240817;
    int n_threads = 0;
    long mc_paths = 200000;         // Monte Carlo cross-check
    long dominance_paths = 20000;   // strategy-dominance scan
};

// Runs the full acceptance suite (all ten criteria) and returns one result
// per criterion.  Deterministic for a fixed seed.
std::vector<CriterionResult> run_acceptance(const Options& opt);

std::string format_table(const std::vector<CriterionResult>& results);
bool all_pass(const std::vector<CriterionResult>& results);

} // namespace verify
} // namespace snlevy
