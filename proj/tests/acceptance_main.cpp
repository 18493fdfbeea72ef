// Acceptance suite runner: one pass/fail line per criterion, non-zero exit on
// any failure.  The same engine backs the CLI `verify` subcommand.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "snlevy/verification.hpp"

int main(int argc, char** argv) {
    snlevy::verify::Options opt;
    opt.out_dir = "acceptance_artifacts";
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            opt.mc_paths = 40000;
            opt.dominance_paths = 8000;
        } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            opt.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
            opt.out_dir = argv[++i];
        }
    }
    auto results = snlevy::verify::run_acceptance(opt);
    std::fputs(snlevy::verify::format_table(results).c_str(), stdout);
    bool ok = snlevy::verify::all_pass(results);
    std::printf("acceptance: %s\n", ok ? "ALL CRITERIA PASS" : "FAILURES PRESENT");
    return ok ? 0 : 1;
}
