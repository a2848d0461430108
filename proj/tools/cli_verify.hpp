#pragma once

#include <cstdint>
#include <string>

namespace lcf::cli {

struct CorpusParams {
    std::string family = "mixed";
    std::size_t count = 5;
    std::uint64_t seed = 7;
    std::size_t dim = 1;
    double lo = -16.0;
    double hi = 16.0;
    std::size_t nodes = 0;  // 0: 2049 / 257 / 33 for dim 1 / 2 / 3
};

struct VerifyParams {
    std::string suite = "all";
    CorpusParams corpus;
    double lambda = 0.5;
    std::string fixture;  // "counterexample" replaces the ball-inequality corpus
    std::string out_dir = "lcf-report";
    unsigned jobs = 1;
    double eps_tot = 0.02;
    double eps_ineq = 1e-6;
    double y_lo = 0.0, y_hi = 0.0;  // dual grid; equal bounds mean "same as x"
    std::size_t y_nodes = 0;
};

std::size_t default_nodes(std::size_t dim);

/// Runs the suite and writes <out_dir>/<suite>.csv and <suite>.json; returns
/// the process exit code (0 all passed, 1 a verdict failed, 3 numeric abort).
int run_verify(const VerifyParams& params);

}  // namespace lcf::cli
