#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fplab {

/// Outcome of one randomized inequality sweep. min_margin is the smallest
/// scale-normalized slack seen; negative beyond the tolerance means failure.
struct SuiteResult {
    std::string name;
    std::size_t samples = 0;
    double min_margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

/// Registered suite names in execution order.
const std::vector<std::string>& verify_suite_names();

/// Default sample count for a suite.
std::size_t default_samples(const std::string& suite);

/// Runs one suite; deterministic in (seed, samples). Throws std::invalid_argument
/// for an unknown name or zero samples.
SuiteResult run_verify_suite(const std::string& suite, std::uint64_t seed, std::size_t samples);

}  // namespace fplab
