#pragma once

// The cross-check battery behind `twosel verify`: every exact identity and
// measured envelope the library promises, run at fixed bounds.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twosel/arith.hpp"
#include "twosel/curve.hpp"

namespace twosel {

struct SuiteResult {
    std::string name;
    bool pass = true;
    u64 checked = 0;
    u64 failures = 0;
    std::string detail;  // deterministic summary, also the first failure if any
};

/// Shift one stored local dimension of one curve's table before the run.
struct CacheFault {
    std::size_t curve_index = 0;
    std::size_t place_index = 1;  // the place 2
    i64 cls = 1;
    int delta = 1;
};

struct VerifyConfig {
    std::vector<CurveModel> curves{{1, 3}, {0, 2}, {-1, 5}};
    i64 path_bound = 10000;          // |d| bound for fast == product
    i64 cassels_bound = 500;         // |d| bound for the Selmer identity
    std::size_t duality_pairs = 60;  // sampled (twisted curve, place) pairs
    i64 local_fast_bound = 1000;     // |d| bound for the per-prime dimension formula
    u64 stats_xmax = 1000000;        // largest X for the moment and sieve envelopes
    u64 analytic_xmax = 10000000;    // largest x for the A, B and Mertens envelopes
    u64 seed = 1;
    unsigned threads = 1;
    std::optional<CacheFault> fault;
};

/// The quick configuration used by tests: same suites, smaller bounds.
VerifyConfig quick_verify_config();

struct VerifyReport {
    std::vector<SuiteResult> suites;
    bool all_pass() const;
};

VerifyReport run_verify(const VerifyConfig& cfg);

// Individual suites, exposed for tests and the acceptance binary.
SuiteResult suite_path_equality(const VerifyConfig& cfg);
SuiteResult suite_cassels(const VerifyConfig& cfg);
SuiteResult suite_local_duality(const VerifyConfig& cfg);
SuiteResult suite_local_fast_slow(const VerifyConfig& cfg);
SuiteResult suite_analytic_bounds(const VerifyConfig& cfg);
SuiteResult suite_sieve_errors(const VerifyConfig& cfg);
SuiteResult suite_moment_envelope(const VerifyConfig& cfg);

}  // namespace twosel
