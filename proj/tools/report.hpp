#pragma once

// JSON / CSV emission for the twosel command line. Every document carries a
// header object (tool, version, command, config echo, seed); nothing depends
// on the clock or the thread count.

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "twosel/ekstats.hpp"
#include "twosel/tamagawa.hpp"
#include "twosel/verify.hpp"

namespace twosel::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kTool = "twosel";
inline constexpr const char* kVersion = "1.0.0";

json header(const std::string& command, const json& config, u64 seed);

/// "# key: value" lines for CSV outputs.
void write_csv_header(std::ostream& os, const json& hdr);

json analyze_json(const CurveModel& e);
void analyze_pretty(std::ostream& os, const CurveModel& e);

/// Statistics of a sweep over S(X) (positive d) for one curve.
struct SweepStatsInput {
    const TwistFamily* family = nullptr;
    const SquarefreeTable* table = nullptr;
    u64 X = 0;
    std::vector<int> r_thresholds{1, 2, 3};
    u64 model_trials = 1000000;
    u64 seed = 1;
    unsigned threads = 1;
};

struct SweepCollector {
    std::vector<double> g;             // positive d, in order
    std::vector<double> ord2T;         // positive d
    std::vector<double> ord2T_coprime; // positive d coprime to 2 disc
    std::vector<double> ord2T_signed;  // every record
    u64 descent_rows = 0;
    u64 cassels_mismatches = 0;
    void add(const TwistRecord& r);
};

json sieve_stats_json(const SieveStats& st);

json sweep_stats_json(const SweepStatsInput& in, const SweepCollector& col, const SweepSummary& summary,
                      bool signed_twists);

void write_record_csv_row(std::ostream& os, const TwistRecord& r);
inline constexpr const char* kRecordColumns = "d,g,bad_offset,ord2_T,d2_lower_bound,bad_support,sel_phi,sel_phihat";

/// Stats for an arbitrary additive function over S(X).
json ek_json(const PrimeValues& g, u64 X, u64 trials, u64 seed, unsigned threads,
             std::vector<std::pair<double, u64>>* histogram_out);

json verify_json(const VerifyReport& rep);
void verify_pretty(std::ostream& os, const VerifyReport& rep);

json sievestats_json(const SquarefreeTable& table, u64 X, u64 dmax);

}  // namespace twosel::report
