#pragma once

// ord_2 of the Tamagawa ratio T(E^d / E'^d) along the twist family.
//
// Two independent routes:
//   * decomposition: g(d) + sum over v | 2 Delta inf of (dim H^1_phi(Q_v, C^d) - 1),
//     with g read off Legendre symbols and the bad-place terms from a finite
//     table keyed by local square classes;
//   * product: the local image computed from scratch at every place dividing
//     2 d disc(E) and infinity.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "twosel/arith.hpp"
#include "twosel/curve.hpp"
#include "twosel/local.hpp"

namespace twosel {

struct TwistRecord {
    i64 d = 1;
    int g = 0;
    int bad_offset = 0;
    int ord2_T = 0;
    int d2_lower_bound = 0;
    bool bad_support = false;  // d shares a prime with 2 disc(E)
    std::optional<int> sel_phi;
    std::optional<int> sel_phihat;
};

/// Per-curve data shared by every twist: discriminant classes, the bad
/// places and the local dimension table. Immutable after construction
/// except for the explicit fault hook on the cache.
class TwistFamily {
public:
    explicit TwistFamily(const CurveModel& e);

    const CurveModel& curve() const { return curve_; }
    i64 delta() const { return delta_; }
    i64 delta_prime() const { return delta_prime_; }
    /// 2 and the odd primes of B (A^2 - 4B); g ignores these.
    std::span<const i64> bad_primes() const { return bad_primes_; }
    /// infinity, 2, odd bad primes: the places summed in bad_offset.
    std::span<const Place> bad_places() const { return cache_.places(); }
    const LocalDimCache& cache() const { return cache_; }
    LocalDimCache& mutable_cache() { return cache_; }

    bool coprime_to_bad(i64 d) const;

    /// ((Delta'/p) - (Delta/p)) / 2 for good odd p, 0 for bad p.
    int g_prime(u64 p) const;
    int g_of(u64 d) const;
    int g_of_primes(std::span<const u64> primes) const;

    int bad_offset(i64 d) const;
    /// bad_offset from the local classes of d at each bad place (same order).
    int bad_offset_of_classes(std::span<const i64> classes) const;

    /// Requires gcd(d, 2 disc) = 1; throws std::invalid_argument otherwise.
    TwistRecord fast(i64 d) const;
    /// Any squarefree d; primes_of_abs_d lists the primes of |d|.
    TwistRecord decompose(i64 d, std::span<const u64> primes_of_abs_d) const;

private:
    CurveModel curve_;
    i64 delta_;
    i64 delta_prime_;
    std::vector<i64> bad_primes_;
    LocalDimCache cache_;
};

/// g(d) = sum over p | d, p not dividing 2 Delta, of ((Delta'/p) - (Delta/p)) / 2.
int g_of(const CurveModel& e, u64 d);

TwistRecord ord2_T_fast(const CurveModel& e, i64 d);

/// Sum over v in {inf, 2} and p | d disc(E) of (dim H^1_phi(Q_v, C^d) - 1),
/// every local image computed directly on the twisted model.
int ord2_T_product(const CurveModel& e, i64 d);

/// max(t - 2, 0).
int selmer_lower_bound(int t);

struct SweepOptions {
    u64 xmax = 1;
    bool signed_twists = false;
    double audit_fraction = 0.0;
    u64 seed = 0;
    unsigned threads = 1;
    i64 descent_bound = 0;  // fill sel_phi / sel_phihat for |d| <= bound
    u64 chunk = u64{1} << 15;
};

struct SweepSummary {
    u64 records = 0;
    u64 audited = 0;
    u64 audit_mismatches = 0;
    std::vector<i64> mismatched;  // first few offending d
};

/// True when d is selected for the product-path audit at the given fraction.
bool audit_selected(i64 d, u64 seed, double fraction);

/// One record per squarefree d <= xmax (then -d when signed), ordered by |d|
/// then sign. Records reach `sink` in that order, in chunks. Bad-support d are
/// computed through the same class-keyed decomposition and flagged.
SweepSummary sweep(const TwistFamily& family, const SquarefreeTable& table, const SweepOptions& opts,
                   const std::function<void(std::span<const TwistRecord>)>& sink);

}  // namespace twosel
