#include "twosel/tamagawa.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "twosel/descent.hpp"

namespace twosel {

namespace {

std::vector<Place> bad_place_list(const CurveModel& e) {
    std::vector<Place> places{Place::infinity(), Place::two()};
    for (i64 p : bad_odd_primes(e)) places.push_back(Place::prime(p));
    return places;
}

u64 abs_u64(i64 d) {
    return d < 0 ? static_cast<u64>(-(d + 1)) + 1 : static_cast<u64>(d);
}

u64 splitmix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

TwistFamily::TwistFamily(const CurveModel& e)
    : curve_(CurveModel::make(e.a, e.b)),
      delta_(delta_class(e)),
      delta_prime_(delta_prime_class(e)),
      cache_(e, bad_place_list(e)) {
    bad_primes_.push_back(2);
    for (i64 p : bad_odd_primes(e)) bad_primes_.push_back(p);
}

bool TwistFamily::coprime_to_bad(i64 d) const {
    return std::none_of(bad_primes_.begin(), bad_primes_.end(), [d](i64 p) { return d % p == 0; });
}

int TwistFamily::g_prime(u64 p) const {
    for (i64 q : bad_primes_)
        if (static_cast<u64>(q) == p) return 0;
    i64 pp = static_cast<i64>(p);
    return (jacobi(delta_prime_, pp) - jacobi(delta_, pp)) / 2;
}

int TwistFamily::g_of_primes(std::span<const u64> primes) const {
    int g = 0;
    for (u64 p : primes) g += g_prime(p);
    return g;
}

int TwistFamily::g_of(u64 d) const {
    if (d == 0) throw std::invalid_argument("g_of: d must be positive");
    int g = 0;
    for (i64 p : prime_divisors(static_cast<i64>(d))) g += g_prime(static_cast<u64>(p));
    return g;
}

int TwistFamily::bad_offset(i64 d) const {
    int off = 0;
    for (std::size_t i = 0; i < cache_.places().size(); ++i) off += cache_.dim(i, d) - 1;
    return off;
}

int TwistFamily::bad_offset_of_classes(std::span<const i64> classes) const {
    if (classes.size() != cache_.places().size()) throw std::invalid_argument("bad_offset_of_classes: wrong arity");
    int off = 0;
    for (std::size_t i = 0; i < classes.size(); ++i) off += cache_.dim(i, classes[i]) - 1;
    return off;
}

TwistRecord TwistFamily::fast(i64 d) const {
    if (d == 0 || !is_squarefree(d)) throw std::invalid_argument("ord2_T_fast: d must be squarefree and nonzero");
    if (!coprime_to_bad(d))
        throw std::invalid_argument("ord2_T_fast: d = " + std::to_string(d) + " shares a prime with 2 disc(E)");
    TwistRecord r;
    r.d = d;
    r.g = g_of(abs_u64(d));
    r.bad_offset = bad_offset(d);
    r.ord2_T = r.g + r.bad_offset;
    r.d2_lower_bound = selmer_lower_bound(r.ord2_T);
    return r;
}

TwistRecord TwistFamily::decompose(i64 d, std::span<const u64> primes_of_abs_d) const {
    TwistRecord r;
    r.d = d;
    r.g = g_of_primes(primes_of_abs_d);
    r.bad_offset = bad_offset(d);
    r.ord2_T = r.g + r.bad_offset;
    r.d2_lower_bound = selmer_lower_bound(r.ord2_T);
    r.bad_support = !coprime_to_bad(d);
    return r;
}

int g_of(const CurveModel& e, u64 d) {
    const i64 delta = delta_class(e), delta_p = delta_prime_class(e);
    const i64 two_disc_b = e.b, two_disc_q = e.quad_disc();
    int g = 0;
    for (i64 p : prime_divisors(static_cast<i64>(d))) {
        if (p == 2 || two_disc_b % p == 0 || two_disc_q % p == 0) continue;
        g += (jacobi(delta_p, p) - jacobi(delta, p)) / 2;
    }
    return g;
}

TwistRecord ord2_T_fast(const CurveModel& e, i64 d) {
    return TwistFamily(e).fast(d);
}

int ord2_T_product(const CurveModel& e, i64 d) {
    CurveModel ed = twist(e, d);
    std::vector<i64> primes = bad_odd_primes(e);
    for (i64 p : prime_divisors(d))
        if (p != 2) primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

    int total = local_phi_dim(ed, Place::infinity()) - 1;
    total += local_phi_dim(ed, Place::two()) - 1;
    for (i64 p : primes) total += local_phi_dim(ed, Place::prime(p)) - 1;
    return total;
}

int selmer_lower_bound(int t) {
    return std::max(t - 2, 0);
}

bool audit_selected(i64 d, u64 seed, double fraction) {
    if (fraction <= 0.0) return false;
    if (fraction >= 1.0) return true;
    u64 h = splitmix64(seed ^ splitmix64(static_cast<u64>(d)));
    return static_cast<double>(h >> 11) * 0x1.0p-53 < fraction;
}

namespace {

struct ChunkResult {
    std::vector<TwistRecord> records;
    u64 audited = 0;
    std::vector<i64> mismatched;
};

void run_chunk(const TwistFamily& family, const SquarefreeTable& table, const SweepOptions& opts, u64 lo, u64 hi,
               ChunkResult& out) {
    u64 primes[16];
    for (u64 n = lo; n < hi; ++n) {
        if (!table.is_squarefree(n)) continue;
        int k = table.factor_into(n, primes);
        std::span<const u64> ps(primes, static_cast<std::size_t>(k));
        for (int sign : {1, -1}) {
            if (sign < 0 && !opts.signed_twists) break;
            i64 d = sign * static_cast<i64>(n);
            TwistRecord r = family.decompose(d, ps);
            if (opts.descent_bound > 0 && static_cast<i64>(n) <= opts.descent_bound) {
                CurveModel ed = twist(family.curve(), d);
                r.sel_phi = phi_selmer(ed).dimension;
                r.sel_phihat = phihat_selmer(ed).dimension;
            }
            if (audit_selected(d, opts.seed, opts.audit_fraction)) {
                ++out.audited;
                if (ord2_T_product(family.curve(), d) != r.ord2_T) out.mismatched.push_back(d);
            }
            out.records.push_back(r);
        }
    }
}

}  // namespace

SweepSummary sweep(const TwistFamily& family, const SquarefreeTable& table, const SweepOptions& opts,
                   const std::function<void(std::span<const TwistRecord>)>& sink) {
    if (opts.xmax < 1) throw std::invalid_argument("sweep: xmax must be >= 1");
    if (opts.xmax > table.bound()) throw std::invalid_argument("sweep: xmax exceeds the sieve bound");
    if (opts.audit_fraction < 0.0 || opts.audit_fraction > 1.0)
        throw std::invalid_argument("sweep: audit fraction must lie in [0, 1]");
    const u64 chunk = std::max<u64>(opts.chunk, 1);
    const unsigned threads = std::max(1u, opts.threads);
    const u64 n_chunks = (opts.xmax + chunk - 1) / chunk;

    SweepSummary summary;
    for (u64 first = 0; first < n_chunks; first += threads) {
        u64 last = std::min(n_chunks, first + threads);
        std::vector<ChunkResult> results(last - first);
        auto work = [&](u64 c) {
            u64 lo = 1 + c * chunk;
            u64 hi = std::min(opts.xmax + 1, lo + chunk);
            run_chunk(family, table, opts, lo, hi, results[c - first]);
        };
        if (threads == 1) {
            work(first);
        } else {
            std::vector<std::jthread> pool;
            for (u64 c = first; c < last; ++c) pool.emplace_back(work, c);
        }
        // merge in chunk order so output is independent of the thread count
        for (auto& res : results) {
            summary.records += res.records.size();
            summary.audited += res.audited;
            summary.audit_mismatches += res.mismatched.size();
            for (i64 d : res.mismatched)
                if (summary.mismatched.size() < 16) summary.mismatched.push_back(d);
            sink(res.records);
        }
    }
    return summary;
}

}  // namespace twosel
