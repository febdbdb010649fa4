#include "twosel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include "twosel/descent.hpp"
#include "twosel/ekstats.hpp"
#include "twosel/local.hpp"
#include "twosel/tamagawa.hpp"

namespace twosel {

namespace {

struct Tally {
    u64 checked = 0;
    u64 failures = 0;
    std::string first_failure;

    void check(bool ok, const std::function<std::string()>& what) {
        ++checked;
        if (ok) return;
        if (failures == 0) first_failure = what();
        ++failures;
    }
    void merge(const Tally& o) {
        if (failures == 0 && o.failures > 0) first_failure = o.first_failure;
        checked += o.checked;
        failures += o.failures;
    }
};

// Runs body(d, tally) for d in [lo, hi] split into contiguous blocks; tallies
// are merged in block order so the report is independent of the thread count.
void parallel_range(i64 lo, i64 hi, unsigned threads, Tally& out, const std::function<void(i64, Tally&)>& body) {
    if (hi < lo) return;
    threads = std::max(1u, threads);
    const i64 span = hi - lo + 1;
    const i64 blocks = std::min<i64>(span, 64);
    std::vector<Tally> parts(static_cast<std::size_t>(blocks));
    auto run_block = [&](i64 b) {
        i64 a = lo + span * b / blocks, z = lo + span * (b + 1) / blocks;
        for (i64 d = a; d < z; ++d) body(d, parts[static_cast<std::size_t>(b)]);
    };
    if (threads == 1) {
        for (i64 b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<i64> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (i64 b = next++; b < blocks; b = next++) run_block(b);
            });
    }
    for (const Tally& t : parts) out.merge(t);
}

TwistFamily make_family(const VerifyConfig& cfg, std::size_t idx) {
    TwistFamily fam(cfg.curves[idx]);
    if (cfg.fault && cfg.fault->curve_index == idx)
        fam.mutable_cache().corrupt(cfg.fault->place_index, cfg.fault->cls, cfg.fault->delta);
    return fam;
}

SuiteResult finish(std::string name, const Tally& t, std::string detail) {
    SuiteResult r;
    r.name = std::move(name);
    r.checked = t.checked;
    r.failures = t.failures;
    r.pass = t.failures == 0 && t.checked > 0;
    r.detail = t.failures ? "first failure: " + t.first_failure : std::move(detail);
    return r;
}

std::string fmt(double x, int prec = 6) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << x;
    return os.str();
}

std::vector<u64> decades(u64 from, u64 to) {
    std::vector<u64> xs;
    for (u64 x = from; x <= to; x *= 10) xs.push_back(x);
    if (xs.empty()) xs.push_back(to);
    return xs;
}

u64 splitmix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

VerifyConfig quick_verify_config() {
    VerifyConfig cfg;
    cfg.path_bound = 1500;
    cfg.cassels_bound = 60;
    cfg.local_fast_bound = 300;
    cfg.stats_xmax = 100000;
    cfg.analytic_xmax = 1000000;
    return cfg;
}

bool VerifyReport::all_pass() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass; });
}

SuiteResult suite_path_equality(const VerifyConfig& cfg) {
    Tally total;
    for (std::size_t i = 0; i < cfg.curves.size(); ++i) {
        const TwistFamily fam = make_family(cfg, i);
        parallel_range(-cfg.path_bound, cfg.path_bound, cfg.threads, total, [&](i64 d, Tally& t) {
            if (d == 0 || !is_squarefree(d) || !fam.coprime_to_bad(d)) return;
            int fast = fam.fast(d).ord2_T, slow = ord2_T_product(fam.curve(), d);
            t.check(fast == slow, [&] {
                return "curve " + to_string(fam.curve()) + " d=" + std::to_string(d) + " fast=" +
                       std::to_string(fast) + " product=" + std::to_string(slow);
            });
        });
    }
    return finish("path_equality", total, "|d| <= " + std::to_string(cfg.path_bound) + " coprime to 2 disc");
}

SuiteResult suite_cassels(const VerifyConfig& cfg) {
    Tally total;
    for (std::size_t i = 0; i < cfg.curves.size(); ++i) {
        const TwistFamily fam = make_family(cfg, i);
        parallel_range(-cfg.cassels_bound, cfg.cassels_bound, cfg.threads, total, [&](i64 d, Tally& t) {
            if (d == 0 || !is_squarefree(d)) return;
            CurveModel ed = twist(fam.curve(), d);
            int diff = phi_selmer(ed).dimension - phihat_selmer(ed).dimension;
            int product = ord2_T_product(fam.curve(), d);
            std::vector<u64> ps;
            for (i64 p : prime_divisors(d)) ps.push_back(static_cast<u64>(p));
            int cached = fam.decompose(d, ps).ord2_T;
            t.check(diff == product && diff == cached, [&] {
                return "curve " + to_string(fam.curve()) + " d=" + std::to_string(d) + " selmer diff=" +
                       std::to_string(diff) + " product=" + std::to_string(product) +
                       " decomposition=" + std::to_string(cached);
            });
        });
    }
    return finish("cassels", total, "signed |d| <= " + std::to_string(cfg.cassels_bound));
}

SuiteResult suite_local_duality(const VerifyConfig& cfg) {
    Tally total;
    std::size_t pairs = 0;
    u64 state = cfg.seed;
    while (pairs < cfg.duality_pairs) {
        state = splitmix64(state);
        const CurveModel& e = cfg.curves[state % cfg.curves.size()];
        i64 d = static_cast<i64>((state >> 8) % 4001) - 2000;
        if (d == 0 || !is_squarefree(d)) continue;
        CurveModel ed = twist(e, d);
        std::vector<Place> places = selmer_support(ed);
        for (const Place& v : places) {
            int sum = local_phi_dim(ed, v) + local_phi_hat_dim(ed, v);
            int expect = v.kind == PlaceKind::infinity ? 1 : v.kind == PlaceKind::two ? 3 : 2;
            total.check(sum == expect, [&] {
                return "curve " + to_string(ed) + " at " + v.name() + ": sum " + std::to_string(sum);
            });
            ++pairs;
        }
    }
    return finish("local_duality", total, std::to_string(pairs) + " (twisted curve, place) pairs");
}

SuiteResult suite_local_fast_slow(const VerifyConfig& cfg) {
    Tally total;
    for (const CurveModel& e : cfg.curves) {
        const TwistFamily fam(e);
        parallel_range(-cfg.local_fast_bound, cfg.local_fast_bound, cfg.threads, total, [&](i64 d, Tally& t) {
            if (d == 0 || !is_squarefree(d)) return;
            CurveModel ed = twist(e, d);
            for (i64 p : prime_divisors(d)) {
                if (p == 2 || !fam.coprime_to_bad(p)) continue;
                int fast = local_phi_dim_twist_fast(e, p, d);
                int slow = local_phi_dim(ed, Place::prime(p));
                t.check(fast == slow, [&] {
                    return "curve " + to_string(e) + " d=" + std::to_string(d) + " p=" + std::to_string(p);
                });
            }
        });
    }
    return finish("local_fast_slow", total, "good p | d, |d| <= " + std::to_string(cfg.local_fast_bound));
}

SuiteResult suite_analytic_bounds(const VerifyConfig& cfg) {
    Tally total;
    SquarefreeTable table(cfg.analytic_xmax);
    std::ostringstream detail;
    double worst_a = 0, worst_b = 0, worst_m = 0;
    for (const CurveModel& e : cfg.curves) {
        PrimeValues g(AdditiveFnSpec::curve(e), table);
        Envelopes env = ab_envelopes(g, 100, cfg.analytic_xmax);
        worst_a = std::max(worst_a, env.sup_abs_a);
        worst_b = std::max(worst_b, env.sup_abs_b2_dev);
        total.check(env.sup_abs_a <= 3.0, [&] { return "curve " + to_string(e) + " sup|A| " + fmt(env.sup_abs_a); });
        total.check(env.sup_abs_b2_dev <= 3.0,
                    [&] { return "curve " + to_string(e) + " sup|B^2 - loglog/2| " + fmt(env.sup_abs_b2_dev); });
        total.check(env.sup_abs_b_dev <= 3.0,
                    [&] { return "curve " + to_string(e) + " sup|B - sqrt(loglog/2)| " + fmt(env.sup_abs_b_dev); });
    }
    for (i64 c : {-1, -11, 3, -33}) {
        double m = mertens_envelope(c, table, 100, cfg.analytic_xmax);
        worst_m = std::max(worst_m, m);
        total.check(m <= 3.0, [&] { return "Mertens c=" + std::to_string(c) + " deviation " + fmt(m); });
    }
    detail << "x in [100, " << cfg.analytic_xmax << "]: sup|A| " << fmt(worst_a) << ", sup|B^2 - loglog/2| "
           << fmt(worst_b) << ", Mertens " << fmt(worst_m);
    return finish("analytic_bounds", total, detail.str());
}

SuiteResult suite_sieve_errors(const VerifyConfig& cfg) {
    Tally total;
    const u64 top = std::max(cfg.stats_xmax, cfg.analytic_xmax);
    SquarefreeTable table(top);
    std::ostringstream detail;
    double prev = 1e300;
    detail << "max|r_d|/X^(3/4):";
    for (u64 X : decades(10000, cfg.stats_xmax)) {
        auto rep = sieve_error_report(table, std::min<u64>(100, X), X);
        total.check(rep.front().d == 1 && rep.front().numerator() == 0,
                    [&] { return "r_1 != 0 at X=" + std::to_string(X); });
        double env = sieve_error_envelope(rep, X);
        total.check(env <= 1.0, [&] { return "envelope " + fmt(env) + " at X=" + std::to_string(X); });
        total.check(env <= prev + 0.05, [&] { return "envelope grew to " + fmt(env) + " at X=" + std::to_string(X); });
        prev = env;
        detail << ' ' << X << "->" << fmt(env, 4);
    }
    // squarefree counting function against 6X/pi^2 at every X
    const double density = 6.0 / (std::numbers::pi * std::numbers::pi);
    u64 count = 0;
    double worst = 0.0;
    u64 bad_at = 0;
    for (u64 X = 1; X <= top; ++X) {
        count += table.is_squarefree(X);
        double dev = std::fabs(static_cast<double>(count) - density * static_cast<double>(X));
        double ratio = dev / std::sqrt(static_cast<double>(X));
        worst = std::max(worst, ratio);
        if (ratio > 2.0 && bad_at == 0) bad_at = X;
    }
    total.check(bad_at == 0, [&] { return "|S(X)| - 6X/pi^2 exceeds 2 sqrt(X) at X=" + std::to_string(bad_at); });
    detail << "; sup ||S(X)| - 6X/pi^2|/sqrt(X) over X <= " << top << ": " << fmt(worst, 4);
    return finish("sieve_errors", total, detail.str());
}

SuiteResult suite_moment_envelope(const VerifyConfig& cfg) {
    Tally total;
    SquarefreeTable table(cfg.stats_xmax);
    const CurveModel e = cfg.curves.front();
    PrimeValues g(AdditiveFnSpec::curve(e), table);
    std::ostringstream detail;
    detail << "curve " << to_string(e) << " |m2/(N s^2) - 1|, |m1|/(N s):";
    double prev2 = 1e300, prev1 = 1e300;
    auto xs = decades(10000, cfg.stats_xmax);
    for (u64 X : xs) {
        SieveStats st = sieve_stats(g, X, 2);
        double n = static_cast<double>(st.N), s = st.sigma_X;
        double dev2 = std::fabs(st.moment_sums.at(2) / (n * s * s) - 1.0);
        double dev1 = std::fabs(st.moment_sums.at(1)) / (n * s);
        total.check(dev2 <= prev2 + 0.02, [&] { return "second-moment deviation grew at X=" + std::to_string(X); });
        total.check(dev1 <= prev1 + 0.02, [&] { return "first-moment deviation grew at X=" + std::to_string(X); });
        if (X == xs.back()) {
            total.check(dev2 <= 0.2, [&] { return "second-moment deviation " + fmt(dev2); });
            total.check(dev1 <= 0.2, [&] { return "first-moment deviation " + fmt(dev1); });
        }
        prev2 = dev2;
        prev1 = dev1;
        detail << ' ' << X << "->(" << fmt(dev2, 4) << ", " << fmt(dev1, 4) << ')';
    }
    return finish("moment_envelope", total, detail.str());
}

VerifyReport run_verify(const VerifyConfig& cfg) {
    if (cfg.curves.empty()) throw std::invalid_argument("verify: no curves");
    VerifyReport rep;
    rep.suites.push_back(suite_path_equality(cfg));
    rep.suites.push_back(suite_cassels(cfg));
    rep.suites.push_back(suite_local_duality(cfg));
    rep.suites.push_back(suite_local_fast_slow(cfg));
    rep.suites.push_back(suite_analytic_bounds(cfg));
    rep.suites.push_back(suite_sieve_errors(cfg));
    rep.suites.push_back(suite_moment_envelope(cfg));
    return rep;
}

}  // namespace twosel
