#include "twosel/ekstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "twosel/tamagawa.hpp"

namespace twosel {

namespace {

// compensated summation
struct Kahan {
    long double sum = 0.0L;
    long double c = 0.0L;
    void add(long double x) {
        long double y = x - c;
        long double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

double loglog(double x) {
    return std::log(std::log(x));
}

u64 splitmix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// splitmix64 stream; one per Monte-Carlo trial
class TrialRng {
public:
    explicit TrialRng(u64 seed) : state_(seed) {}
    u64 next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        u64 z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1)
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // uniform in (0, 1]
    double unit_open() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

private:
    u64 state_;
};

u64 trial_seed(u64 master, u64 t) {
    return splitmix64(master ^ splitmix64(t + 0x632be59bd9b4e019ULL));
}

// Independent Bernoulli(q[i]) draws for a nonincreasing q, visiting only the
// successes: geometric skips under the current envelope, then thinning.
template <class F>
void sample_decreasing(std::span<const double> q, std::span<const double> log1m_q, TrialRng& rng, F&& on_pick) {
    const std::size_t n = q.size();
    std::size_t i = 0;
    while (i < n) {
        double skip = std::floor(std::log(rng.unit_open()) / log1m_q[i]);
        if (skip >= static_cast<double>(n - i)) return;
        std::size_t j = i + static_cast<std::size_t>(skip);
        if (rng.unit() * q[i] < q[j]) on_pick(j);
        i = j + 1;
    }
}

template <class F>
void parallel_trials(u64 trials, unsigned threads, F&& body) {
    threads = std::max(1u, threads);
    if (threads == 1 || trials < 1024) {
        body(u64{0}, trials);
        return;
    }
    std::vector<std::jthread> pool;
    u64 per = (trials + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        u64 lo = std::min(trials, t * per), hi = std::min(trials, lo + per);
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
}

u64 count_squarefree(const SquarefreeTable& table, u64 X) {
    u64 n = 0;
    for (u64 m = 1; m <= X; ++m) n += table.is_squarefree(m);
    return n;
}

void require_range(const SquarefreeTable& table, u64 x, const char* who) {
    if (x > table.bound()) throw std::invalid_argument(std::string(who) + ": x exceeds the sieve bound");
}

}  // namespace

// ---------------------------------------------------------------------------
// AdditiveFnSpec

AdditiveFnSpec::AdditiveFnSpec(std::string name, PrimeFn fn) : name_(std::move(name)), fn_(std::move(fn)) {
    if (!fn_) throw std::invalid_argument("AdditiveFnSpec: empty prime function");
}

AdditiveFnSpec AdditiveFnSpec::zero() {
    return {"zero", [](u64) { return 0.0; }};
}

AdditiveFnSpec AdditiveFnSpec::omega() {
    return {"omega", [](u64) { return 1.0; }};
}

AdditiveFnSpec AdditiveFnSpec::curve(const CurveModel& e) {
    auto fam = std::make_shared<const TwistFamily>(e);
    return {"curve " + to_string(e), [fam](u64 p) { return static_cast<double>(fam->g_prime(p)); }};
}

AdditiveFnSpec AdditiveFnSpec::table(std::map<u64, double> values, double fallback) {
    auto vals = std::make_shared<const std::map<u64, double>>(std::move(values));
    return {"table", [vals, fallback](u64 p) {
                auto it = vals->find(p);
                return it == vals->end() ? fallback : it->second;
            }};
}

AdditiveFnSpec AdditiveFnSpec::parse_table(const std::string& text) {
    std::map<u64, double> values;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long p;
        double v;
        if (!(ls >> p)) continue;
        std::string rest;
        if (!(ls >> v) || (ls >> rest))
            throw std::invalid_argument("table line " + std::to_string(lineno) + ": expected 'prime value'");
        if (p < 2 || !is_prime(p)) throw std::invalid_argument("table line " + std::to_string(lineno) + ": not a prime");
        if (!(std::fabs(v) <= 1.0))
            throw std::invalid_argument("table line " + std::to_string(lineno) + ": |g(p)| must be <= 1");
        values[static_cast<u64>(p)] = v;
    }
    return table(std::move(values));
}

double AdditiveFnSpec::at(u64 p) const {
    double v = fn_(p);
    if (!(std::fabs(v) <= 1.0)) throw std::domain_error("additive function value |g(" + std::to_string(p) + ")| > 1");
    return v;
}

// ---------------------------------------------------------------------------
// PrimeValues

PrimeValues::PrimeValues(const AdditiveFnSpec& spec, const SquarefreeTable& table)
    : table_(&table), primes_(table.primes()) {
    values_.reserve(primes_.size());
    for (std::uint32_t p : primes_) values_.push_back(spec.at(p));
}

double PrimeValues::at(u64 p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) throw std::invalid_argument("PrimeValues::at: not a tabulated prime");
    return values_[static_cast<std::size_t>(it - primes_.begin())];
}

double PrimeValues::g_truncated(u64 n, double y) const {
    if (n == 0 || n > table_->bound() || !table_->is_squarefree(n))
        throw std::invalid_argument("g_truncated: n must be squarefree within the sieve range");
    u64 ps[16];
    int k = table_->factor_into(n, ps);
    double s = 0.0;
    for (int i = 0; i < k; ++i)
        if (static_cast<double>(ps[i]) <= y) s += at(ps[i]);
    return s;
}

double PrimeValues::g(u64 n) const {
    return g_truncated(n, std::numeric_limits<double>::infinity());
}

// ---------------------------------------------------------------------------
// Prime sums

std::pair<double, double> ab_of(const PrimeValues& g, u64 x) {
    if (x < 2) throw std::invalid_argument("ab_of: x must be >= 2");
    require_range(g.table(), x, "ab_of");
    auto ps = g.primes();
    auto vs = g.values();
    Kahan a, b2;
    for (std::size_t i = 0; i < ps.size() && ps[i] <= x; ++i) {
        a.add(vs[i] / static_cast<long double>(ps[i]));
        b2.add(vs[i] * vs[i] / static_cast<long double>(ps[i]));
    }
    return {static_cast<double>(a.sum), std::sqrt(static_cast<double>(b2.sum))};
}

std::pair<double, double> ab_of(const AdditiveFnSpec& spec, u64 x) {
    SquarefreeTable table(std::max<u64>(x, 2));
    return ab_of(PrimeValues(spec, table), x);
}

double mertens_check(i64 c, const SquarefreeTable& table, u64 x) {
    if (c == 0 || (c > 0 && is_square(c))) throw std::invalid_argument("mertens_check: c must be a nonsquare");
    if (x < 3) throw std::invalid_argument("mertens_check: x must be >= 3");
    require_range(table, x, "mertens_check");
    Kahan s;
    for (std::uint32_t p : table.primes()) {
        if (p > x) break;
        s.add((1.0L + prime_symbol(c, p)) / p);
    }
    return static_cast<double>(s.sum) - loglog(static_cast<double>(x));
}

double mertens_check(i64 c, u64 x) {
    SquarefreeTable table(std::max<u64>(x, 3));
    return mertens_check(c, table, x);
}

namespace {

// sup over real x in [lo, hi] of |S(x) - f(x)| for S a right-continuous step
// function jumping at primes and f nondecreasing
double step_envelope(const SquarefreeTable& table, u64 lo, u64 hi, const std::function<long double(u64)>& term,
                     const std::function<long double(long double)>& transform,
                     const std::function<double(double)>& f) {
    if (lo < 3 || lo > hi) throw std::invalid_argument("envelope: need 3 <= lo <= hi");
    require_range(table, hi, "envelope");
    Kahan s;
    auto ps = table.primes();
    std::size_t i = 0;
    for (; i < ps.size() && ps[i] <= lo; ++i) s.add(term(ps[i]));
    double sup = std::fabs(static_cast<double>(transform(s.sum)) - f(static_cast<double>(lo)));
    for (; i < ps.size() && ps[i] <= hi; ++i) {
        double fx = f(static_cast<double>(ps[i]));
        sup = std::max(sup, std::fabs(static_cast<double>(transform(s.sum)) - fx));  // just before the jump
        s.add(term(ps[i]));
        sup = std::max(sup, std::fabs(static_cast<double>(transform(s.sum)) - fx));
    }
    sup = std::max(sup, std::fabs(static_cast<double>(transform(s.sum)) - f(static_cast<double>(hi))));
    return sup;
}

}  // namespace

double prime_sum_envelope(const SquarefreeTable& table, u64 lo, u64 hi, const std::function<double(u64)>& term,
                          double scale) {
    return step_envelope(
        table, lo, hi, [&](u64 p) { return static_cast<long double>(term(p)); }, [](long double s) { return s; },
        [scale](double x) { return scale * loglog(x); });
}

Envelopes ab_envelopes(const PrimeValues& g, u64 lo, u64 hi) {
    require_range(g.table(), hi, "ab_envelopes");
    auto ps = g.primes();
    if (lo < 3 || lo > hi) throw std::invalid_argument("ab_envelopes: need 3 <= lo <= hi");
    auto vs = g.values();
    Envelopes env;
    Kahan a, b2;
    auto visit = [&](double x) {
        double av = static_cast<double>(a.sum), bv2 = static_cast<double>(b2.sum);
        double ll = 0.5 * loglog(x);
        env.sup_abs_a = std::max(env.sup_abs_a, std::fabs(av));
        env.sup_abs_b2_dev = std::max(env.sup_abs_b2_dev, std::fabs(bv2 - ll));
        env.sup_abs_b_dev = std::max(env.sup_abs_b_dev, std::fabs(std::sqrt(bv2) - std::sqrt(std::max(ll, 0.0))));
    };
    std::size_t i = 0;
    for (; i < ps.size() && ps[i] <= lo; ++i) {
        a.add(vs[i] / static_cast<long double>(ps[i]));
        b2.add(vs[i] * vs[i] / static_cast<long double>(ps[i]));
    }
    visit(static_cast<double>(lo));
    for (; i < ps.size() && ps[i] <= hi; ++i) {
        visit(static_cast<double>(ps[i]));
        a.add(vs[i] / static_cast<long double>(ps[i]));
        b2.add(vs[i] * vs[i] / static_cast<long double>(ps[i]));
        visit(static_cast<double>(ps[i]));
    }
    visit(static_cast<double>(hi));
    return env;
}

double mertens_envelope(i64 c, const SquarefreeTable& table, u64 lo, u64 hi) {
    if (c == 0 || (c > 0 && is_square(c))) throw std::invalid_argument("mertens_envelope: c must be a nonsquare");
    return prime_sum_envelope(
        table, lo, hi, [c](u64 p) { return (1.0 + prime_symbol(c, static_cast<i64>(p))) / static_cast<double>(p); },
        1.0);
}

// ---------------------------------------------------------------------------
// Sieve statistics

double truncation_y(double x, double b) {
    if (b <= 0.0) return x;
    double y = std::pow(x, 1.0 / std::cbrt(b * b));
    return std::max(2.0, std::min(y, x));
}

double truncated_g(const PrimeValues& g, u64 n, double y) {
    return g.g_truncated(n, y);
}

SieveStats sieve_stats(const PrimeValues& g, u64 X, int kmax) {
    if (X < 2) throw std::invalid_argument("sieve_stats: X must be >= 2");
    if (kmax < 0 || kmax > 6) throw std::invalid_argument("sieve_stats: kmax must lie in 0..6");
    SieveStats st;
    st.X = X;
    auto [a, b] = ab_of(g, X);
    st.A_x = a;
    st.B_x = b;
    st.Y_X = truncation_y(static_cast<double>(X), b);

    auto ps = g.primes();
    auto vs = g.values();
    Kahan mu, var;
    for (std::size_t i = 0; i < ps.size() && ps[i] <= st.Y_X; ++i) {
        long double q = 1.0L / (ps[i] + 1.0L);
        mu.add(vs[i] * q);
        var.add(vs[i] * vs[i] * q * (1.0L - q));
    }
    st.mu_X = static_cast<double>(mu.sum);
    st.sigma_X = std::sqrt(static_cast<double>(var.sum));

    std::vector<Kahan> sums(static_cast<std::size_t>(kmax) + 1);
    u64 n_count = 0;
    // g_Y takes few distinct values; sum powers over its histogram
    std::map<double, u64> hist;
    for (u64 n = 1; n <= X; ++n) {
        if (!g.table().is_squarefree(n)) continue;
        ++hist[g.g_truncated(n, st.Y_X)];
        ++n_count;
    }
    st.N = n_count;
    for (const auto& [v, c] : hist) {
        long double x = static_cast<long double>(v) - st.mu_X;
        long double pw = 1.0L;
        for (int k = 0; k <= kmax; ++k) {
            sums[static_cast<std::size_t>(k)].add(pw * static_cast<long double>(c));
            pw *= x;
        }
    }
    for (int k = 0; k <= kmax; ++k) st.moment_sums[k] = static_cast<double>(sums[static_cast<std::size_t>(k)].sum);
    return st;
}

double moment_sum(const PrimeValues& g, u64 X, int k) {
    SieveStats st = sieve_stats(g, X, k);
    return st.moment_sums.at(k);
}

double gaussian_moment(int k) {
    if (k < 0) throw std::invalid_argument("gaussian_moment: k must be >= 0");
    if (k % 2) return 0.0;
    return std::exp(std::lgamma(k + 1.0) - 0.5 * k * std::log(2.0) - std::lgamma(0.5 * k + 1.0));
}

double gaussian_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// ---------------------------------------------------------------------------
// Empirical distributions

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples) : sorted_(std::move(samples)) {
    std::sort(sorted_.begin(), sorted_.end());
    if (sorted_.empty()) return;
    Kahan m;
    for (double x : sorted_) m.add(x);
    mean_ = static_cast<double>(m.sum / static_cast<long double>(sorted_.size()));
    Kahan acc[7];
    for (double x : sorted_) {
        long double d = static_cast<long double>(x) - mean_, pw = 1.0L;
        for (int k = 0; k <= 6; ++k) {
            acc[k].add(pw);
            pw *= d;
        }
    }
    for (int k = 0; k <= 6; ++k) moments_[k] = static_cast<double>(acc[k].sum / static_cast<long double>(sorted_.size()));
}

double EmpiricalDistribution::central_moment(int k) const {
    if (k < 0 || k > 6) throw std::invalid_argument("central_moment: order must lie in 0..6");
    return moments_[k];
}

double EmpiricalDistribution::cdf(double z) const {
    if (sorted_.empty()) return 0.0;
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), z);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::cdf_below(double z) const {
    if (sorted_.empty()) return 0.0;
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), z);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::vector<std::pair<double, u64>> EmpiricalDistribution::histogram() const {
    std::vector<std::pair<double, u64>> out;
    for (double x : sorted_) {
        if (out.empty() || out.back().first != x)
            out.emplace_back(x, 1);
        else
            ++out.back().second;
    }
    return out;
}

EmpiricalDistribution EmpiricalDistribution::standardized(double shift, double scale) const {
    if (!(scale > 0.0)) throw std::invalid_argument("standardized: scale must be positive");
    std::vector<double> v(sorted_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (sorted_[i] - shift) / scale;
    return EmpiricalDistribution(std::move(v));
}

double ks_distance(const EmpiricalDistribution& emp, const std::function<double(double)>& model_cdf) {
    auto s = emp.sorted();
    const double n = static_cast<double>(s.size());
    if (s.empty()) throw std::invalid_argument("ks_distance: empty sample");
    double sup = 0.0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        double f = model_cdf(s[i]);
        sup = std::max({sup, std::fabs(static_cast<double>(i) / n - f), std::fabs(static_cast<double>(j) / n - f)});
        i = j;
    }
    return sup;
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    auto x = a.sorted(), y = b.sorted();
    if (x.empty() || y.empty()) throw std::invalid_argument("ks_distance: empty sample");
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double sup = 0.0;
    while (i < x.size() || j < y.size()) {
        double z = i == x.size() ? y[j] : j == y.size() ? x[i] : std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= z) ++i;
        while (j < y.size() && y[j] <= z) ++j;
        sup = std::max(sup, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return sup;
}

double wasserstein1(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    auto x = a.sorted(), y = b.sorted();
    if (x.empty() || y.empty()) throw std::invalid_argument("wasserstein1: empty sample");
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    Kahan total;
    double prev = std::min(x[0], y[0]);
    double fa = 0.0, fb = 0.0;
    while (i < x.size() || j < y.size()) {
        double z = i == x.size() ? y[j] : j == y.size() ? x[i] : std::min(x[i], y[j]);
        total.add(std::fabs(fa - fb) * (z - prev));
        while (i < x.size() && x[i] <= z) ++i;
        while (j < y.size() && y[j] <= z) ++j;
        fa = static_cast<double>(i) / na;
        fb = static_cast<double>(j) / nb;
        prev = z;
    }
    return static_cast<double>(total.sum);
}

namespace {

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// antiderivative of the normal CDF
double cdf_integral(double z) {
    return z * gaussian_cdf(z) + normal_pdf(z);
}

// integral over [lo, hi] of |c - Phi(z)|
double abs_gap_integral(double c, double lo, double hi) {
    auto plain = [](double c0, double l, double h) { return c0 * (h - l) - (cdf_integral(h) - cdf_integral(l)); };
    if (gaussian_cdf(lo) >= c) return -plain(c, lo, hi);
    if (gaussian_cdf(hi) <= c) return plain(c, lo, hi);
    double l = lo, h = hi;
    for (int it = 0; it < 200 && h - l > 1e-15 * (1.0 + std::fabs(l)); ++it) {
        double m = 0.5 * (l + h);
        (gaussian_cdf(m) < c ? l : h) = m;
    }
    double mid = 0.5 * (l + h);
    return plain(c, lo, mid) - plain(c, mid, hi);
}

}  // namespace

double wasserstein1_gaussian(const EmpiricalDistribution& emp) {
    auto s = emp.sorted();
    if (s.empty()) throw std::invalid_argument("wasserstein1_gaussian: empty sample");
    const double n = static_cast<double>(s.size());
    Kahan total;
    total.add(cdf_integral(s.front()));                                  // F_emp = 0 left of the sample
    total.add(normal_pdf(s.back()) - s.back() * (1.0 - gaussian_cdf(s.back())));  // F_emp = 1 right of it
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        if (j == s.size()) break;
        total.add(abs_gap_integral(static_cast<double>(j) / n, s[i], s[j]));
        i = j;
    }
    return static_cast<double>(total.sum);
}

// ---------------------------------------------------------------------------
// Sieve errors

std::vector<SieveError> sieve_error_report(const SquarefreeTable& table, u64 d_max, u64 X) {
    if (d_max < 1 || d_max > X) throw std::invalid_argument("sieve_error_report: need 1 <= d_max <= X");
    require_range(table, X, "sieve_error_report");
    const u64 N = count_squarefree(table, X);
    std::vector<SieveError> out;
    for (u64 d = 1; d <= d_max; ++d) {
        if (!table.is_squarefree(d)) continue;
        SieveError e;
        e.d = d;
        e.N = N;
        e.sigma = sigma_divisors(d);
        for (u64 m = d; m <= X; m += d) e.count += table.is_squarefree(m);
        out.push_back(e);
    }
    return out;
}

double sieve_error_envelope(std::span<const SieveError> report, u64 X) {
    double worst = 0.0;
    for (const SieveError& e : report) worst = std::max(worst, std::fabs(e.value()));
    return worst / std::pow(static_cast<double>(X), 0.75);
}

// ---------------------------------------------------------------------------
// Independence model

namespace {

struct Thinned {
    std::vector<double> q, log1m_q;
    void push(u64 p) {
        double qq = 1.0 / (static_cast<double>(p) + 1.0);
        q.push_back(qq);
        log1m_q.push_back(std::log1p(-qq));
    }
};

u64 model_bound(const SquarefreeTable& table, u64 X, const IndependenceModelOptions& opts) {
    u64 bound = opts.prime_bound == 0 ? X : std::min(X, opts.prime_bound);
    require_range(table, bound, "independence_model");
    return bound;
}

}  // namespace

EmpiricalDistribution independence_model(const PrimeValues& g, u64 X, const IndependenceModelOptions& opts) {
    if (opts.trials == 0) throw std::invalid_argument("independence_model: trials must be positive");
    const u64 bound = model_bound(g.table(), X, opts);
    auto ps = g.primes();
    auto vs = g.values();
    // primes with g(p) = 0 never move the sum; drop them
    Thinned th;
    std::vector<double> gv;
    for (std::size_t i = 0; i < ps.size() && ps[i] <= bound; ++i)
        if (vs[i] != 0.0) {
            th.push(ps[i]);
            gv.push_back(vs[i]);
        }
    std::vector<double> out(opts.trials);
    parallel_trials(opts.trials, opts.threads, [&](u64 lo, u64 hi) {
        for (u64 t = lo; t < hi; ++t) {
            TrialRng rng(trial_seed(opts.seed, t));
            double s = 0.0;
            sample_decreasing(th.q, th.log1m_q, rng, [&](std::size_t j) { s += gv[j]; });
            out[t] = s;
        }
    });
    return EmpiricalDistribution(std::move(out));
}

Ord2TClassModel::Ord2TClassModel(const TwistFamily& family) : family_(&family) {
    auto places = family.bad_places();
    for (const Place& v : places)
        if (v.kind == PlaceKind::odd_prime) {
            odd_bad_.push_back(v.p);
            nonres_.push_back(smallest_nonresidue(v.p));
        }
    const int bits = 3 + 2 * static_cast<int>(odd_bad_.size());
    if (bits > 24) throw std::invalid_argument("Ord2TClassModel: too many bad places");
    offset_.resize(std::size_t{1} << bits);
    std::vector<i64> classes;
    for (std::size_t mask = 0; mask < offset_.size(); ++mask) {
        classes.clear();
        std::size_t k = 0;
        for (const Place& v : places) {
            i64 c = 1;
            if (v.kind == PlaceKind::two) {
                if (mask & 1) c = -c;
                if (mask & 2) c *= 2;
                if (mask & 4) c *= 5;
            } else if (v.kind == PlaceKind::odd_prime) {
                if (mask >> (3 + 2 * k) & 1) c *= nonres_[k];
                if (mask >> (4 + 2 * k) & 1) c *= odd_bad_[k];
                ++k;
            }
            classes.push_back(c);
        }
        offset_[mask] = family.bad_offset_of_classes(classes);
    }
}

std::uint32_t Ord2TClassModel::prime_mask(u64 p) const {
    std::uint32_t m = 0;
    if (p == 2) {
        m |= 2;
    } else {
        switch (p % 8) {
            case 3: m |= 1 | 4; break;  // 3 = -5 up to squares
            case 5: m |= 4; break;
            case 7: m |= 1; break;
            default: break;
        }
    }
    for (std::size_t k = 0; k < odd_bad_.size(); ++k) {
        if (static_cast<i64>(p) == odd_bad_[k])
            m |= 1u << (4 + 2 * k);
        else if (jacobi(static_cast<i64>(p), odd_bad_[k]) == -1)
            m |= 1u << (3 + 2 * k);
    }
    return m;
}

int Ord2TClassModel::prime_g(u64 p) const {
    return family_->g_prime(p);
}

int Ord2TClassModel::evaluate(std::span<const u64> primes) const {
    int g = 0;
    std::uint32_t m = 0;
    for (u64 p : primes) {
        g += prime_g(p);
        m ^= prime_mask(p);
    }
    return value(g, m);
}

EmpiricalDistribution ord2T_independence_model(const TwistFamily& family, const SquarefreeTable& table, u64 X,
                                               const IndependenceModelOptions& opts, bool coprime_only) {
    if (opts.trials == 0) throw std::invalid_argument("ord2T_independence_model: trials must be positive");
    const u64 bound = model_bound(table, X, opts);
    const Ord2TClassModel model(family);
    auto bad = family.bad_primes();
    Thinned th;
    std::vector<std::uint32_t> pmask;
    std::vector<int> gval;
    for (std::uint32_t p : table.primes()) {
        if (p > bound) break;
        bool is_bad = std::find(bad.begin(), bad.end(), static_cast<i64>(p)) != bad.end();
        if (is_bad && coprime_only) continue;
        th.push(p);
        pmask.push_back(model.prime_mask(p));
        gval.push_back(model.prime_g(p));
    }

    std::vector<double> out(opts.trials);
    parallel_trials(opts.trials, opts.threads, [&](u64 lo, u64 hi) {
        for (u64 t = lo; t < hi; ++t) {
            TrialRng rng(trial_seed(opts.seed, t));
            int g = 0;
            std::uint32_t m = 0;
            sample_decreasing(th.q, th.log1m_q, rng, [&](std::size_t j) {
                g += gval[j];
                m ^= pmask[j];
            });
            out[t] = static_cast<double>(model.value(g, m));
        }
    });
    return EmpiricalDistribution(std::move(out));
}

}  // namespace twosel
