#pragma once

// Erdos-Kac machinery for additive functions on squarefree integers:
// A(x), B(x), the truncation Y(X), mu_X / sigma_X, moment sums against the
// Gaussian moments, sieve errors r_d, Mertens-type sums, empirical CDFs,
// distances, and the independent-primes model used as a test oracle.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "twosel/arith.hpp"
#include "twosel/curve.hpp"

namespace twosel {

class TwistFamily;

/// An additive function on squarefree integers, given by its values on primes.
class AdditiveFnSpec {
public:
    using PrimeFn = std::function<double(u64)>;

    AdditiveFnSpec(std::string name, PrimeFn fn);

    static AdditiveFnSpec zero();
    /// g(p) = 1 on every prime: g(n) = omega(n).
    static AdditiveFnSpec omega();
    /// g(p) = ((Delta'/p) - (Delta/p)) / 2 for odd p not dividing disc(E), else 0.
    static AdditiveFnSpec curve(const CurveModel& e);
    /// Explicit values; primes not listed map to `fallback`.
    static AdditiveFnSpec table(std::map<u64, double> values, double fallback = 0.0);
    /// Parses "p value" lines; '#' starts a comment. Throws std::invalid_argument.
    static AdditiveFnSpec parse_table(const std::string& text);

    const std::string& name() const { return name_; }
    /// Value at a prime; throws std::domain_error when |g(p)| > 1.
    double at(u64 p) const;

private:
    std::string name_;
    PrimeFn fn_;
};

/// g evaluated once on every prime of a sieve table (memoized per prime).
class PrimeValues {
public:
    PrimeValues(const AdditiveFnSpec& spec, const SquarefreeTable& table);

    const SquarefreeTable& table() const { return *table_; }
    std::span<const std::uint32_t> primes() const { return primes_; }
    std::span<const double> values() const { return values_; }
    /// g at prime p; p must be a prime of the table.
    double at(u64 p) const;
    /// Sum of g(p) over primes p | n with p <= y, n squarefree in range.
    double g_truncated(u64 n, double y) const;
    double g(u64 n) const;

private:
    const SquarefreeTable* table_;
    std::span<const std::uint32_t> primes_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Prime sums

/// (A(x), B(x)) with A = sum g(p)/p and B^2 = sum g(p)^2/p over p <= x.
std::pair<double, double> ab_of(const PrimeValues& g, u64 x);
std::pair<double, double> ab_of(const AdditiveFnSpec& spec, u64 x);

/// sum over p <= x of (1 + (c/p))/p minus log log x. (c/2) is the Kronecker symbol.
/// Throws std::invalid_argument for square c (including c = 0).
double mertens_check(i64 c, u64 x);
double mertens_check(i64 c, const SquarefreeTable& table, u64 x);

/// A step function of x compared against f(x) = scale * log log x:
/// the supremum of |S(x) - f(x)| over real x in [lo, hi], where S(x) is a
/// sum over primes p <= x of `term(p)`.
double prime_sum_envelope(const SquarefreeTable& table, u64 lo, u64 hi, const std::function<double(u64)>& term,
                          double scale);

struct Envelopes {
    double sup_abs_a = 0.0;           // sup |A(x)|
    double sup_abs_b2_dev = 0.0;      // sup |B(x)^2 - (1/2) log log x|
    double sup_abs_b_dev = 0.0;       // sup |B(x) - sqrt((1/2) log log x)|
};
/// Suprema over real x in [lo, hi] for the given prime values.
Envelopes ab_envelopes(const PrimeValues& g, u64 lo, u64 hi);

/// sup over x in [lo, hi] of |mertens_check(c, x)|.
double mertens_envelope(i64 c, const SquarefreeTable& table, u64 lo, u64 hi);

// ---------------------------------------------------------------------------
// Sieve statistics

struct SieveStats {
    u64 X = 0;
    u64 N = 0;  // |S(X)|
    double A_x = 0.0;
    double B_x = 0.0;
    double Y_X = 0.0;
    double mu_X = 0.0;
    double sigma_X = 0.0;
    std::map<int, double> moment_sums;  // k -> sum over S(X) of (g_Y(n) - mu_X)^k
};

/// Y(X) = X^(1 / B^(2/3)), never below 2; the prime sums below clamp it to X.
double truncation_y(double x, double b);

/// All SieveStats fields; moments k = 0..kmax (kmax <= 6).
SieveStats sieve_stats(const PrimeValues& g, u64 X, int kmax = 6);

/// sum over p | n, p <= y of g(p).
double truncated_g(const PrimeValues& g, u64 n, double y);

/// sum over n in S(X) of (g_{Y(X)}(n) - mu_X)^k.
double moment_sum(const PrimeValues& g, u64 X, int k);

/// C_k = Gamma(k+1) / (2^(k/2) Gamma(k/2 + 1)) for even k, 0 for odd k.
double gaussian_moment(int k);

/// Standard normal CDF.
double gaussian_cdf(double z);

// ---------------------------------------------------------------------------
// Empirical distributions

class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;
    explicit EmpiricalDistribution(std::vector<double> samples);

    std::size_t count() const { return sorted_.size(); }
    std::span<const double> sorted() const { return sorted_; }
    double mean() const { return mean_; }
    /// Central moment of order k in 0..6.
    double central_moment(int k) const;
    double variance() const { return central_moment(2); }
    /// Fraction of samples <= z.
    double cdf(double z) const;
    /// Fraction of samples < z.
    double cdf_below(double z) const;
    /// Fraction of samples >= z.
    double tail(double z) const { return 1.0 - cdf_below(z); }
    /// Distinct values with their counts, ascending.
    std::vector<std::pair<double, u64>> histogram() const;
    /// Affine image (x - shift) / scale; scale must be positive.
    EmpiricalDistribution standardized(double shift, double scale) const;

private:
    std::vector<double> sorted_;
    double mean_ = 0.0;
    double moments_[7] = {};
};

/// One-sample KS statistic sup_z |F_emp(z) - F(z)| against a continuous CDF,
/// evaluated on both sides of every jump.
double ks_distance(const EmpiricalDistribution& emp, const std::function<double(double)>& model_cdf);
/// Two-sample KS statistic sup_z |F1(z) - F2(z)|.
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Wasserstein-1 distance between two empirical distributions.
double wasserstein1(const EmpiricalDistribution& a, const EmpiricalDistribution& b);
/// Wasserstein-1 distance to the standard normal law.
double wasserstein1_gaussian(const EmpiricalDistribution& emp);

// ---------------------------------------------------------------------------
// Sieve errors

struct SieveError {
    u64 d = 1;
    u64 count = 0;  // |{n in S(X) : d | n}|
    u64 sigma = 1;  // sigma(d)
    u64 N = 0;      // |S(X)|
    /// r_d = count - N / sigma, as the exact fraction num / sigma.
    i64 numerator() const { return static_cast<i64>(count * sigma) - static_cast<i64>(N); }
    double value() const { return static_cast<double>(numerator()) / static_cast<double>(sigma); }
};

/// r_d for every squarefree d <= d_max. Requires 1 <= d_max <= X <= table bound.
std::vector<SieveError> sieve_error_report(const SquarefreeTable& table, u64 d_max, u64 X);

/// max over the report of |r_d| / X^(3/4).
double sieve_error_envelope(std::span<const SieveError> report, u64 X);

// ---------------------------------------------------------------------------
// Independence model

struct IndependenceModelOptions {
    u64 trials = 1000000;
    u64 seed = 1;
    unsigned threads = 1;
    /// Primes considered are those <= min(prime_bound, table bound).
    u64 prime_bound = 0;  // 0 means X
};

/// Samples sum over p <= X of xi_p g(p) with independent xi_p ~ Bernoulli(1/(p+1)).
EmpiricalDistribution independence_model(const PrimeValues& g, u64 X, const IndependenceModelOptions& opts);

/// ord2 T(E^d/E'^d) for positive squarefree d as g(d) plus a bad-place offset
/// indexed by the local square classes of d, each class held as a bit mask:
/// place 2 uses bits 0 (-1), 1 (2), 2 (5); the k-th odd bad prime q uses bits
/// 3+2k (nonresidue) and 4+2k (q). Classes of a product are XORs of masks.
class Ord2TClassModel {
public:
    explicit Ord2TClassModel(const TwistFamily& family);

    std::uint32_t prime_mask(u64 p) const;
    int prime_g(u64 p) const;
    int value(int g, std::uint32_t mask) const { return g + offset_[mask]; }
    /// ord2 T for d = product of the given distinct primes.
    int evaluate(std::span<const u64> primes) const;

private:
    const TwistFamily* family_;
    std::vector<i64> odd_bad_;
    std::vector<i64> nonres_;
    std::vector<int> offset_;
};

/// Same indicators, tracked through the local square classes of the product
/// at the bad places of the family, giving a model for ord2 T(E^d/E'^d) over
/// positive squarefree d. With `coprime_only` the bad primes are never drawn.
EmpiricalDistribution ord2T_independence_model(const TwistFamily& family, const SquarefreeTable& table, u64 X,
                                               const IndependenceModelOptions& opts, bool coprime_only = false);

}  // namespace twosel
