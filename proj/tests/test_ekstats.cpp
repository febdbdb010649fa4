#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "twosel/ekstats.hpp"
#include "twosel/tamagawa.hpp"

using namespace twosel;

namespace {

int euler(i64 a, i64 p) {
    i64 r = ((a % p) + p) % p;
    if (r == 0) return 0;
    return powmod(static_cast<u64>(r), static_cast<u64>((p - 1) / 2), static_cast<u64>(p)) == 1 ? 1 : -1;
}

// composite Simpson rule for the normal density on [0, z]
double simpson_cdf(double z) {
    const int n = 20000;
    double h = z / n, s = 0.0;
    auto f = [](double w) { return std::exp(-0.5 * w * w); };
    for (int i = 0; i <= n; ++i) s += f(i * h) * (i == 0 || i == n ? 1 : i % 2 ? 4 : 2);
    return 0.5 + s * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
}

std::vector<double> normal_samples(std::size_t n, u64 seed) {
    // Box-Muller over a fixed engine
    std::mt19937_64 eng(seed);
    std::vector<double> out;
    while (out.size() < n) {
        double u1 = (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        out.push_back(std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2));
    }
    return out;
}

bool trial_squarefree(u64 n) {
    for (u64 p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("gaussian moments") {
    CHECK(gaussian_moment(0) == doctest::Approx(1.0));
    CHECK(gaussian_moment(2) == doctest::Approx(1.0));
    CHECK(gaussian_moment(4) == doctest::Approx(3.0));
    CHECK(gaussian_moment(6) == doctest::Approx(15.0));
    CHECK(gaussian_moment(1) == 0.0);
    CHECK(gaussian_moment(5) == 0.0);
}

TEST_CASE("gaussian cdf") {
    CHECK(gaussian_cdf(0.0) == 0.5);
    CHECK(gaussian_cdf(40.0) == 1.0);
    CHECK(gaussian_cdf(-40.0) < 1e-300);
    CHECK(std::fabs(gaussian_cdf(1.0) - 0.8413447460685429) < 1e-12);
    for (double z : {0.3, 1.0, 1.7, 2.5, 4.0}) {
        CHECK(std::fabs(gaussian_cdf(z) - simpson_cdf(z)) < 1e-12);
        CHECK(std::fabs(gaussian_cdf(-z) + gaussian_cdf(z) - 1.0) < 1e-15);
    }
}

TEST_CASE("A and B for trivial and omega specs") {
    SquarefreeTable table(100000);
    auto [a0, b0] = ab_of(PrimeValues(AdditiveFnSpec::zero(), table), 100000);
    CHECK(a0 == 0.0);
    CHECK(b0 == 0.0);
    auto [a1, b1] = ab_of(PrimeValues(AdditiveFnSpec::omega(), table), 100000);
    double mertens = 0.0;
    for (u64 p = 2; p <= 100000; ++p)
        if (is_prime(static_cast<i64>(p))) mertens += 1.0 / static_cast<double>(p);
    CHECK(std::fabs(a1 - mertens) < 1e-9);
    CHECK(std::fabs(b1 * b1 - mertens) < 1e-9);
    CHECK_THROWS_AS(ab_of(PrimeValues(AdditiveFnSpec::omega(), table), 1), std::invalid_argument);
    CHECK_THROWS_AS(ab_of(PrimeValues(AdditiveFnSpec::omega(), table), 200000), std::invalid_argument);
}

TEST_CASE("B for (0, 2) runs over primes 3 mod 4") {
    SquarefreeTable table(10000);
    PrimeValues g(AdditiveFnSpec::curve({0, 2}), table);
    for (std::uint32_t p : table.primes()) {
        if (p == 2) continue;
        CHECK((g.at(p) != 0.0) == (euler(-1, p) == -1));
    }
    double expect = 0.0;
    for (int p : {3, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83}) expect += 1.0 / p;
    auto [a, b] = ab_of(g, 100);
    CHECK(std::fabs(b * b - expect) < 1e-12);
}

TEST_CASE("additive function values must be bounded") {
    SquarefreeTable table(100);
    AdditiveFnSpec bad("bad", [](u64 p) { return p == 7 ? 1.5 : 0.0; });
    CHECK_THROWS_AS(PrimeValues(bad, table), std::domain_error);
    CHECK_THROWS_AS(AdditiveFnSpec::parse_table("5 2.0\n"), std::invalid_argument);
    CHECK_THROWS_AS(AdditiveFnSpec::parse_table("6 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(AdditiveFnSpec::parse_table("5\n"), std::invalid_argument);
    AdditiveFnSpec t = AdditiveFnSpec::parse_table("# values\n3 1\n5 -0.5  # half\n\n7 0.25\n");
    CHECK(t.at(3) == 1.0);
    CHECK(t.at(5) == -0.5);
    CHECK(t.at(7) == 0.25);
    CHECK(t.at(11) == 0.0);
}

TEST_CASE("additivity on coprime squarefree arguments") {
    SquarefreeTable table(20000);
    PrimeValues g(AdditiveFnSpec::curve({1, 3}), table);
    CHECK(g.g(1) == 0.0);
    for (u64 m = 1; m <= 140; ++m)
        for (u64 n = 1; n <= 140; ++n) {
            if (!table.is_squarefree(m) || !table.is_squarefree(n) || std::gcd(m, n) != 1) continue;
            CHECK(g.g(m * n) == g.g(m) + g.g(n));
        }
    // the curve spec and the twist family share one code path
    TwistFamily fam({1, 3});
    for (u64 n = 1; n <= 20000; ++n)
        if (table.is_squarefree(n)) REQUIRE(g.g(n) == fam.g_of(n));
}

TEST_CASE("Mertens-type sums") {
    SquarefreeTable table(1000000);
    CHECK_THROWS_AS(mertens_check(4, table, 1000), std::invalid_argument);
    CHECK_THROWS_AS(mertens_check(0, table, 1000), std::invalid_argument);
    CHECK(mertens_envelope(-1, table, 100, 1000000) <= 3.0);
    for (i64 c : {-11, 3, -33, 5}) CHECK(mertens_envelope(c, table, 100, 1000000) <= 3.0);
    // difference of two deviations is the character difference sum
    double direct = 0.0;
    for (std::uint32_t p : table.primes()) {
        if (p > 50000) break;
        direct += (prime_symbol(-1, p) - prime_symbol(3, p)) / static_cast<double>(p);
    }
    CHECK(std::fabs(mertens_check(-1, table, 50000) - mertens_check(3, table, 50000) - direct) < 1e-9);
    // the envelope dominates every sampled point
    double env = mertens_envelope(-11, table, 100, 100000);
    for (u64 x : {100ull, 101ull, 997ull, 5000ull, 99991ull, 100000ull})
        CHECK(std::fabs(mertens_check(-11, table, x)) <= env + 1e-12);
}

TEST_CASE("A and B envelopes for eligible curves") {
    SquarefreeTable table(1000000);
    for (CurveModel e : {CurveModel{1, 3}, CurveModel{0, 2}, CurveModel{-1, 5}}) {
        PrimeValues g(AdditiveFnSpec::curve(e), table);
        Envelopes env = ab_envelopes(g, 100, 1000000);
        CHECK(env.sup_abs_a <= 3.0);
        CHECK(env.sup_abs_b2_dev <= 3.0);
        CHECK(env.sup_abs_b_dev <= 3.0);
        auto [a, b] = ab_of(g, 54321);
        CHECK(std::fabs(a) <= env.sup_abs_a + 1e-12);
    }
}

TEST_CASE("truncated g") {
    SquarefreeTable table(100000);
    PrimeValues g(AdditiveFnSpec::curve({1, 3}), table);
    for (u64 n : {1ull, 7ull, 13ull * 17ull, 2ull * 5ull * 13ull * 97ull}) {
        CHECK(truncated_g(g, n, static_cast<double>(n)) == g.g(n));
        CHECK(truncated_g(g, n, 1.5) == 0.0);
    }
    CHECK(truncated_g(g, 13 * 29, 20.0) == g.at(13));
    CHECK_THROWS_AS(truncated_g(g, 12, 5.0), std::invalid_argument);
    // at most B^(2/3) prime factors above Y(X)
    const u64 X = 100000;
    auto [a, b] = ab_of(g, X);
    double y = truncation_y(static_cast<double>(X), b);
    CHECK(y == static_cast<double>(X));  // B < 1 here, so nothing is cut
    PrimeValues om(AdditiveFnSpec::omega(), table);
    auto [ao, bo] = ab_of(om, X);
    double yo = truncation_y(static_cast<double>(X), bo);
    CHECK(yo < static_cast<double>(X));
    for (u64 n = 1; n <= X; ++n) {
        if (!table.is_squarefree(n)) continue;
        REQUIRE(om.g(n) - truncated_g(om, n, yo) <= std::cbrt(bo * bo) + 1e-12);
    }
}

TEST_CASE("moment sums against direct summation") {
    SquarefreeTable table(3000);
    PrimeValues g(AdditiveFnSpec::curve({0, 2}), table);
    SieveStats st = sieve_stats(g, 3000, 6);
    u64 n_direct = 0;
    double direct[7] = {};
    for (u64 n = 1; n <= 3000; ++n) {
        if (!trial_squarefree(n)) continue;
        ++n_direct;
        double x = truncated_g(g, n, st.Y_X) - st.mu_X;
        for (int k = 0; k <= 6; ++k) direct[k] += std::pow(x, k);
    }
    CHECK(st.N == n_direct);
    CHECK(st.moment_sums.at(0) == static_cast<double>(n_direct));
    for (int k = 1; k <= 6; ++k) CHECK(st.moment_sums.at(k) == doctest::Approx(direct[k]).epsilon(1e-12));
    CHECK(moment_sum(g, 3000, 2) == doctest::Approx(direct[2]).epsilon(1e-12));
    double mu = 0.0, var = 0.0;
    for (std::uint32_t p : table.primes()) {
        if (p > st.Y_X) break;
        double q = 1.0 / (p + 1.0), v = g.at(p);
        mu += v * q;
        var += v * v * q * (1 - q);
    }
    CHECK(st.mu_X == doctest::Approx(mu).epsilon(1e-12));
    CHECK(st.sigma_X == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("zero spec degenerates") {
    SquarefreeTable table(1000);
    PrimeValues g(AdditiveFnSpec::zero(), table);
    SieveStats st = sieve_stats(g, 1000, 4);
    CHECK(st.N == 608);
    CHECK(st.A_x == 0.0);
    CHECK(st.sigma_X == 0.0);
    CHECK(st.moment_sums.at(2) == 0.0);
    IndependenceModelOptions mo;
    mo.trials = 5000;
    auto m = independence_model(g, 1000, mo);
    CHECK(m.sorted().front() == 0.0);
    CHECK(m.sorted().back() == 0.0);
}

TEST_CASE("empirical distribution structure") {
    auto xs = normal_samples(5000, 3);
    EmpiricalDistribution emp(xs);
    CHECK(emp.count() == 5000);
    double prev = 0.0;
    for (double z = -5; z <= 5; z += 0.01) {
        double f = emp.cdf(z);
        CHECK(f >= prev);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        prev = f;
    }
    CHECK(emp.cdf(1e9) == 1.0);
    CHECK(emp.cdf(-1e9) == 0.0);
    double m = 0.0;
    for (double x : xs) m += x;
    m /= xs.size();
    CHECK(emp.mean() == doctest::Approx(m).epsilon(1e-12));
    for (int k = 2; k <= 6; ++k) {
        double c = 0.0;
        for (double x : xs) c += std::pow(x - m, k);
        CHECK(emp.central_moment(k) == doctest::Approx(c / xs.size()).epsilon(1e-10));
    }
    EmpiricalDistribution ints({1, 1, 2, 3, 3, 3});
    auto h = ints.histogram();
    REQUIRE(h.size() == 3);
    CHECK(h[2].second == 3);
    CHECK(ints.tail(2) == doctest::Approx(4.0 / 6));
    CHECK(ints.cdf_below(1) == 0.0);
}

TEST_CASE("KS distance") {
    auto xs = normal_samples(20000, 11);
    EmpiricalDistribution emp(xs);
    CHECK(ks_distance(emp, gaussian_cdf) < 0.015);
    EmpiricalDistribution point(std::vector<double>(100, 0.0));
    CHECK(ks_distance(point, gaussian_cdf) >= 0.5);
    // shift / scale covariance
    double m = 3.0, s = 2.5;
    std::vector<double> ys;
    for (double x : xs) ys.push_back(m + s * x);
    EmpiricalDistribution emp_y(ys);
    double d1 = ks_distance(emp_y.standardized(m, s), gaussian_cdf);
    double d2 = ks_distance(emp_y, [&](double z) { return gaussian_cdf((z - m) / s); });
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-9));
    // two-sample version
    CHECK(ks_distance(emp, emp) == 0.0);
    EmpiricalDistribution a({0, 1, 2, 3}), b({0, 0, 2, 3});
    CHECK(ks_distance(a, b) == doctest::Approx(0.25));
}

TEST_CASE("Wasserstein-1") {
    EmpiricalDistribution a({0, 1, 2}), b({0.5, 1.5, 2.5});
    CHECK(wasserstein1(a, b) == doctest::Approx(0.5));
    CHECK(wasserstein1(a, a) == 0.0);
    EmpiricalDistribution point(std::vector<double>(10, 0.0));
    CHECK(wasserstein1_gaussian(point) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-9));
    EmpiricalDistribution emp(normal_samples(20000, 5));
    CHECK(wasserstein1_gaussian(emp) < 0.03);
}

TEST_CASE("sieve errors") {
    SquarefreeTable table(100000);
    auto rep = sieve_error_report(table, 10, 30);
    CHECK(rep[0].d == 1);
    CHECK(rep[0].numerator() == 0);
    CHECK(rep[1].d == 2);
    CHECK(rep[1].count == 7);
    CHECK(rep[1].N == 19);
    CHECK(rep[1].numerator() == 2);
    CHECK(rep[1].value() == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(sieve_error_report(table, 0, 30), std::invalid_argument);
    CHECK_THROWS_AS(sieve_error_report(table, 40, 30), std::invalid_argument);

    // exact agreement with a brute-force count
    const u64 X = 5000;
    auto big = sieve_error_report(table, 60, X);
    u64 N = 0;
    for (u64 n = 1; n <= X; ++n) N += trial_squarefree(n);
    for (const SieveError& e : big) {
        u64 c = 0;
        for (u64 n = e.d; n <= X; n += e.d) c += trial_squarefree(n);
        u64 sig = 0;
        for (u64 k = 1; k <= e.d; ++k)
            if (e.d % k == 0) sig += k;
        CHECK(e.count == c);
        CHECK(e.sigma == sig);
        CHECK(e.numerator() == static_cast<i64>(c * sig) - static_cast<i64>(N));
    }
    CHECK(sieve_error_envelope(big, X) <= 1.0);
    for (u64 x : {10000ull, 100000ull}) CHECK(sieve_error_report(table, 100, x)[0].numerator() == 0);
}

TEST_CASE("independence model moments") {
    const u64 X = 100000;
    SquarefreeTable table(X);
    PrimeValues g(AdditiveFnSpec::curve({1, 3}), table);
    IndependenceModelOptions mo;
    mo.trials = 200000;
    mo.seed = 42;
    auto m = independence_model(g, X, mo);
    double mu = 0.0, var = 0.0;
    for (std::uint32_t p : table.primes()) {
        double q = 1.0 / (p + 1.0), v = g.at(p);
        mu += v * q;
        var += v * v * q * (1 - q);
    }
    const double n = static_cast<double>(mo.trials);
    CHECK(std::fabs(m.mean() - mu) <= 3.0 * std::sqrt(var / n));
    double se_var = std::sqrt((m.central_moment(4) - var * var) / n);
    CHECK(std::fabs(m.variance() - var) <= 3.0 * se_var);
}

TEST_CASE("independence model is deterministic and thread independent") {
    const u64 X = 20000;
    SquarefreeTable table(X);
    PrimeValues g(AdditiveFnSpec::omega(), table);
    IndependenceModelOptions mo;
    mo.trials = 30000;
    mo.seed = 9;
    auto a = independence_model(g, X, mo);
    mo.threads = 3;
    auto b = independence_model(g, X, mo);
    CHECK(std::equal(a.sorted().begin(), a.sorted().end(), b.sorted().begin(), b.sorted().end()));
    mo.seed = 10;
    auto c = independence_model(g, X, mo);
    CHECK_FALSE(std::equal(a.sorted().begin(), a.sorted().end(), c.sorted().begin(), c.sorted().end()));
    // omega model mean is the sum of 1/(p+1)
    double mu = 0.0;
    for (std::uint32_t p : table.primes()) mu += 1.0 / (p + 1.0);
    CHECK(std::fabs(a.mean() - mu) < 0.03);

    TwistFamily fam({1, 3});
    mo.threads = 1;
    auto t1 = ord2T_independence_model(fam, table, X, mo);
    mo.threads = 4;
    auto t2 = ord2T_independence_model(fam, table, X, mo);
    CHECK(std::equal(t1.sorted().begin(), t1.sorted().end(), t2.sorted().begin(), t2.sorted().end()));
}

TEST_CASE("ord2 T model with no drawn primes is the untwisted value") {
    // a prime bound of 1 draws nothing, so every trial is d = 1
    SquarefreeTable table(100);
    for (CurveModel e : {CurveModel{1, 3}, CurveModel{0, 2}, CurveModel{-1, 5}}) {
        TwistFamily fam(e);
        IndependenceModelOptions mo;
        mo.trials = 100;
        mo.prime_bound = 1;
        auto m = ord2T_independence_model(fam, table, 100, mo);
        CHECK(m.sorted().front() == ord2_T_product(e, 1));
        CHECK(m.sorted().back() == ord2_T_product(e, 1));
    }
}

TEST_CASE("class masks reproduce ord2 T of products") {
    SquarefreeTable table(3000);
    for (CurveModel e : {CurveModel{1, 3}, CurveModel{0, 2}, CurveModel{-1, 5}}) {
        TwistFamily fam(e);
        Ord2TClassModel model(fam);
        for (u64 d = 1; d <= 3000; ++d) {
            if (!table.is_squarefree(d)) continue;
            auto ps = table.factor_squarefree(d);
            INFO("curve " << to_string(e) << " d " << d);
            REQUIRE(model.evaluate(ps) == ord2_T_product(e, static_cast<i64>(d)));
        }
    }
}
