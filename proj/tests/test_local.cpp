#include "doctest.h"

#include <optional>
#include <random>
#include <stdexcept>

#include "twosel/local.hpp"

using namespace twosel;

namespace {

const std::vector<CurveModel> kCurves{{1, 3}, {0, 2}, {-1, 5}};

bool exact_local_square(i128 n, i64 p) {
    // n != 0, exact integer
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    if (e & 1) return false;
    if (p == 2) {
        i128 r = n % 8;
        if (r < 0) r += 8;
        return r == 1;
    }
    i128 r = n % p;
    if (r < 0) r += p;
    return jacobi(static_cast<i64>(r), p) == 1;
}

// Independent residue oracle for d w^2 = d^2 u^4 + a d u^2 v^2 + b v^4 over Q_p.
// Primitive (u, v) reduce to v = 1 or (u = 1, p | v); the value mod p^k fixes
// the square class when its valuation e satisfies e + (1 or 3) <= k.
// Returns nullopt when precision p^k does not decide.
std::optional<bool> residue_oracle(const CurveModel& e, i64 d, i64 p, int k) {
    i64 pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    int need = p == 2 ? 3 : 1;
    bool undecided = false;
    auto value = [&](i128 u, i128 v) {
        i128 dd = d;
        return dd * (dd * dd * u * u * u * u + static_cast<i128>(e.a) * dd * u * u * v * v + static_cast<i128>(e.b) * v * v * v * v);
    };
    auto check = [&](i128 u, i128 v) -> bool {
        i128 g = value(u, v);
        if (g == 0) return true;
        i128 m = g % pk;
        if (m < 0) m += pk;
        if (m == 0) {
            undecided = true;
            return false;
        }
        int val = 0;
        while (m % p == 0) {
            m /= p;
            ++val;
        }
        if (val + need > k) {
            undecided = true;
            return false;
        }
        return exact_local_square(g, p);
    };
    for (i64 u = 0; u < pk; ++u)
        if (check(u, 1)) return true;
    for (i64 v = 0; v < pk; v += p)
        if (check(1, v)) return true;
    if (undecided) return std::nullopt;
    return false;
}

std::optional<bool> oracle(const CurveModel& e, i64 d, i64 p) {
    int k = 1;
    for (i64 pk = p; pk * p <= 200000; pk *= p) ++k;
    for (int kk = 3; kk <= k; ++kk)
        if (auto r = residue_oracle(e, d, p, kk)) return r;
    return std::nullopt;
}

}  // namespace

TEST_CASE("local square classes") {
    CHECK(local_square_classes(Place::infinity()).representatives.size() == 2);
    CHECK(local_square_classes(Place::two()).representatives.size() == 8);
    auto s7 = local_square_classes(Place::prime(7));
    CHECK(s7.representatives == std::vector<i64>{1, 3, 7, 21});
    CHECK(local_class(-1, Place::prime(7)) == 3);
    CHECK(local_class(-1, Place::prime(5)) == 1);
    CHECK(local_class(49 * 5, Place::prime(7)) == 3);
    CHECK(local_class(7 * 9, Place::prime(7)) == 7);
    CHECK(local_class(3, Place::two()) == -5);
    CHECK(local_class(7, Place::two()) == -1);
    CHECK(local_class(12, Place::two()) == -5);
    CHECK(local_class(-40, Place::two()) == -10);
    CHECK(local_class(-3, Place::infinity()) == -1);
    CHECK_THROWS(Place::prime(9));
    for (const Place& v : {Place::infinity(), Place::two(), Place::prime(3), Place::prime(11)})
        for (i64 r : local_square_classes(v).representatives) CHECK(local_class(r, v) == r);
}

TEST_CASE("local two-torsion") {
    CHECK(local_two_torsion_dim({1, 3}, Place::prime(13)) == 1);
    CHECK(local_two_torsion_dim({1, 3}, Place::prime(5)) == 2);
    CHECK(local_two_torsion_dim({1, 3}, Place::infinity()) == 1);
    CHECK(local_two_torsion_dim({1, 3}, Place::prime(3)) == 2);  // -11 = 1 mod 3
}

TEST_CASE("covering solvability examples") {
    for (const CurveModel& e : kCurves)
        for (const Place& v : {Place::infinity(), Place::two(), Place::prime(3), Place::prime(7), Place::prime(11)})
            CHECK(homog_space_solvable(e, 1, v));
    CHECK_FALSE(homog_space_solvable({1, 3}, -1, Place::infinity()));
    CHECK(homog_space_solvable(dual_curve({1, 3}), -1, Place::infinity()));
    CHECK_THROWS_AS(homog_space_solvable({1, 3}, 0, Place::two()), std::invalid_argument);

    auto o = oracle({1, 3}, 3, 7);
    REQUIRE(o.has_value());
    CHECK(homog_space_solvable({1, 3}, 3, Place::prime(7)) == *o);
}

TEST_CASE("solver agrees with the residue oracle") {
    std::vector<CurveModel> curves = kCurves;
    for (const CurveModel& e : kCurves) {
        curves.push_back(dual_curve(e));
        for (i64 d : {-1, 2, -3, 5, 6, -7, 21}) {
            curves.push_back(twist(e, d));
            curves.push_back(dual_curve(twist(e, d)));
        }
    }
    curves.push_back({3, -4 * 81});
    curves.push_back({12, 32});
    int decided = 0, total = 0;
    for (const CurveModel& e : curves) {
        if (std::abs(e.b) > 5000 || std::abs(e.a) > 200) continue;
        for (i64 p : {2, 3, 5, 7, 11, 13}) {
            Place v = Place::prime(p);
            for (i64 d : local_square_classes(v).representatives) {
                ++total;
                auto o = oracle(e, d, p);
                if (!o) continue;
                ++decided;
                INFO("curve " << to_string(e) << " d " << d << " p " << p);
                CHECK(homog_space_solvable(e, d, v) == *o);
            }
        }
    }
    MESSAGE("oracle decided " << decided << " of " << total);
    CHECK(decided * 10 >= total * 9);
}

TEST_CASE("solvability only depends on the square class") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<i64> sq(1, 12);
    for (const CurveModel& e : kCurves)
        for (const Place& v : {Place::infinity(), Place::two(), Place::prime(3), Place::prime(5), Place::prime(11), Place::prime(19)})
            for (i64 d : local_square_classes(v).representatives)
                for (int trial = 0; trial < 4; ++trial) {
                    i64 s = sq(rng);
                    CHECK(homog_space_solvable(e, d * s * s, v) == homog_space_solvable(e, d, v));
                    CHECK(homog_space_solvable(dual_curve(e), d * s * s, v) == homog_space_solvable(dual_curve(e), d, v));
                }
}

TEST_CASE("local phi dimension examples") {
    CHECK(local_phi_dim({1, 3}, Place::prime(13)) == 1);
    CHECK(local_phi_dim({1, 3}, Place::prime(101)) == 1);
    CHECK(local_phi_dim({0, 2}, Place::prime(5)) == 1);
    // the real place: E' has two real components, E only one
    CHECK(local_phi_dim({1, 3}, Place::infinity()) == 1);
    CHECK(local_phi_hat_dim({1, 3}, Place::infinity()) == 0);
    CHECK(local_phi_dim(twist({0, 2}, 7), Place::prime(7)) == 2);
    CHECK(local_phi_dim(twist({0, 2}, 21), Place::prime(7)) == 2);
    CHECK(local_phi_dim(twist({0, 2}, 3), Place::prime(3)) == 0);
    CHECK(local_phi_dim(twist({0, 2}, 5), Place::prime(5)) == 1);
}

TEST_CASE("good odd places have one-dimensional image") {
    for (const CurveModel& e : kCurves)
        for (i64 p : {3, 5, 7, 13, 17, 23, 29, 31, 37, 41, 43, 1009, 65537}) {
            if (e.b % p == 0 || e.quad_disc() % p == 0) continue;
            CHECK(local_phi_dim(e, Place::prime(p)) == 1);
            CHECK(local_phi_hat_dim(e, Place::prime(p)) == 1);
        }
}

TEST_CASE("fast Legendre path") {
    CHECK(local_phi_dim_twist_fast({0, 2}, 7, 7) == 2);
    CHECK(local_phi_dim_twist_fast({0, 2}, 3, 3) == 0);
    CHECK(local_phi_dim_twist_fast({0, 2}, 5, 15) == 1);
    CHECK_THROWS_AS(local_phi_dim_twist_fast({1, 3}, 3, 3), std::invalid_argument);
    CHECK_THROWS_AS(local_phi_dim_twist_fast({1, 3}, 7, 5), std::invalid_argument);
    CHECK_THROWS_AS(local_phi_dim_twist_fast({1, 3}, 2, 2), std::invalid_argument);
}

TEST_CASE("fast and covering local dimensions agree at twisted places") {
    int checked = 0;
    for (const CurveModel& e : kCurves)
        for (i64 d = -1000; d <= 1000; ++d) {
            if (d == 0 || !is_squarefree(d)) continue;
            for (i64 p : prime_divisors(d)) {
                if (p == 2 || e.b % p == 0 || e.quad_disc() % p == 0) continue;
                INFO("curve " << to_string(e) << " d " << d << " p " << p);
                REQUIRE(local_phi_dim(twist(e, d), Place::prime(p)) == local_phi_dim_twist_fast(e, p, d));
                ++checked;
            }
        }
    CHECK(checked > 1000);
}

TEST_CASE("local duality: dim phi + dim phihat = dim of the local class group") {
    std::vector<std::pair<CurveModel, Place>> pairs;
    for (const CurveModel& e : kCurves)
        for (i64 d : {1, -1, 2, -2, 3, 5, -6, 7, 10, -11, 15, 19, -21, 33, 35, -95, 105})
            for (const Place& v : {Place::infinity(), Place::two(), Place::prime(3), Place::prime(5), Place::prime(7),
                                   Place::prime(11), Place::prime(19)})
                pairs.push_back({twist(e, d), v});
    for (auto& [e, v] : pairs) {
        int expect = v.kind == PlaceKind::infinity ? 1 : v.kind == PlaceKind::two ? 3 : 2;
        INFO("curve " << to_string(e) << " place " << v.name());
        CHECK(local_phi_dim(e, v) + local_phi_hat_dim(e, v) == expect);
    }
    CHECK(pairs.size() >= 50);
}

TEST_CASE("large primes use the polynomial root finder") {
    // p | d with p far above the brute-force range
    for (const CurveModel& e : kCurves)
        for (i64 p : {1000003, 999983, 4000037}) {
            for (i64 d : {p, -p, 2 * p, 3 * p}) {
                int expect = local_phi_dim_twist_fast(e, p, d);
                CHECK(local_phi_dim(twist(e, d), Place::prime(p)) == expect);
                CHECK(local_phi_hat_dim(twist(e, d), Place::prime(p)) == 2 - expect);
            }
        }
}

TEST_CASE("local dimension cache matches direct evaluation") {
    const CurveModel e{-1, 5};
    std::vector<Place> places{Place::infinity(), Place::two(), Place::prime(5), Place::prime(19)};
    LocalDimCache cache(e, places);
    CHECK(cache.size() == 2 + 8 + 4 + 4);
    for (i64 d = -200; d <= 200; ++d) {
        if (d == 0 || !is_squarefree(d)) continue;
        for (std::size_t i = 0; i < places.size(); ++i) CHECK(cache.dim(i, d) == local_phi_dim(twist(e, d), places[i]));
    }
    cache.corrupt(1, 1, 1);
    CHECK(cache.dim(1, 17) == local_phi_dim(twist(e, 17), Place::two()) + 1);
}
