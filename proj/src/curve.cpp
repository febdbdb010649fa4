#include "twosel/curve.hpp"

#include <algorithm>
#include <stdexcept>

namespace twosel {

namespace {

i64 checked_mul(i64 x, i64 y) {
    i64 r;
    if (__builtin_mul_overflow(x, y, &r)) throw std::overflow_error("curve coefficient overflow");
    return r;
}

i64 checked_sub(i64 x, i64 y) {
    i64 r;
    if (__builtin_sub_overflow(x, y, &r)) throw std::overflow_error("curve coefficient overflow");
    return r;
}

bool is_rational_square(i128 num, i128 den) {
    // num/den with den != 0
    if ((num < 0) != (den < 0) && num != 0) return false;
    if (num < 0) {
        num = -num;
        den = -den;
    }
    i128 prod = num * den;
    if (prod < 0 || prod > static_cast<i128>(INT64_MAX)) throw std::overflow_error("scaling_equivalent overflow");
    return is_square(static_cast<i64>(prod));
}

}  // namespace

CurveModel CurveModel::make(i64 a, i64 b) {
    CurveModel e{a, b};
    if (!e.nonsingular())
        throw std::domain_error("singular curve model y^2 = x^3 + " + std::to_string(a) + "x^2 + " + std::to_string(b) + "x");
    return e;
}

i64 CurveModel::quad_disc() const {
    return checked_sub(checked_mul(a, a), checked_mul(4, b));
}

bool CurveModel::nonsingular() const {
    return b != 0 && quad_disc() != 0;
}

std::string to_string(const CurveModel& e) {
    return "(" + std::to_string(e.a) + ", " + std::to_string(e.b) + ")";
}

CurveModel dual_curve(const CurveModel& e) {
    if (!e.nonsingular()) throw std::domain_error("dual_curve: singular model");
    return {checked_mul(-2, e.a), e.quad_disc()};
}

CurveModel twist(const CurveModel& e, i64 d) {
    if (d == 0) throw std::invalid_argument("twist: d must be nonzero");
    if (!is_squarefree(d)) throw std::invalid_argument("twist: " + std::to_string(d) + " is not squarefree");
    return {checked_mul(d, e.a), checked_mul(checked_mul(d, d), e.b)};
}

bool scaling_equivalent(const CurveModel& e1, const CurveModel& e2) {
    if (e1.b == 0 || e2.b == 0) return false;
    if (e1.a == 0 || e2.a == 0) {
        if (e1.a != e2.a) return false;
        // B2/B1 must be a fourth power: a square whose root is a square
        i128 num = e2.b, den = e1.b;
        if ((num < 0) != (den < 0)) return false;
        if (num < 0) {
            num = -num;
            den = -den;
        }
        // reduce the fraction, then both parts must be fourth powers
        i128 x = num, y = den;
        while (y) {
            i128 t = x % y;
            x = y;
            y = t;
        }
        num /= x;
        den /= x;
        auto fourth = [](i128 v) {
            if (v > static_cast<i128>(INT64_MAX)) throw std::overflow_error("scaling_equivalent overflow");
            if (!is_square(static_cast<i64>(v))) return false;
            return is_square(static_cast<i64>(isqrt(static_cast<u64>(v))));
        };
        return fourth(num) && fourth(den);
    }
    // s = A2 / A1 must satisfy B2 = s^2 B1 and be a rational square
    i128 lhs = static_cast<i128>(e2.b) * e1.a * e1.a;
    i128 rhs = static_cast<i128>(e1.b) * e2.a * e2.a;
    if (lhs != rhs) return false;
    return is_rational_square(e2.a, e1.a);
}

i64 delta_class(const CurveModel& e) {
    return squarefree_kernel(e.quad_disc());
}

i64 delta_prime_class(const CurveModel& e) {
    return squarefree_kernel(e.b);
}

HypothesisReport check_hypotheses(const CurveModel& e) {
    if (!e.nonsingular()) throw std::domain_error("check_hypotheses: singular model " + to_string(e));
    HypothesisReport r;
    i64 d = delta_class(e);
    i64 dp = delta_prime_class(e);
    r.partial_two_torsion = d != 1;
    r.dual_partial_two_torsion = dp != 1;
    // square class of the product is the kernel of d * dp
    r.disjoint_two_division_fields = squarefree_kernel(checked_mul(d, dp)) != 1;
    r.eligible = r.partial_two_torsion && r.dual_partial_two_torsion && r.disjoint_two_division_fields;
    return r;
}

std::vector<i64> bad_odd_primes(const CurveModel& e) {
    std::vector<i64> out;
    for (i64 p : prime_divisors(e.b))
        if (p != 2) out.push_back(p);
    for (i64 p : prime_divisors(e.quad_disc()))
        if (p != 2) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool on_curve(const CurveModel& e, const RationalPoint& p) {
    if (p.infinity) return true;
    mpq_class rhs = p.x * p.x * p.x + mpq_class(e.a) * p.x * p.x + mpq_class(e.b) * p.x;
    return p.y * p.y == rhs;
}

RationalPoint negate(const RationalPoint& p) {
    if (p.infinity) return p;
    return {p.x, -p.y, false};
}

RationalPoint add(const CurveModel& e, const RationalPoint& p, const RationalPoint& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    mpq_class lambda;
    if (p.x == q.x) {
        if (p.y != q.y || p.y == 0) return RationalPoint::at_infinity();
        lambda = (3 * p.x * p.x + 2 * mpq_class(e.a) * p.x + mpq_class(e.b)) / (2 * p.y);
    } else {
        lambda = (q.y - p.y) / (q.x - p.x);
    }
    mpq_class x3 = lambda * lambda - mpq_class(e.a) - p.x - q.x;
    mpq_class y3 = lambda * (p.x - x3) - p.y;
    x3.canonicalize();
    y3.canonicalize();
    return {x3, y3, false};
}

RationalPoint apply_isogeny(const CurveModel& e, const RationalPoint& p) {
    if (p.infinity || p.x == 0) return RationalPoint::at_infinity();
    mpq_class x2 = p.x * p.x;
    mpq_class nx = p.y * p.y / x2;
    mpq_class ny = p.y * (mpq_class(e.b) - x2) / x2;
    nx.canonicalize();
    ny.canonicalize();
    return {nx, ny, false};
}

}  // namespace twosel
