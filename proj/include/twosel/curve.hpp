#pragma once

// Curves y^2 = x^3 + A x^2 + B x with the rational 2-torsion point (0,0),
// their 2-isogenous duals and quadratic twists.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "twosel/arith.hpp"

namespace twosel {

struct CurveModel {
    i64 a = 0;
    i64 b = 0;

    /// Validating constructor; throws std::domain_error on a singular model
    /// (B * (A^2 - 4B) == 0) and std::overflow_error if A^2 - 4B leaves 64 bits.
    static CurveModel make(i64 a, i64 b);

    /// A^2 - 4B, the discriminant of x^2 + A x + B.
    i64 quad_disc() const;
    bool nonsingular() const;

    friend bool operator==(const CurveModel&, const CurveModel&) = default;
};

std::string to_string(const CurveModel& e);

/// The 2-isogenous curve y^2 = x^3 - 2A x^2 + (A^2 - 4B) x.
CurveModel dual_curve(const CurveModel& e);

/// Quadratic twist (dA, d^2 B) for squarefree d != 0.
CurveModel twist(const CurveModel& e, i64 d);

/// True when the models differ by x -> u^2 x, y -> u^3 y for some rational u,
/// i.e. (A2, B2) = (s A1, s^2 B1) with s a nonzero rational square.
bool scaling_equivalent(const CurveModel& e1, const CurveModel& e2);

/// Square class of the discriminant 16 B^2 (A^2 - 4B), i.e. the squarefree
/// kernel of A^2 - 4B.
i64 delta_class(const CurveModel& e);

/// Square class of the dual discriminant, which is the squarefree kernel of B.
i64 delta_prime_class(const CurveModel& e);

struct HypothesisReport {
    bool partial_two_torsion = false;          // A^2 - 4B nonsquare
    bool dual_partial_two_torsion = false;     // B nonsquare
    bool disjoint_two_division_fields = false; // B (A^2 - 4B) nonsquare
    bool eligible = false;
};

/// Throws std::domain_error on singular input.
HypothesisReport check_hypotheses(const CurveModel& e);

/// Odd primes dividing B (A^2 - 4B), ascending. Together with 2 and the real
/// place these are the places where the model may have bad reduction.
std::vector<i64> bad_odd_primes(const CurveModel& e);

/// Affine rational point or the point at infinity.
struct RationalPoint {
    mpq_class x;
    mpq_class y;
    bool infinity = false;

    static RationalPoint at_infinity() { return {0, 0, true}; }
};

bool on_curve(const CurveModel& e, const RationalPoint& p);
RationalPoint negate(const RationalPoint& p);
RationalPoint add(const CurveModel& e, const RationalPoint& p, const RationalPoint& q);

/// The 2-isogeny with kernel {O, (0,0)}: (x, y) -> (y^2/x^2, y (B - x^2)/x^2).
RationalPoint apply_isogeny(const CurveModel& e, const RationalPoint& p);

}  // namespace twosel
