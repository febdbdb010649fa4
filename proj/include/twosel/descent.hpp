#pragma once

// phi- and phihat-Selmer groups by brute force over the classes of Q(S, 2).

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "twosel/curve.hpp"
#include "twosel/local.hpp"

namespace twosel {

struct SelmerBasis {
    std::vector<Place> support;   // infinity, 2, then odd primes ascending
    std::vector<i64> generators;  // independent squarefree classes
    std::vector<i64> members;     // every class in the group, ascending
    int dimension = 0;

    bool contains(i64 cls) const;
};

/// Product of two squarefree classes modulo squares.
i64 class_product(i64 a, i64 b);

/// {infinity, 2} plus the odd primes dividing B (A^2 - 4B).
std::vector<Place> selmer_support(const CurveModel& e);

/// All products of -1 and the finite primes of S: 2^(1 + #finite primes) classes.
std::vector<i64> global_class_group(std::span<const Place> support);

/// Classes of Q(S,2) lying in the x-coordinate image of `model` at every place of S.
SelmerBasis covering_selmer(const CurveModel& model);

/// Sel_phi(E/Q) inside H^1(Q, C): covering test on the dual model.
SelmerBasis phi_selmer(const CurveModel& e);

/// Sel_phihat(E'/Q) inside H^1(Q, C'): covering test on E itself.
SelmerBasis phihat_selmer(const CurveModel& e);

/// Smallest-height primitive (u, v, w) with d1 w^2 = d1^2 u^4 + A d1 u^2 v^2 + B v^4,
/// searching 0 <= u <= bound, 0 <= v <= bound (u, v not both zero).
std::optional<std::array<i64, 3>> naive_point_search(const CurveModel& model, i64 d1, i64 bound);

}  // namespace twosel
