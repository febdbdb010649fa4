#pragma once

// Local images of the 2-isogeny connecting maps at every place of Q.
//
// For a model y^2 = x^3 + a x^2 + b x the x-coordinate induces
//   E(Q_v) -> Q_v^* / Q_v^{*2},   (x, y) -> x,  (0, 0) -> b,
// whose image is cut out by the 2-coverings
//   d w^2 = d^2 u^4 + a d u^2 v^2 + b v^4.
// Applied to E itself this is the image of E(Q_v)/phihat(E'(Q_v)); applied to
// the dual model it is H^1_phi(Q_v, C), the image of E'(Q_v)/phi(E(Q_v)).

#include <array>
#include <string>
#include <vector>

#include "twosel/arith.hpp"
#include "twosel/curve.hpp"

namespace twosel {

enum class PlaceKind { infinity, two, odd_prime };

struct Place {
    PlaceKind kind = PlaceKind::infinity;
    i64 p = 0;  // 2 for the dyadic place, 0 at infinity

    static Place infinity() { return {PlaceKind::infinity, 0}; }
    static Place two() { return {PlaceKind::two, 2}; }
    /// Any prime; 2 maps to the dyadic place. Throws on non-primes.
    static Place prime(i64 p);

    bool finite() const { return kind != PlaceKind::infinity; }
    std::string name() const;

    friend bool operator==(const Place&, const Place&) = default;
    friend auto operator<=>(const Place&, const Place&) = default;
};

struct LocalSquareClassSet {
    Place place;
    std::vector<i64> representatives;
};

/// {1, -1} at infinity, {+-1, +-2, +-5, +-10} at 2, {1, u, p, up} at odd p
/// with u the least quadratic nonresidue.
LocalSquareClassSet local_square_classes(const Place& v);

/// Canonical representative (from local_square_classes) of n in Q_v^*/Q_v^{*2}.
i64 local_class(i64 n, const Place& v);

bool is_local_square(i64 n, const Place& v);

/// Dimension of E(Q_v)[2] as an F_2-space: 2 iff A^2 - 4B is a square in Q_v.
int local_two_torsion_dim(const CurveModel& e, const Place& v);

/// Whether d1 w^2 = d1^2 u^4 + A d1 u^2 v^2 + B v^4 has a nontrivial Q_v-point.
/// Throws std::invalid_argument for d1 == 0.
bool homog_space_solvable(const CurveModel& e, i64 d1, const Place& v);

/// The subgroup of local classes hit by the x-coordinate map of a model.
struct LocalImage {
    Place place;
    std::vector<i64> classes;  // canonical representatives, ascending
    int dim = 0;

    bool contains(i64 n) const;
};

/// Image of the covering test over all local classes of v. Throws
/// std::logic_error if the solvable set is not a subgroup.
LocalImage covering_image(const CurveModel& e, const Place& v);

/// H^1_phi(Q_v, C) for phi: E -> E'.
LocalImage phi_image(const CurveModel& e, const Place& v);
/// H^1_phihat(Q_v, C') for phihat: E' -> E.
LocalImage phihat_image(const CurveModel& e, const Place& v);

int local_phi_dim(const CurveModel& e, const Place& v);
int local_phi_hat_dim(const CurveModel& e, const Place& v);

/// dim H^1_phi(Q_p, C^d) at an odd prime p | d of good reduction, read off
/// the Legendre symbols of the two discriminant classes:
///   both nonsquare -> 1, both square -> 1, only Delta' square -> 2,
///   only Delta square -> 0.
/// Throws std::invalid_argument if p | 2 disc(E) or p does not divide d.
int local_phi_dim_twist_fast(const CurveModel& e, i64 p, i64 d);

/// Precomputed dim H^1_phi(Q_v, C^d) for the twists of a fixed curve at a
/// fixed list of places, keyed by the class of d in Q_v^*/Q_v^{*2}. Built
/// eagerly and immutable afterwards, apart from the explicit fault hook.
class LocalDimCache {
public:
    LocalDimCache(const CurveModel& e, std::vector<Place> places);

    const std::vector<Place>& places() const { return places_; }
    /// dim at places()[i] for the twist by any d in the local class of `cls`.
    int dim(std::size_t i, i64 d) const;
    /// Number of distinct (place, class) entries.
    std::size_t size() const;

    /// Test hook: shifts one stored dimension to simulate a broken table.
    void corrupt(std::size_t i, i64 cls, int delta);

private:
    std::vector<Place> places_;
    std::vector<std::vector<std::pair<i64, int>>> table_;
};

}  // namespace twosel
