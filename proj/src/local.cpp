#include "twosel/local.hpp"

#include <algorithm>
#include <stdexcept>

namespace twosel {

Place Place::prime(i64 p) {
    if (!is_prime(p)) throw std::invalid_argument("Place::prime: " + std::to_string(p) + " is not prime");
    return p == 2 ? two() : Place{PlaceKind::odd_prime, p};
}

std::string Place::name() const {
    switch (kind) {
        case PlaceKind::infinity: return "inf";
        case PlaceKind::two: return "2";
        case PlaceKind::odd_prime: return std::to_string(p);
    }
    return "?";
}

LocalSquareClassSet local_square_classes(const Place& v) {
    switch (v.kind) {
        case PlaceKind::infinity: return {v, {-1, 1}};
        case PlaceKind::two: return {v, {-10, -5, -2, -1, 1, 2, 5, 10}};
        case PlaceKind::odd_prime: {
            i64 u = smallest_nonresidue(v.p);
            return {v, {1, u, v.p, u * v.p}};
        }
    }
    return {v, {}};
}

i64 local_class(i64 n, const Place& v) {
    if (n == 0) throw std::invalid_argument("local_class of zero");
    switch (v.kind) {
        case PlaceKind::infinity: return n > 0 ? 1 : -1;
        case PlaceKind::two: {
            int e = __builtin_ctzll(static_cast<u64>(n));
            i64 unit = n >> e;
            i64 r = ((unit % 8) + 8) % 8;
            i64 rep = r == 1 ? 1 : r == 3 ? -5 : r == 5 ? 5 : -1;
            return (e & 1) ? 2 * rep : rep;
        }
        case PlaceKind::odd_prime: {
            int e = 0;
            while (n % v.p == 0) {
                n /= v.p;
                ++e;
            }
            i64 rep = jacobi(n, v.p) == 1 ? 1 : smallest_nonresidue(v.p);
            return (e & 1) ? rep * v.p : rep;
        }
    }
    return 1;
}

bool is_local_square(i64 n, const Place& v) {
    return local_class(n, v) == 1;
}

int local_two_torsion_dim(const CurveModel& e, const Place& v) {
    return is_local_square(e.quad_disc(), v) ? 2 : 1;
}

namespace {

// ---------------------------------------------------------------------------
// Polynomials over F_p of degree <= 4, coefficients low to high.

using Poly = std::vector<u64>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

int degree(const Poly& a) {
    return static_cast<int>(a.size()) - 1;
}

u64 inv_mod(u64 a, u64 p) {
    return powmod(a, p - 2, p);
}

u64 eval(const Poly& a, u64 t, u64 p) {
    u64 r = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = (mulmod(r, t, p) + *it) % p;
    return r;
}

Poly monic(Poly a, u64 p) {
    trim(a);
    if (a.empty()) return a;
    u64 inv = inv_mod(a.back(), p);
    for (auto& x : a) x = mulmod(x, inv, p);
    return a;
}

// remainder and quotient of a by nonzero b
Poly poly_divmod(Poly a, const Poly& b, u64 p, Poly* quot) {
    trim(a);
    int db = degree(b);
    u64 inv = inv_mod(b.back(), p);
    Poly q(a.size() > b.size() ? a.size() - b.size() + 1 : 1, 0);
    while (degree(a) >= db) {
        int shift = degree(a) - db;
        u64 f = mulmod(a.back(), inv, p);
        q[shift] = f;
        for (int i = 0; i <= db; ++i) a[i + shift] = (a[i + shift] + p - mulmod(f, b[i], p)) % p;
        trim(a);
    }
    if (quot) {
        trim(q);
        *quot = std::move(q);
    }
    return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, u64 p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    return poly_divmod(std::move(r), m, p, nullptr);
}

Poly poly_powmod(Poly base, u64 e, const Poly& m, u64 p) {
    Poly r = poly_divmod(Poly{1}, m, p, nullptr);
    base = poly_divmod(std::move(base), m, p, nullptr);
    while (e) {
        if (e & 1) r = poly_mulmod(r, base, m, p);
        base = poly_mulmod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

Poly poly_gcd(Poly a, Poly b, u64 p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = poly_divmod(a, b, p, nullptr);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(std::move(a), p);
}

Poly poly_sub(Poly a, const Poly& b, u64 p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    trim(a);
    return a;
}

// h monic, a product of distinct linear factors
void split_linear(const Poly& h, u64 p, std::vector<u64>& roots) {
    int n = degree(h);
    if (n <= 0) return;
    if (n == 1) {
        roots.push_back((p - h[0]) % p);
        return;
    }
    for (u64 delta = 1; delta < p; ++delta) {
        Poly w = poly_powmod(Poly{delta, 1}, (p - 1) / 2, h, p);
        w = poly_gcd(h, poly_sub(w, Poly{1}, p), p);
        int dw = degree(w);
        if (dw > 0 && dw < n) {
            Poly q;
            poly_divmod(h, w, p, &q);
            split_linear(w, p, roots);
            split_linear(monic(q, p), p, roots);
            return;
        }
    }
    throw std::logic_error("split_linear: no splitting shift found");
}

constexpr u64 kBruteForcePrime = 256;

std::vector<u64> roots_mod_p(const Poly& g, u64 p) {
    std::vector<u64> roots;
    if (g.empty()) throw std::logic_error("roots_mod_p: zero polynomial");
    if (degree(g) == 0) return roots;
    if (p < kBruteForcePrime) {
        for (u64 t = 0; t < p; ++t)
            if (eval(g, t, p) == 0) roots.push_back(t);
        return roots;
    }
    Poly m = monic(g, p);
    Poly xp = poly_powmod(Poly{0, 1}, p, m, p);
    Poly h = poly_gcd(m, poly_sub(xp, Poly{0, 1}, p), p);
    split_linear(h, p, roots);
    std::sort(roots.begin(), roots.end());
    return roots;
}

// g == c * h^2 for some c and polynomial h; sets c
bool is_const_times_square(const Poly& g, u64 p, u64& c) {
    int n = degree(g);
    c = g.back();
    if (n % 2 == 1) return false;
    if (n == 0) return true;
    Poly m = monic(g, p);
    u64 inv2 = inv_mod(2, p);
    if (n == 2) {
        // t^2 + m1 t + m0 is a square iff m1^2 = 4 m0
        return mulmod(m[1], m[1], p) == mulmod(4, m[0], p);
    }
    // n == 4: try h = t^2 + al t + be
    u64 al = mulmod(m[3], inv2, p);
    u64 be = mulmod((m[2] + p - mulmod(al, al, p)) % p, inv2, p);
    return mulmod(2, mulmod(al, be, p), p) == m[1] && mulmod(be, be, p) == m[0];
}

// exists t in F_p with g(t) a nonzero square
bool has_nonzero_square_value(const Poly& g, u64 p) {
    if (degree(g) == 0) return jacobi(static_cast<i64>(g[0]), static_cast<i64>(p)) == 1;
    if (p < kBruteForcePrime) {
        for (u64 t = 0; t < p; ++t) {
            u64 v = eval(g, t, p);
            if (v != 0 && jacobi(static_cast<i64>(v), static_cast<i64>(p)) == 1) return true;
        }
        return false;
    }
    u64 c;
    if (is_const_times_square(g, p, c)) return jacobi(static_cast<i64>(c), static_cast<i64>(p)) == 1;
    // Weil: a degree <= 4 polynomial that is not c*h^2 takes nonzero square
    // values once p > 16
    return true;
}

// ---------------------------------------------------------------------------
// p-adic search over the discs t in r + p^k Z_p.
//
// A node holds integer coefficients c with the covering value at the disc
// parameter equal to p^odd * (c0 + c1 t + ... + c4 t^4) up to a square.

using Quartic = std::array<mpz_class, 5>;

constexpr int kMaxDepth = 400;

int mpz_valuation(const mpz_class& x, const mpz_class& p) {
    mpz_class rest;
    return static_cast<int>(mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()));
}

void normalize(Quartic& c, bool& odd, const mpz_class& p) {
    int m = -1;
    for (const auto& x : c) {
        if (x == 0) continue;
        int v = mpz_valuation(x, p);
        if (m < 0 || v < m) m = v;
    }
    if (m <= 0) return;
    mpz_class pm;
    mpz_pow_ui(pm.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(m));
    for (auto& x : c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), pm.get_mpz_t());
    if (m & 1) odd = !odd;
}

// coefficients of c(r + p t)
Quartic shift(const Quartic& c, u64 r, const mpz_class& p) {
    Quartic s = c;
    mpz_class rr(static_cast<unsigned long>(r));
    for (int i = 0; i < 4; ++i)
        for (int j = 3; j >= i; --j) s[j] += rr * s[j + 1];
    mpz_class pw = 1;
    for (int i = 1; i <= 4; ++i) {
        pw *= p;
        s[i] *= pw;
    }
    return s;
}

bool dyadic_unit_is_square(const mpz_class& unit) {
    return mpz_fdiv_ui(unit.get_mpz_t(), 8) == 1;
}

bool represents_square(Quartic c, bool odd, const mpz_class& pz, u64 p, int depth) {
    if (depth > kMaxDepth) throw std::runtime_error("local solvability search exceeded depth limit");
    normalize(c, odd, pz);
    if (c[0] == 0) return true;
    int v0 = mpz_valuation(c[0], pz);
    if (c[1] != 0) {
        // Hensel: a simple root lies in the disc, and near it every class occurs
        int v1 = mpz_valuation(c[1], pz);
        if (v0 > 2 * v1) return true;
    }
    if (p == 2) {
        int m1 = -1;
        for (int i = 1; i <= 4; ++i) {
            if (c[i] == 0) continue;
            int v = mpz_valuation(c[i], pz);
            if (m1 < 0 || v < m1) m1 = v;
        }
        if (m1 < 0 || m1 - v0 >= 3) {
            // every value is c0 * (1 + 8 * something): class of c0 decides
            if (((v0 + (odd ? 1 : 0)) & 1) != 0) return false;
            mpz_class unit = c[0];
            mpz_class rest;
            mpz_remove(rest.get_mpz_t(), unit.get_mpz_t(), pz.get_mpz_t());
            return dyadic_unit_is_square(rest);
        }
        return represents_square(shift(c, 0, pz), odd, pz, p, depth + 1) ||
               represents_square(shift(c, 1, pz), odd, pz, p, depth + 1);
    }
    Poly g(5);
    for (int i = 0; i < 5; ++i) g[i] = mpz_fdiv_ui(c[i].get_mpz_t(), p);
    trim(g);
    if (!odd && has_nonzero_square_value(g, p)) return true;
    for (u64 r : roots_mod_p(g, p))
        if (represents_square(shift(c, r, pz), odd, pz, p, depth + 1)) return true;
    return false;
}

bool finite_solvable(const CurveModel& e, i64 d, u64 p) {
    mpz_class a(e.a), b(e.b), dd(d), pz(static_cast<unsigned long>(p));
    mpz_class d2 = dd * dd;
    mpz_class d3 = d2 * dd;
    // chart v = 1:   d F(t, 1)
    Quartic c1{b * dd, 0, a * d2, 0, d3};
    if (represents_square(c1, false, pz, p, 0)) return true;
    // chart u = 1, v = p t:   d F(1, p t)
    mpz_class p2 = pz * pz;
    Quartic c2{d3, 0, a * d2 * p2, 0, b * dd * p2 * p2};
    return represents_square(c2, false, pz, p, 0);
}

bool real_solvable(const CurveModel& e, i64 d) {
    if (d > 0) return true;
    // need x <= 0 with x^2 + a x + b <= 0
    if (e.b < 0) return true;
    i128 disc = static_cast<i128>(e.a) * e.a - 4 * static_cast<i128>(e.b);
    return e.a >= 0 && disc >= 0;
}

}  // namespace

bool homog_space_solvable(const CurveModel& e, i64 d1, const Place& v) {
    if (d1 == 0) throw std::invalid_argument("homog_space_solvable: d1 must be nonzero");
    if (!e.nonsingular()) throw std::domain_error("homog_space_solvable: singular model");
    if (v.kind == PlaceKind::infinity) return real_solvable(e, d1);
    return finite_solvable(e, d1, static_cast<u64>(v.p));
}

bool LocalImage::contains(i64 n) const {
    return std::binary_search(classes.begin(), classes.end(), local_class(n, place));
}

LocalImage covering_image(const CurveModel& e, const Place& v) {
    LocalImage img{v, {}, 0};
    for (i64 rep : local_square_classes(v).representatives)
        if (homog_space_solvable(e, rep, v)) img.classes.push_back(rep);
    std::sort(img.classes.begin(), img.classes.end());
    std::size_t n = img.classes.size();
    if (n == 0 || (n & (n - 1)) != 0 || !std::binary_search(img.classes.begin(), img.classes.end(), i64{1}))
        throw std::logic_error("covering_image: solvable classes at " + v.name() + " for " + to_string(e) +
                               " do not form a subgroup");
    for (i64 x : img.classes)
        for (i64 y : img.classes)
            if (!std::binary_search(img.classes.begin(), img.classes.end(), local_class(x * y, v)))
                throw std::logic_error("covering_image: solvable classes at " + v.name() + " for " + to_string(e) +
                                       " are not closed under products");
    img.dim = __builtin_ctzll(n);
    return img;
}

LocalImage phi_image(const CurveModel& e, const Place& v) {
    return covering_image(dual_curve(e), v);
}

LocalImage phihat_image(const CurveModel& e, const Place& v) {
    return covering_image(e, v);
}

int local_phi_dim(const CurveModel& e, const Place& v) {
    return phi_image(e, v).dim;
}

int local_phi_hat_dim(const CurveModel& e, const Place& v) {
    return phihat_image(e, v).dim;
}

int local_phi_dim_twist_fast(const CurveModel& e, i64 p, i64 d) {
    if (p == 2 || !is_prime(p)) throw std::invalid_argument("local_phi_dim_twist_fast: p must be an odd prime");
    if (d == 0 || d % p != 0) throw std::invalid_argument("local_phi_dim_twist_fast: p must divide d");
    if (e.b % p == 0 || e.quad_disc() % p == 0)
        throw std::invalid_argument("local_phi_dim_twist_fast: p = " + std::to_string(p) + " divides the discriminant");
    int s = jacobi(delta_class(e), p);
    int sp = jacobi(delta_prime_class(e), p);
    return 1 + (sp - s) / 2;
}

LocalDimCache::LocalDimCache(const CurveModel& e, std::vector<Place> places) : places_(std::move(places)) {
    table_.reserve(places_.size());
    for (const Place& v : places_) {
        std::vector<std::pair<i64, int>> row;
        for (i64 rep : local_square_classes(v).representatives) row.emplace_back(rep, local_phi_dim(twist(e, rep), v));
        std::sort(row.begin(), row.end());
        table_.push_back(std::move(row));
    }
}

int LocalDimCache::dim(std::size_t i, i64 d) const {
    i64 cls = local_class(d, places_[i]);
    const auto& row = table_[i];
    auto it = std::lower_bound(row.begin(), row.end(), std::pair<i64, int>{cls, INT32_MIN});
    if (it == row.end() || it->first != cls) throw std::logic_error("LocalDimCache: missing class");
    return it->second;
}

std::size_t LocalDimCache::size() const {
    std::size_t n = 0;
    for (const auto& row : table_) n += row.size();
    return n;
}

void LocalDimCache::corrupt(std::size_t i, i64 cls, int delta) {
    for (auto& [c, dim] : table_.at(i))
        if (c == local_class(cls, places_[i])) dim += delta;
}

}  // namespace twosel
