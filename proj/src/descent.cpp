#include "twosel/descent.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace twosel {

bool SelmerBasis::contains(i64 cls) const {
    return std::binary_search(members.begin(), members.end(), cls);
}

i64 class_product(i64 a, i64 b) {
    i64 g = std::gcd(a, b);
    return (a / g) * (b / g);
}

std::vector<Place> selmer_support(const CurveModel& e) {
    std::vector<Place> s{Place::infinity(), Place::two()};
    for (i64 p : bad_odd_primes(e)) s.push_back(Place::prime(p));
    return s;
}

std::vector<i64> global_class_group(std::span<const Place> support) {
    std::vector<i64> gens{-1};
    for (const Place& v : support)
        if (v.finite()) gens.push_back(v.p);
    std::vector<i64> out{1};
    for (i64 g : gens) {
        std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] * g);
    }
    std::sort(out.begin(), out.end());
    return out;
}

SelmerBasis covering_selmer(const CurveModel& model) {
    SelmerBasis sel;
    sel.support = selmer_support(model);
    std::vector<LocalImage> images;
    images.reserve(sel.support.size());
    for (const Place& v : sel.support) images.push_back(covering_image(model, v));

    for (i64 cls : global_class_group(sel.support)) {
        bool ok = std::all_of(images.begin(), images.end(), [&](const LocalImage& img) { return img.contains(cls); });
        if (ok) sel.members.push_back(cls);
    }
    std::size_t n = sel.members.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::logic_error("covering_selmer: member count is not a power of two");

    // greedy basis, smallest absolute values first
    std::vector<i64> by_size = sel.members;
    std::stable_sort(by_size.begin(), by_size.end(), [](i64 x, i64 y) { return std::abs(x) < std::abs(y); });
    std::vector<i64> span{1};
    for (i64 cls : by_size) {
        if (std::find(span.begin(), span.end(), cls) != span.end()) continue;
        sel.generators.push_back(cls);
        std::size_t m = span.size();
        for (std::size_t i = 0; i < m; ++i) span.push_back(class_product(span[i], cls));
    }
    sel.dimension = static_cast<int>(sel.generators.size());
    if ((std::size_t{1} << sel.dimension) != n) throw std::logic_error("covering_selmer: members do not form a group");
    return sel;
}

SelmerBasis phi_selmer(const CurveModel& e) {
    return covering_selmer(dual_curve(e));
}

SelmerBasis phihat_selmer(const CurveModel& e) {
    return covering_selmer(e);
}

std::optional<std::array<i64, 3>> naive_point_search(const CurveModel& model, i64 d1, i64 bound) {
    if (d1 == 0) throw std::invalid_argument("naive_point_search: d1 must be nonzero");
    const i128 d = d1, a = model.a, b = model.b;
    std::optional<std::array<i64, 3>> best;
    i64 best_h = 0;
    for (i64 u = 0; u <= bound; ++u) {
        if (best && u >= best_h) break;
        for (i64 v = 0; v <= bound; ++v) {
            i64 h = std::max(u, v);
            if (best && h >= best_h) break;
            if ((u == 0 && v == 0) || std::gcd(u, v) != 1) continue;
            i128 u2 = static_cast<i128>(u) * u, v2 = static_cast<i128>(v) * v;
            i128 rhs = d * d * u2 * u2 + a * d * u2 * v2 + b * v2 * v2;
            if (rhs % d != 0) continue;
            i128 w2 = rhs / d;
            if (w2 < 0 || w2 > static_cast<i128>(INT64_MAX)) continue;
            if (!is_square(static_cast<i64>(w2))) continue;
            best = std::array<i64, 3>{u, v, static_cast<i64>(isqrt(static_cast<u64>(w2)))};
            best_h = h;
        }
    }
    return best;
}

}  // namespace twosel
