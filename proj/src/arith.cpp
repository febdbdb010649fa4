#include "twosel/arith.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twosel {

int jacobi(i64 a, i64 n) {
    if (n <= 0 || (n & 1) == 0)
        throw std::domain_error("jacobi: modulus must be odd and positive, got " + std::to_string(n));
    u64 m = static_cast<u64>(n);
    i64 r = a % n;
    if (r < 0) r += n;
    u64 x = static_cast<u64>(r);
    int t = 1;
    while (x != 0) {
        int tz = __builtin_ctzll(x);
        x >>= tz;
        // (2/m) = -1 iff m = 3, 5 mod 8
        if ((tz & 1) && ((m & 7) == 3 || (m & 7) == 5)) t = -t;
        // reciprocity flip when both are 3 mod 4
        if ((x & 3) == 3 && (m & 3) == 3) t = -t;
        u64 tmp = m % x;
        m = x;
        x = tmp;
    }
    return m == 1 ? t : 0;
}

int kronecker_two(i64 a) {
    if ((a & 1) == 0) return 0;
    i64 r = ((a % 8) + 8) % 8;
    return (r == 1 || r == 7) ? 1 : -1;
}

int prime_symbol(i64 c, i64 p) {
    return p == 2 ? kronecker_two(c) : jacobi(c, p);
}

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<i128>(r) * r > static_cast<i128>(n)) --r;
    while (static_cast<i128>(r + 1) * (r + 1) <= static_cast<i128>(n)) ++r;
    return r;
}

bool is_square(i64 n) {
    if (n < 0) return false;
    u64 r = isqrt(static_cast<u64>(n));
    return r * r == static_cast<u64>(n);
}

int valuation(i64 n, i64 p) {
    if (n == 0) throw std::domain_error("valuation of zero");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

i64 squarefree_kernel(i64 n) {
    if (n == 0) throw std::domain_error("squarefree_kernel of zero");
    i64 sign = n < 0 ? -1 : 1;
    u64 m = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
    u64 kernel = 1;
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e & 1) kernel *= p;
    }
    // leftover is 1 or a prime
    kernel *= m;
    return sign * static_cast<i64>(kernel);
}

bool is_squarefree(i64 n) {
    if (n == 0) return false;
    u64 m = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p == 0) {
            m /= p;
            if (m % p == 0) return false;
        }
    }
    return true;
}

std::vector<i64> prime_divisors(i64 n) {
    if (n == 0) throw std::domain_error("prime_divisors of zero");
    u64 m = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
    std::vector<i64> out;
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p == 0) {
            out.push_back(static_cast<i64>(p));
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) out.push_back(static_cast<i64>(m));
    return out;
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (i64 d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

i64 smallest_nonresidue(i64 p) {
    if (p < 3 || (p & 1) == 0) throw std::domain_error("smallest_nonresidue needs an odd prime");
    for (i64 u = 2;; ++u)
        if (jacobi(u, p) == -1) return u;
}

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

u64 sigma_divisors(u64 d) {
    if (d == 0) throw std::domain_error("sigma_divisors of zero");
    u64 s = 1;
    u64 m = d;
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p == 0) {
            m /= p;
            if (m % p == 0) throw std::invalid_argument("sigma_divisors: " + std::to_string(d) + " is not squarefree");
            s *= p + 1;
        }
    }
    if (m > 1) s *= m + 1;
    return s;
}

SquarefreeTable::SquarefreeTable(u64 bound) : bound_(bound) {
    if (bound < 1) throw std::invalid_argument("SquarefreeTable: bound must be >= 1");
    if (bound >= (u64{1} << 32)) throw std::invalid_argument("SquarefreeTable: bound too large");
    spf_.assign(bound + 1, 0);
    spf_[1] = 1;
    // linear sieve
    for (u64 i = 2; i <= bound; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<std::uint32_t>(i);
            primes_.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes_) {
            if (p > spf_[i] || static_cast<u64>(p) * i > bound) break;
            spf_[static_cast<u64>(p) * i] = p;
        }
    }
    sqfree_bits_.assign(bound / 64 + 1, ~u64{0});
    sqfree_bits_[0] &= ~u64{1};  // 0 is not in range
    for (std::uint32_t p : primes_) {
        u64 q = static_cast<u64>(p) * p;
        if (q > bound) break;
        for (u64 m = q; m <= bound; m += q) sqfree_bits_[m >> 6] &= ~(u64{1} << (m & 63));
    }
    // clear bits past the bound
    u64 tail = (bound + 1) & 63;
    if (tail) sqfree_bits_.back() &= (u64{1} << tail) - 1;
    for (u64 w : sqfree_bits_) count_ += static_cast<u64>(__builtin_popcountll(w));
}

bool SquarefreeTable::is_squarefree(u64 n) const {
    if (n == 0 || n > bound_) return false;
    return (sqfree_bits_[n >> 6] >> (n & 63)) & 1;
}

std::vector<u64> SquarefreeTable::factor_squarefree(u64 d) const {
    if (d == 0 || d > bound_) throw std::invalid_argument("factor_squarefree: " + std::to_string(d) + " out of range");
    if (!is_squarefree(d)) throw std::invalid_argument("factor_squarefree: " + std::to_string(d) + " is not squarefree");
    u64 buf[16];
    int k = factor_into(d, buf);
    return {buf, buf + k};
}

int SquarefreeTable::factor_into(u64 d, u64* out) const {
    int k = 0;
    while (d > 1) {
        u64 p = spf_[d];
        out[k++] = p;
        d /= p;
    }
    return k;
}

}  // namespace twosel
