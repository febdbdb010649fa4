#pragma once

// Exact integer primitives used throughout: Jacobi symbols, the squarefree
// SPF sieve, and small-integer factorization helpers.

#include <cstdint>
#include <span>
#include <vector>

namespace twosel {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

/// Jacobi symbol (a/n) for odd n >= 1. Throws std::domain_error otherwise.
int jacobi(i64 a, i64 n);

/// Kronecker symbol (a/2): 0 for even a, +1 for a = +-1 mod 8, -1 for a = +-3 mod 8.
int kronecker_two(i64 a);

/// Legendre-or-Kronecker symbol (c/p) for any prime p.
int prime_symbol(i64 c, i64 p);

/// Floor square root of a nonnegative integer.
u64 isqrt(u64 n);

bool is_square(i64 n);

/// v_p(n) for n != 0.
int valuation(i64 n, i64 p);

/// Sign-preserving squarefree kernel: n = kernel * m^2 with kernel squarefree.
/// n = 0 is rejected.
i64 squarefree_kernel(i64 n);

bool is_squarefree(i64 n);

/// Distinct primes of |n| by trial division, ascending. Intended for the
/// curve coefficients and twist parameters, not for large inputs.
std::vector<i64> prime_divisors(i64 n);

bool is_prime(i64 n);

/// Smallest quadratic nonresidue modulo an odd prime p.
i64 smallest_nonresidue(i64 p);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);

/// sigma(d) for squarefree d, i.e. prod_{p | d} (p + 1).
u64 sigma_divisors(u64 d);

/// Smallest-prime-factor sieve over 1..X with bit-packed squarefree flags.
/// Immutable after construction; safe for concurrent reads.
class SquarefreeTable {
public:
    explicit SquarefreeTable(u64 bound);

    u64 bound() const { return bound_; }
    bool is_squarefree(u64 n) const;
    /// Smallest prime factor of 2 <= n <= bound; spf(1) == 1.
    u64 spf(u64 n) const { return spf_[n]; }
    std::span<const std::uint32_t> primes() const { return primes_; }
    /// Number of squarefree n <= bound.
    u64 squarefree_count() const { return count_; }

    /// Distinct primes of a squarefree d <= bound, ascending.
    /// Throws std::invalid_argument if d is out of range or not squarefree.
    std::vector<u64> factor_squarefree(u64 d) const;

    /// Same as factor_squarefree without validation or allocation; returns
    /// the number of primes written to out (capacity >= 15 suffices below 2^64).
    int factor_into(u64 d, u64* out) const;

private:
    u64 bound_;
    u64 count_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<u64> sqfree_bits_;
    std::vector<std::uint32_t> primes_;
};

}  // namespace twosel
