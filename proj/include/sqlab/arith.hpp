#pragma once
// Exact 64-bit integer arithmetic: factorization, Jacobi symbols, the unit
// eps_m and square-root counting mod q.

#include <complex>
#include <cstdint>
#include <vector>

namespace sqlab {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using cplx = std::complex<double>;

struct PrimePower {
    u64 p;
    int k;
    bool operator==(const PrimePower&) const = default;
};

struct Factorization {
    u64 n = 1;
    std::vector<PrimePower> factors;  // primes strictly increasing

    u64 odd_part() const;
    int two_exponent() const;
};

// canonical representative of a mod q in [0, q)
inline i64 mod(i64 a, i64 q) {
    i64 r = a % q;
    return r < 0 ? r + q : r;
}

u64 gcd(u64 a, u64 b);
u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 b, u64 e, u64 m);
u64 ipow(u64 b, int e);
bool is_prime(u64 n);  // deterministic Miller-Rabin for n < 2^64

Factorization factorize(u64 n);

int jacobi(i64 a, i64 n);
cplx epsilon(i64 m);

u64 count_sqrts_bruteforce(i64 x, u64 q);
u64 count_sqrts(i64 x, u64 q);
// r_{p^k}(x) for a single prime power (k >= 0; p^0 gives 1)
u64 count_sqrts_prime_power(i64 x, u64 p, int k);

// x = p^n * x' with p not dividing x'; x = 0 gives n = -1 (infinite valuation)
int valuation(i64 x, u64 p);

}  // namespace sqlab
