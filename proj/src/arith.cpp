#include "sqlab/arith.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sqlab {

using u128 = unsigned __int128;

u64 Factorization::odd_part() const {
    u64 r = 1;
    for (auto& f : factors)
        if (f.p != 2) r *= ipow(f.p, f.k);
    return r;
}

int Factorization::two_exponent() const {
    if (!factors.empty() && factors.front().p == 2) return factors.front().k;
    return 0;
}

u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }

u64 mulmod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }

u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

u64 ipow(u64 b, int e) {
    u64 r = 1;
    while (e-- > 0) r *= b;
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    static const u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : small) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Pollard-Brent rho

namespace {

u64 rho(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void split(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = rho(n);
    split(d, out);
    split(n / d, out);
}

}  // namespace

Factorization factorize(u64 n) {
    if (n == 0) throw std::domain_error("factorize: n must be positive");
    if (n > (u64)INT64_MAX) throw std::domain_error("factorize: n exceeds 2^63-1");
    Factorization f;
    f.n = n;
    std::vector<u64> primes;
    for (u64 p = 2; p <= 1000000 && p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            primes.push_back(p);
            n /= p;
        }
    }
    if (n > 1) split(n, primes);
    std::sort(primes.begin(), primes.end());
    for (u64 p : primes) {
        if (!f.factors.empty() && f.factors.back().p == p)
            ++f.factors.back().k;
        else
            f.factors.push_back({p, 1});
    }
    return f;
}

// ---------------------------------------------------------------------------

int jacobi(i64 a_in, i64 n_in) {
    if (n_in <= 0 || n_in % 2 == 0) throw std::domain_error("jacobi: n must be odd and positive");
    u64 n = (u64)n_in;
    u64 a = (u64)mod(a_in, n_in);
    int t = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            u64 r = n & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

cplx epsilon(i64 m) {
    if (m % 2 == 0) throw std::domain_error("epsilon: m must be odd");
    return mod(m, 4) == 1 ? cplx(1, 0) : cplx(0, 1);
}

// ---------------------------------------------------------------------------
// square roots

u64 count_sqrts_bruteforce(i64 x, u64 q) {
    if (q == 0) throw std::domain_error("count_sqrts: q must be positive");
    u64 xr = (u64)mod(x, (i64)q);
    u64 c = 0;
    for (u64 l = 0; l < q; ++l)
        if (mulmod(l, l, q) == xr) ++c;
    return c;
}

int valuation(i64 x, u64 p) {
    if (x == 0) return -1;
    u64 v = (u64)(x < 0 ? -x : x);
    int n = 0;
    while (v % p == 0) {
        v /= p;
        ++n;
    }
    return n;
}

namespace {

// odd p: three-case formula. x reduced mod p^k.
u64 sqrts_odd(u64 x, u64 p, int k) {
    u64 pk = ipow(p, k);
    x %= pk;
    if (x == 0) return ipow(p, k / 2);
    int n = 0;
    u64 xp = x;
    while (xp % p == 0) {
        xp /= p;
        ++n;
    }
    if (n % 2 == 1) return 0;
    if (jacobi((i64)(xp % p), (i64)p) != 1) return 0;
    return 2 * ipow(p, n / 2);
}

// 2^k: enumeration below 2^20, 2-adic case analysis above
u64 sqrts_two(u64 x, int k) {
    u64 q = u64(1) << k;
    x &= q - 1;
    if (k <= 20) return count_sqrts_bruteforce((i64)x, q);
    if (x == 0) return u64(1) << (k / 2);
    int n = 0;
    while ((x & 1) == 0) {
        x >>= 1;
        ++n;
    }
    if (n % 2 == 1) return 0;
    int m = k - n;
    u64 s;
    if (m == 1)
        s = 1;
    else if (m == 2)
        s = (x % 4 == 1) ? 2 : 0;
    else
        s = (x % 8 == 1) ? 4 : 0;
    return (u64(1) << (n / 2)) * s;
}

}  // namespace

u64 count_sqrts_prime_power(i64 x, u64 p, int k) {
    if (k == 0) return 1;
    u64 pk = ipow(p, k);
    u64 xr = (u64)mod(x, (i64)pk);
    return p == 2 ? sqrts_two(xr, k) : sqrts_odd(xr, p, k);
}

u64 count_sqrts(i64 x, u64 q) {
    if (q == 0) throw std::domain_error("count_sqrts: q must be positive");
    u64 r = 1;
    for (auto& f : factorize(q).factors) {
        r *= count_sqrts_prime_power(x, f.p, f.k);
        if (r == 0) break;
    }
    return r;
}

}  // namespace sqlab
