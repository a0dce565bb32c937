#include "sqlab/gauss.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sqlab {

namespace {

void neumaier(double& s, double& c, double v) {
    double t = s + v;
    if (std::abs(s) >= std::abs(v))
        c += (s - t) + v;
    else
        c += (v - t) + s;
    s = t;
}

// e(k/16) from a table so the closed forms carry no trig error
cplx root16(i64 k) {
    static const std::array<cplx, 16> tab = [] {
        std::array<cplx, 16> t{};
        for (int j = 0; j < 16; ++j) t[j] = std::polar(1.0, std::numbers::pi * j / 8);
        t[0] = 1;
        t[4] = {0, 1};
        t[8] = -1;
        t[12] = {0, -1};
        return t;
    }();
    return tab[mod(k, 16)];
}

cplx direct_sum(i64 a, i64 q) {
    // (1/q) sum_{n<q} e(a n^2 / q)
    u64 uq = (u64)q;
    u64 ua = (u64)mod(a, q);
    KahanC acc;
    if (uq < (u64(1) << 31)) {
        // a n^2 mod q by exact differences: step a(2n+1), which grows by 2a
        u64 r = 0, d = ua % uq, dd = (2 * ua) % uq;
        for (u64 n = 0; n < uq; ++n) {
            acc.add(e_frac((i64)r, q));
            r += d;
            if (r >= uq) r -= uq;
            d += dd;
            if (d >= uq) d -= uq;
        }
        return acc.value() / (double)q;
    }
    for (u64 n = 0; n < uq; ++n) {
        u64 r = mulmod(ua, mulmod(n, n, uq), uq);
        acc.add(e_frac((i64)r, q));
    }
    return acc.value() / (double)q;
}

}  // namespace

void KahanC::add(cplx z) {
    neumaier(re, cre, z.real());
    neumaier(im, cim, z.imag());
}

cplx e_frac(i64 num, i64 den) {
    i64 r = mod(num, den);
    if (r == 0) return 1.0;
    // fold to the nearest multiple of 1/8 turn exactly, rest by sincos on a small angle
    if (r < (i64(1) << 58)) {
        if ((16 * r) % den == 0) return root16(16 * r / den);
    } else if ((16 * (__int128)r) % den == 0) {
        return root16((i64)((16 * (__int128)r) / den));
    }
    double t = (double)r / (double)den;
    if (t > 0.5) t -= 1.0;
    double ang = 2 * std::numbers::pi * t;
    return {std::cos(ang), std::sin(ang)};
}

cplx gauss_G(i64 a, i64 q, Method m) {
    if (q <= 0) throw std::domain_error("gauss_G: q must be positive");
    if (m == Method::direct) return direct_sum(a, q);
    i64 ar = mod(a, q);
    i64 g = (i64)gcd((u64)ar, (u64)q);
    i64 a1 = ar / g, q1 = q / g;
    if (q1 == 1) return 1.0;
    double s = 1.0 / std::sqrt((double)q1);
    if (q1 % 2 == 1) return epsilon(q1) * (s * jacobi(a1, q1));
    if (q1 % 4 == 2) return 0.0;
    cplx inv_eps = std::conj(epsilon(a1));
    return cplx(1, 1) * inv_eps * (s * jacobi(q1, a1));
}

cplx gauss_G0(i64 a, i64 q, Method m) {
    if (q <= 0) throw std::domain_error("gauss_G0: q must be positive");
    if (m == Method::direct) return direct_sum(a, 2 * q);
    i64 ar = mod(a, 2 * q);
    i64 g = (i64)gcd((u64)ar, (u64)q);
    i64 a1 = ar / g, q1 = q / g;
    if (a1 == 0) return 1.0;
    double s = 1.0 / std::sqrt((double)q1);
    if (a1 % 2 == 1 && q1 % 2 == 1) return 0.0;
    if (a1 % 2 == 0) {
        i64 t = mod(q1 - 1, 16);
        return root16(t * t) * (s * jacobi(2 * a1, q1));
    }
    return root16(2 * a1) * (s * jacobi(q1, a1));
}

}  // namespace sqlab
