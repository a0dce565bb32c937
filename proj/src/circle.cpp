#include "sqlab/circle.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "sqlab/gauss.hpp"
#include "sqlab/parallel.hpp"

namespace sqlab {

using i128 = __int128;
using std::numbers::pi;

std::mutex& fftw_plan_mutex() {
    static std::mutex mu;
    return mu;
}

bool is_pow2(i64 v) { return v > 0 && (v & (v - 1)) == 0; }

int ilog2(i64 v) {
    int r = -1;
    while (v > 0) {
        v >>= 1;
        ++r;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Dyadic

Dyadic Dyadic::from_double(double xi) {
    if (!std::isfinite(xi)) throw std::domain_error("Dyadic: non-finite frequency");
    double f = xi - std::floor(xi);
    long double scaled = std::ldexp((long double)f, 62);
    u64 m = (u64)std::llroundl(scaled);
    Dyadic d{m, 62};
    if (d.m == (u64(1) << 62)) d.m = 0;
    while (d.e > 0 && (d.m & 1) == 0 && d.m != 0) {
        d.m >>= 1;
        --d.e;
    }
    if (d.m == 0) d.e = 0;
    return d;
}

double Dyadic::value() const { return std::ldexp((double)m, -e); }

// ---------------------------------------------------------------------------
// eta: smooth step psi(u) = f(u) / (f(u) + f(1-u)), f(u) = exp(-1/u)

namespace {

double smooth_step(double u) {
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    double a = std::exp(-1.0 / u);
    double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

}  // namespace

double eta(double t) {
    double a = std::abs(t);
    if (a <= 0.25) return 1;
    if (a >= 0.5) return 0;
    return smooth_step(4.0 * (0.5 - a));
}

// ---------------------------------------------------------------------------
// Weyl sum

cplx weyl_multiplier(Dyadic xi, i64 N) {
    if (N < 1) throw std::domain_error("weyl_multiplier: N must be positive");
    // phase k^2 m mod 2^e, exact
    const u64 mask = xi.e == 0 ? 0 : (xi.e == 64 ? ~u64(0) : (u64(1) << xi.e) - 1);
    KahanC acc;
    for (i64 k = 1; k <= N; ++k) {
        u64 r = (u64)(((unsigned __int128)((u64)k * (u64)k) * xi.m) & mask);
        double t = std::ldexp((double)r, -xi.e);
        if (t >= 0.5) t -= 1.0;
        acc.add({std::cos(2 * pi * t), std::sin(2 * pi * t)});
    }
    return acc.value() / (double)N;
}

cplx weyl_multiplier(double xi, i64 N) { return weyl_multiplier(Dyadic::from_double(xi), N); }

MultiplierGrid weyl_grid(i64 N, i64 L) {
    if (!is_pow2(L)) throw std::domain_error("weyl_grid: L must be a power of two");
    MultiplierGrid g;
    g.L = L;
    g.values.assign(L, 0.0);
    for (i64 k = 1; k <= N; ++k) g.values[(i64)(((u64)k * (u64)k) & (u64)(L - 1))] += 1.0;
    {
        fftw_plan p;
        {
            std::lock_guard<std::mutex> lk(fftw_plan_mutex());
            auto* buf = reinterpret_cast<fftw_complex*>(g.values.data());
            p = fftw_plan_dft_1d((int)L, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        fftw_execute(p);
        std::lock_guard<std::mutex> lk(fftw_plan_mutex());
        fftw_destroy_plan(p);
    }
    for (auto& v : g.values) v /= (double)N;
    return g;
}

// ---------------------------------------------------------------------------
// Fresnel integrals (series below 1.5, complex continued fraction above)

void fresnel(double x, double& C, double& S) {
    const double eps = 1e-16;
    const int maxit = 400;
    double ax = std::abs(x);
    if (ax < 1e-150) {
        C = ax;
        S = 0;
    } else if (ax <= 1.5) {
        double sum = 0, sums = 0, sumc = ax, sign = 1, fact = 0.5 * pi * ax * ax, term = ax;
        bool odd = true;
        int n = 3;
        for (int k = 1; k <= maxit; ++k) {
            term *= fact / k;
            sum += sign * term / n;
            double test = std::abs(sum) * eps;
            if (odd) {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if (term < test) break;
            odd = !odd;
            n += 2;
        }
        S = sums;
        C = sumc;
    } else {
        double pix2 = pi * ax * ax;
        cplx b(1.0, -pix2);
        cplx cc(1e300, 0.0);
        cplx d = 1.0 / b, h = d;
        int n = -1;
        for (int k = 2; k <= maxit; ++k) {
            n += 2;
            double a = -(double)n * (n + 1);
            b += 4.0;
            d = 1.0 / (a * d + b);
            cc = b + a / cc;
            cplx del = cc * d;
            h *= del;
            if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
        }
        h *= cplx(ax, -ax);
        // cos/sin of pi x^2 / 2 with the argument reduced mod 2 first
        double half = std::fmod(0.5 * ax * ax, 2.0);
        cplx ph(std::cos(pi * half), std::sin(pi * half));
        cplx cs = cplx(0.5, 0.5) * (1.0 - ph * h);
        C = cs.real();
        S = cs.imag();
    }
    if (x < 0) {
        C = -C;
        S = -S;
    }
}

cplx gamma_N_fresnel(double xi, i64 N) {
    double lam = xi * (double)N * (double)N;
    if (lam == 0) return 1.0;
    double x = std::sqrt(2.0 * std::abs(lam));
    double C, S;
    fresnel(x, C, S);
    cplx v(C / x, S / x);
    return lam < 0 ? std::conj(v) : v;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [-1,1] by Newton iteration

namespace {

struct GL {
    std::array<double, 15> x{}, w{};
};

const GL& gl15() {
    static const GL g = [] {
        GL r;
        const int n = 15;
        for (int i = 0; i < n; ++i) {
            double z = std::cos(pi * (i + 0.75) / (n + 0.5));
            double pp = 0;
            for (int it = 0; it < 100; ++it) {
                double p1 = 1, p2 = 0;
                for (int j = 1; j <= n; ++j) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j - 1) * z * p2 - (j - 1.0) * p3) / j;
                }
                pp = n * (z * p1 - p2) / (z * z - 1);
                double dz = p1 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            r.x[i] = z;
            r.w[i] = 2 / ((1 - z * z) * pp * pp);
        }
        return r;
    }();
    return g;
}

template <class F>
cplx gl_panel(F&& f, double a, double b, double* absint = nullptr) {
    const GL& g = gl15();
    double h = 0.5 * (b - a);
    cplx s = 0;
    double m = 0;
    for (int i = 0; i < 15; ++i) {
        // node passed as (left end, offset) so f can form its phase without
        // rounding the node itself
        cplx v = f(a, h * (1.0 + g.x[i]));
        s += g.w[i] * v;
        m += g.w[i] * std::abs(v);
    }
    if (absint) *absint += m * h;
    return s * h;
}

// GL15 on [a,b], refined by bisection until the halves agree to tol, or to a
// few ulps of the integral of |f| once tol is below what doubles resolve
template <class F>
cplx adaptive_panel(F&& f, double a, double b, double tol, long& budget, int depth = 0) {
    cplx whole = gl_panel(f, a, b);
    double m = 0.5 * (a + b), absint = 0;
    cplx halves = gl_panel(f, a, m, &absint) + gl_panel(f, m, b, &absint);
    budget -= 3;
    if (budget < 0) throw std::runtime_error("quadrature: panel budget exceeded");
    double err = std::abs(whole - halves);
    if (err <= tol || err <= 1e-15 * absint || depth > 30) return halves;
    return adaptive_panel(f, a, m, 0.5 * tol, budget, depth + 1) +
           adaptive_panel(f, m, b, 0.5 * tol, budget, depth + 1);
}

constexpr long kPanelBudget = 1L << 24;

}  // namespace

cplx gamma_N(double xi, i64 N, double tol) {
    if (N < 1) throw std::domain_error("gamma_N: N must be positive");
    if (!(tol >= 1e-12)) tol = 1e-12;
    double lam = xi * (double)N * (double)N;
    if (lam == 0) return 1.0;
    double al = std::abs(lam);
    // phase pi lam u^2 advances by pi between u_k = sqrt(k/|lam|)
    long npan = (long)std::floor(al);
    if (npan > kPanelBudget / 8) throw std::runtime_error("gamma_N: panel budget exceeded");
    // phase in long double: at |lam| ~ 1e5 a double product leaves ~1e-11 of noise
    auto f = [lam](double a, double d) {
        const long double L = lam, A = a, D = d;
        double ph = (double)fmodl(0.5L * L * A * A + L * A * D + 0.5L * L * D * D, 1.0L);
        return cplx(std::cos(2 * pi * ph), std::sin(2 * pi * ph));
    };
    long budget = kPanelBudget;
    double per = tol / (double)(npan + 1);
    KahanC acc;
    double prev = 0;
    for (long k = 1; k <= npan + 1; ++k) {
        double u = (k <= npan) ? std::sqrt((double)k / al) : 1.0;
        if (u > 1.0) u = 1.0;
        if (u > prev) acc.add(adaptive_panel(f, prev, u, per, budget));
        prev = u;
    }
    return acc.value();
}

cplx gamma_N_fourier(double xi, i64 N, double tol) {
    if (N < 1) throw std::domain_error("gamma_N: N must be positive");
    if (!(tol >= 1e-12)) tol = 1e-12;
    // h(t) = chi_[0,1](t) / (2 sqrt t); gamma_N(xi) = F(h)(-N^2 xi / 2)
    double lam = xi * (double)N * (double)N;
    if (lam == 0) return 1.0;
    double al = std::abs(lam);
    auto f = [lam](double a, double d) {
        const double t = a + d;
        double ph = (double)fmodl(0.5L * (long double)lam * ((long double)a + (long double)d), 1.0L);
        return cplx(std::cos(2 * pi * ph), std::sin(2 * pi * ph)) / (2.0 * std::sqrt(t));
    };
    // oscillation panels of width 2/|lam| (phase advance pi), first one graded to 0
    double w = std::min(1.0, 2.0 / al);
    long npan = (long)std::ceil(1.0 / w);
    if (npan > kPanelBudget / 8) throw std::runtime_error("gamma_N_fourier: panel budget exceeded");
    long budget = kPanelBudget;
    double per = tol / (double)(npan + 64);
    KahanC acc;
    // [0, eps] analytically (phase ~ 1 there), then geometric panels up to w
    double lo = w * std::ldexp(1.0, -60);
    acc.add(std::sqrt(lo));
    for (double a = lo; a < w; a *= 2) acc.add(adaptive_panel(f, a, std::min(2 * a, w), per, budget));
    for (long k = 1; k < npan; ++k) {
        double a = k * w, b = std::min(1.0, (k + 1) * w);
        if (b > a) acc.add(adaptive_panel(f, a, b, per, budget));
    }
    return acc.value();
}

// ---------------------------------------------------------------------------
// Dirichlet approximation on exact dyadics

namespace {

// |2 xi - a/q| <= 1/(4Nq)  <=>  4N |2 m q - a 2^e| <= 2^e
bool ok_exact(Dyadic xi, i64 N, i64 a, i64 q) {
    i128 num = (i128)2 * (i128)xi.m * q - (i128)a * ((i128)1 << xi.e);
    if (num < 0) num = -num;
    return (i128)4 * N * num <= ((i128)1 << xi.e);
}

Rational canonical(i64 a, i64 q) {
    i64 g = (i64)gcd((u64)std::abs(a), (u64)q);
    if (g > 1) {
        a /= g;
        q /= g;
    }
    return {mod(a, 2 * q), q};
}

}  // namespace

bool dirichlet_ok(Dyadic xi, i64 N, Rational r) {
    if (r.q < 1 || r.q > 4 * N || gcd((u64)r.a, (u64)r.q) != 1) return false;
    // any representative a + 2kq of the arc center on 2T
    for (i64 shift : {0L, -2L, 2L})
        if (ok_exact(xi, N, r.a + shift * r.q, r.q)) return true;
    return false;
}

std::optional<Rational> dirichlet_bruteforce(Dyadic xi, i64 N) {
    for (i64 q = 1; q <= 4 * N; ++q) {
        // nearest a to 2 xi q
        i128 t = (i128)2 * xi.m * q;
        i64 a = (i64)((t + ((i128)1 << xi.e) / 2) >> xi.e);
        if (xi.e == 0) a = (i64)t;
        for (i64 c : {a - 1, a, a + 1})
            if (ok_exact(xi, N, c, q)) return canonical(c, q);
    }
    return std::nullopt;
}

Rational dirichlet_approx(Dyadic xi, i64 N) {
    if (N < 1) throw std::domain_error("dirichlet_approx: N must be positive");
    // continued fraction of alpha = 2m / 2^e
    i128 p = (i128)2 * xi.m, d = (i128)1 << xi.e;
    i128 h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    while (d != 0) {
        i128 a = p / d;
        i128 r = p - a * d;
        i128 h2 = a * h1 + h0, k2 = a * k1 + k0;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (k1 > 4 * N) break;
        if (ok_exact(xi, N, (i64)h1, (i64)k1)) return canonical((i64)h1, (i64)k1);
        p = d;
        d = r;
    }
    if (N <= 64)
        if (auto r = dirichlet_bruteforce(xi, N)) return *r;
    throw std::logic_error("dirichlet_approx: no approximant found");
}

Rational dirichlet_approx(double xi, i64 N) { return dirichlet_approx(Dyadic::from_double(xi), N); }

double arc_offset(Dyadic xi, Rational r) {
    // theta = (2 m q - a 2^e) / (q 2^e), wrapped mod 2 into [-1, 1)
    i128 den = (i128)r.q << xi.e;
    i128 num = (i128)2 * xi.m * r.q - (i128)r.a * ((i128)1 << xi.e);
    i128 per = 2 * den;
    num %= per;
    if (num < 0) num += per;
    if (num >= den) num -= per;
    return (double)((long double)num / (long double)den);
}

std::vector<Rational> arcs_at_level(int s) {
    if (s < 1 || s > 30) throw std::domain_error("arcs_at_level: s out of range");
    std::vector<Rational> out;
    for (i64 q = i64(1) << (s - 1); q < (i64(1) << s); ++q)
        for (i64 a = 0; a < 2 * q; ++a)
            if (gcd((u64)a, (u64)q) == 1) out.push_back({a, q});
    return out;
}

// ---------------------------------------------------------------------------
// arc records

namespace {

// the unique arc of level s whose eta_{2^{2s}} support contains 2 xi, if any
std::optional<std::pair<Rational, double>> find_arc(Dyadic xi, int s) {
    const double half = std::ldexp(1.0, -2 * s - 1);
    for (i64 q = i64(1) << (s - 1); q < (i64(1) << s); ++q) {
        i128 t = (i128)2 * xi.m * q;
        i64 a = (i64)((t + ((i128)1 << xi.e) / 2) >> xi.e);
        Rational r{mod(a, 2 * q), q};
        if (gcd((u64)r.a, (u64)q) != 1) continue;
        double th = arc_offset(xi, r);
        if (std::abs(th) < half) return std::make_pair(r, th);
    }
    return std::nullopt;
}

void check_scales(i64 N, i64 M, i64 J) {
    if (N < 1) throw std::domain_error("arc_multipliers: N must be positive");
    if (!is_pow2(M) || M < 2 || 4 * M > N) throw std::domain_error("arc_multipliers: need M = 2^m, 2 <= M <= N/4");
    if (J != 0 && (!is_pow2(J) || J < 2 || J > M))
        throw std::domain_error("arc_multipliers: need J = 2^s0 with 2 <= J <= M");
}

ArcRecord build_record(Dyadic xi, i64 N, i64 M, i64 J, cplx weyl) {
    check_scales(N, M, J);
    ArcRecord rec;
    rec.weyl = weyl;
    const int m = ilog2(M);
    const int s0 = J ? ilog2(J) : 0;
    const double N2 = (double)N * (double)N;
    rec.levels.assign(m, 0.0);
    rec.level_arc.assign(m, std::nullopt);
    rec.a_N = rec.tilde = rec.b_tau1 = rec.b_tau2 = 0.0;
    for (int s = 1; s <= m; ++s) {
        auto arc = find_arc(xi, s);
        if (!arc) continue;
        auto [r, th] = *arc;
        cplx g0 = gauss_G0(r.a, r.q);
        cplx gam = gamma_N_fresnel(th, N);
        cplx as = g0 * eta(std::ldexp(th, 2 * s)) * gam;
        rec.levels[s - 1] = as;
        rec.level_arc[s - 1] = r;
        rec.a_N += as;
        if (J && s <= s0) {
            cplx a1 = g0 * eta(th * (double)r.q * N2 / (double)J) * gam;
            rec.tilde += a1;
            rec.b_tau1 += as - a1;
        } else {
            rec.b_tau2 += as;
        }
    }
    rec.c_N = rec.weyl - rec.a_N;
    rec.b_N1 = rec.tilde;
    rec.b_N2 = rec.a_N - rec.tilde;
    return rec;
}

}  // namespace

ArcRecord arc_multipliers(Dyadic xi, i64 N, i64 M, i64 J) {
    check_scales(N, M, J);
    return build_record(xi, N, M, J, weyl_multiplier(xi, N));
}

ArcRecord arc_multipliers(double xi, i64 N, i64 M, i64 J) {
    return arc_multipliers(Dyadic::from_double(xi), N, M, J);
}

FjkResult fjk_remainder(Dyadic xi, i64 N) {
    FjkResult r;
    r.approx = dirichlet_approx(xi, N);
    double th = arc_offset(xi, r.approx);
    cplx main = gauss_G0(r.approx.a, r.approx.q) * gamma_N_fresnel(th, N);
    r.remainder = std::abs(weyl_multiplier(xi, N) - main);
    r.constant = r.remainder * (double)N / std::sqrt((double)r.approx.q);
    return r;
}

FjkResult fjk_remainder(double xi, i64 N) { return fjk_remainder(Dyadic::from_double(xi), N); }

// ---------------------------------------------------------------------------
// grids

namespace {

// add sign * G0 eta(k theta) gamma_N(theta) for every arc of levels [s_lo, s_hi];
// k = 2^{2s} (major-arc bumps) or q N^2 / J (fixed-scale bumps)
void fill_arcs(std::vector<cplx>& v, i64 L, i64 N, int s_lo, int s_hi, i64 J, double sign, int threads) {
    const double N2 = (double)N * (double)N;
    for (int s = s_lo; s <= s_hi; ++s) {
        auto arcs = arcs_at_level(s);
        // arcs of one level have disjoint supports, so parallel writes never collide
        parallel_for(arcs.size(), threads, [&](std::size_t i) {
            Rational r = arcs[i];
            double k = J ? (double)r.q * N2 / (double)J : std::ldexp(1.0, 2 * s);
            cplx g0 = gauss_G0(r.a, r.q);
            // 2j/L - a/q in (-1/(2k), 1/(2k))  <=>  j in L (a/(2q) -+ 1/(4k))
            double c = (double)L * (double)r.a / (2.0 * (double)r.q);
            double w = (double)L / (4.0 * k);
            i64 jlo = (i64)std::ceil(c - w), jhi = (i64)std::floor(c + w);
            const double den = (double)L * (double)r.q;
            for (i64 j = jlo; j <= jhi; ++j) {
                i128 num = (i128)2 * j * r.q - (i128)r.a * L;
                double th = (double)num / den;
                double e = eta(k * th);
                if (e == 0) continue;
                v[mod(j, L)] += sign * g0 * e * gamma_N_fresnel(th, N);
            }
        });
    }
}

}  // namespace

MultiplierGrid sample_multiplier(const GridSpec& sp, int threads) {
    const i64 N = sp.N, L = sp.L;
    if (N < 1) throw std::domain_error("sample_multiplier: N must be positive");
    if (!is_pow2(L) || (double)L < 4.0 * (double)N * (double)N)
        throw std::domain_error("sample_multiplier: need L = 2^k >= 4 N^2");
    MultiplierGrid g;
    g.L = L;
    auto need_M = [&] {
        if (!is_pow2(sp.M) || sp.M < 2 || 4 * sp.M > N) throw std::domain_error("sample_multiplier: need M = 2^m <= N/4");
    };
    auto need_J = [&] {
        if (!is_pow2(sp.J) || sp.J < 2 || 4 * sp.J > N) throw std::domain_error("sample_multiplier: need J = 2^s0 <= N/4");
    };
    switch (sp.which) {
        case Which::weyl:
            return weyl_grid(N, L);
        case Which::a_N:
            need_M();
            g.values.assign(L, 0.0);
            fill_arcs(g.values, L, N, 1, ilog2(sp.M), 0, 1.0, threads);
            return g;
        case Which::c_N:
            need_M();
            g = weyl_grid(N, L);
            fill_arcs(g.values, L, N, 1, ilog2(sp.M), 0, -1.0, threads);
            return g;
        case Which::b_N1:
        case Which::a_tilde:
            need_J();
            g.values.assign(L, 0.0);
            fill_arcs(g.values, L, N, 1, ilog2(sp.J), sp.J, 1.0, threads);
            return g;
        case Which::b_N2:
            need_J();
            g.values.assign(L, 0.0);
            fill_arcs(g.values, L, N, 1, ilog2(sp.J), 0, 1.0, threads);
            fill_arcs(g.values, L, N, 1, ilog2(sp.J), sp.J, -1.0, threads);
            return g;
        case Which::high:
            need_J();
            g = weyl_grid(N, L);
            fill_arcs(g.values, L, N, 1, ilog2(sp.J), sp.J, -1.0, threads);
            return g;
        case Which::level:
            if (sp.level < 1) throw std::domain_error("sample_multiplier: level must be >= 1");
            g.values.assign(L, 0.0);
            fill_arcs(g.values, L, N, sp.level, sp.level, 0, 1.0, threads);
            return g;
    }
    throw std::logic_error("sample_multiplier: unknown multiplier");
}

}  // namespace sqlab
