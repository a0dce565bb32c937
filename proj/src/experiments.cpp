#include "sqlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

#include "sqlab/circle.hpp"
#include "sqlab/errors.hpp"
#include "sqlab/gauss.hpp"
#include "sqlab/hsum.hpp"
#include "sqlab/parallel.hpp"
#include "sqlab/rng.hpp"
#include "sqlab/sparse.hpp"

namespace sqlab {

namespace {

using u32 = std::uint32_t;

double tol_or(const RunOptions& o, double dflt) { return o.tol > 0 ? o.tol : dflt; }

ojson common_meta(const RunOptions& o) {
    return {{"seed", o.seed}, {"threads_ignored_by_results", true}};
}

template <class T>
ojson as_json(const std::vector<T>& v) {
    ojson a = ojson::array();
    for (auto& x : v) a.push_back(x);
    return a;
}

// number of solutions of l^2 = x mod p^k by lifting residues one power at a
// time; shares no code with the closed-form counter
u64 count_sqrts_lifting(i64 x, u64 p, int k) {
    std::vector<u64> sol;
    for (u64 l = 0; l < p; ++l)
        if (mulmod(l, l, p) == (u64)mod(x, (i64)p)) sol.push_back(l);
    u64 pj = p;
    for (int j = 1; j < k; ++j) {
        u64 pn = pj * p;
        u64 xm = (u64)mod(x, (i64)pn);
        std::vector<u64> next;
        for (u64 l : sol)
            for (u64 t = 0; t < p; ++t) {
                u64 c = l + t * pj;
                if (mulmod(c, c, pn) == xm) next.push_back(c);
            }
        sol.swap(next);
        pj = pn;
    }
    return sol.size();
}

bool is_qr_mod_p(i64 x, u64 p) { return jacobi(mod(x, (i64)p), (i64)p) == 1; }

// the three-case table for r_{p^k}(x)
u64 rx_table(i64 x, u64 p, int k) {
    int n = valuation(x, p);
    if (n < 0 || n >= k) return ipow(p, k / 2);
    if (n % 2 == 0) {
        i64 xp = x / (i64)ipow(p, n);
        return is_qr_mod_p(xp, p) ? 2 * ipow(p, n / 2) : 0;
    }
    return 0;
}

// |r_{p^k}(x) - r_{p^{k-1}}(x)| by the case table, k >= 2
u64 rxrx_table(i64 x, u64 p, int k) {
    int n = valuation(x, p);
    if (k % 2 == 0 && (n < 0 || n >= k)) return ipow(p, k / 2) - ipow(p, k / 2 - 1);
    if (n == k - 1) return ipow(p, (k - 1) / 2);
    return 0;
}

std::vector<u64> odd_primes_upto(u64 n) {
    std::vector<u64> out;
    for (u64 p = 3; p <= n; p += 2)
        if (is_prime(p)) out.push_back(p);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentReport run_gauss_check(i64 q_max, const RunOptions& o) {
    if (q_max < 1) throw std::domain_error("gauss-check: q_max must be positive");
    const double tol = tol_or(o, 1e-10);
    ExperimentReport r;
    r.name = "gauss-check";
    r.parameters = {{"q_max", q_max}};
    r.metadata = common_meta(o);
    r.metadata["tolerance"] = tol;
    r.columns = {"q", "max_err_G", "max_err_G0", "max_err_G0_vs_G2q", "max_err_G2a2q", "norm_class_ok"};
    std::vector<std::vector<double>> rows((std::size_t)q_max);
    parallel_for((std::size_t)q_max, o.threads, [&](std::size_t i) {
        const i64 q = (i64)i + 1;
        double eg = 0, eg0 = 0, e2q = 0, e2a = 0;
        bool cls = true;
        for (i64 a = 0; a < 2 * q; ++a) {
            cplx gc = gauss_G(a, q), g0c = gauss_G0(a, q);
            eg = std::max(eg, std::abs(gc - gauss_G(a, q, Method::direct)));
            eg0 = std::max(eg0, std::abs(g0c - gauss_G0(a, q, Method::direct)));
            e2q = std::max(e2q, std::abs(g0c - gauss_G(a, 2 * q)));
            e2a = std::max(e2a, std::abs(gauss_G(2 * a, 2 * q) - gc));
            if (gcd((u64)a, (u64)q) == 1) {
                double want = ((a % 2) * (q % 2) == 1) ? 0.0 : 1.0 / std::sqrt((double)q);
                if (std::abs(std::abs(g0c) - want) > tol) cls = false;
            }
        }
        rows[i] = {(double)q, eg, eg0, e2q, e2a, cls ? 1.0 : 0.0};
    });
    for (auto& row : rows) {
        r.add_row(row);
        if (row[1] > tol || row[2] > tol || row[3] > tol || row[4] > tol || row[5] != 1.0)
            r.fail("gauss mismatch at q = " + format_number(row[0]));
    }
    // product identity for odd coprime q1, q2
    const i64 qp = std::min<i64>(99, q_max);
    double eprod = 0;
    i64 cases = 0;
    for (i64 q1 = 3; q1 <= qp; q1 += 2)
        for (i64 q2 = 3; q2 <= qp; q2 += 2) {
            if (gcd((u64)q1, (u64)q2) != 1) continue;
            CounterRng rng(o.seed, (u64)(q1 * 1000 + q2));
            for (int t = 0; t < 3; ++t) {
                i64 a1, a2;
                do a1 = 1 + (i64)rng.below((u64)q1 - 1); while (gcd((u64)a1, (u64)q1) != 1);
                do a2 = 1 + (i64)rng.below((u64)q2 - 1); while (gcd((u64)a2, (u64)q2) != 1);
                cplx lhs = gauss_G(a1, q1, Method::direct) * gauss_G(a2, q2, Method::direct);
                cplx rhs = epsilon(q1) * epsilon(q2) / epsilon(q1 * q2) * (double)(jacobi(q1, q2) * jacobi(q2, q1)) *
                           gauss_G(a1 * q2 + a2 * q1, q1 * q2, Method::direct);
                eprod = std::max(eprod, std::abs(lhs - rhs));
                ++cases;
            }
        }
    r.metadata["product_identity"] = {{"cases", cases}, {"max_err", eprod}};
    if (eprod > tol) r.fail("product identity");
    return r;
}

ExperimentReport run_sqrt_count(i64 q_max, u64 p_max, int k_max, const RunOptions& o) {
    ExperimentReport r;
    r.name = "sqrt-count";
    r.parameters = {{"q_max", q_max}, {"p_max", p_max}, {"k_max", k_max}};
    r.metadata = common_meta(o);
    r.columns = {"check", "cases", "mismatches"};
    // r_q(x) for all x at once from the histogram of l^2 mod q
    std::vector<i64> bad((std::size_t)q_max, 0);
    parallel_for((std::size_t)q_max, o.threads, [&](std::size_t i) {
        const i64 q = (i64)i + 1;
        std::vector<u64> hist((std::size_t)q, 0);
        for (i64 l = 0; l < q; ++l) ++hist[(std::size_t)((l * l) % q)];
        for (i64 x = 0; x < q; ++x)
            if (count_sqrts(x, (u64)q) != hist[(std::size_t)x]) ++bad[i];
    });
    i64 nb = 0;
    for (i64 b : bad) nb += b;
    r.add_row({0, (double)(q_max * (q_max + 1) / 2), (double)nb});

    // prime-power tables: exhaustive over x in [0, p^k) from the histogram of
    // l^2 mod p^k while p^k <= 2^24; above that, x = p^n x' over every n and
    // sampled units x' of both quadratic characters, counted by lifting
    const u64 kFull = u64(1) << 24;
    i64 c1 = 0, b1 = 0, c2 = 0, b2 = 0, sampled = 0;
    for (u64 p : odd_primes_upto(p_max)) {
        CounterRng rng(o.seed, p);
        std::vector<u32> prev{1};  // r_{p^0} = 1
        for (int k = 1; k <= k_max; ++k) {
            const u64 pk = ipow(p, k);
            if (pk <= kFull) {
                std::vector<u32> hist(pk, 0);
                for (u64 l = 0; l < pk; ++l) ++hist[(l * l) % pk];
                for (u64 x = 0; x < pk; ++x) {
                    ++c1;
                    if (hist[x] != rx_table((i64)x, p, k) || hist[x] != count_sqrts_prime_power((i64)x, p, k)) ++b1;
                    if (k >= 2) {
                        u32 a = hist[x], b = prev[x % (pk / p)];
                        ++c2;
                        if ((u64)(a > b ? a - b : b - a) != rxrx_table((i64)x, p, k)) ++b2;
                    }
                }
                prev.swap(hist);
                continue;
            }
            ++sampled;
            prev.clear();
            for (int n = 0; n <= k; ++n) {
                std::vector<i64> units;
                for (i64 u = 1; (u64)u < std::min<u64>(p, 12); ++u) units.push_back(u);
                for (int t = 0; t < 8; ++t) units.push_back(1 + (i64)rng.below(pk - 1));
                for (i64 u : units) {
                    if (u % (i64)p == 0) continue;
                    i64 x = n == k ? 0 : (i64)mulmod(ipow(p, n), (u64)u, pk);
                    u64 lifted = count_sqrts_lifting(x, p, k);
                    ++c1;
                    if (lifted != rx_table(x, p, k) || lifted != count_sqrts_prime_power(x, p, k)) ++b1;
                    if (k >= 2) {
                        u64 pv = count_sqrts_lifting(x, p, k - 1);
                        u64 d = lifted > pv ? lifted - pv : pv - lifted;
                        ++c2;
                        if (d != rxrx_table(x, p, k)) ++b2;
                    }
                }
            }
        }
    }
    r.metadata["sampled_prime_powers"] = sampled;
    r.add_row({1, (double)c1, (double)b1});
    r.add_row({2, (double)c2, (double)b2});
    r.metadata["checks"] = {"count_sqrts vs histogram", "r_{p^k} case table vs histogram (lifting when sampled)",
                            "|r_{p^k} - r_{p^{k-1}}| case table vs histogram (lifting when sampled)"};
    if (nb || b1 || b2) r.fail("square-root counts disagree");
    return r;
}

// ---------------------------------------------------------------------------

namespace {

struct IdentityTally {
    std::string name;
    i64 cases = 0;
    double max_err = 0;
    double tol = 0;
    bool holds = true;
    void add(double err) {
        ++cases;
        if (std::isnan(err) || err > tol) holds = false;
        if (!(err <= max_err)) max_err = err;
    }
    void flag(bool ok) {
        ++cases;
        if (!ok) holds = false;
    }
};

}  // namespace

ExperimentReport run_hsum_identities(i64 q_max, const RunOptions& o) {
    const double tol = tol_or(o, 1e-9);
    ExperimentReport r;
    r.name = "hsum-identities";
    r.parameters = {{"q_max", q_max}};
    r.metadata = common_meta(o);
    r.metadata["tolerance"] = tol;
    r.columns = {"identity", "cases", "max_error", "holds"};

    const i64 qa = std::min<i64>(q_max, 999);   // H = H1
    const i64 qb = std::min<i64>(q_max, 1000);  // H0
    const i64 qs = std::min<i64>(q_max, 300);   // support, periodicity, tilde
    const i64 qe = std::min<i64>(q_max, 256);   // shifting identities
    const i64 qm = std::min<i64>(q_max, 99);    // multiplicativity
    const i64 qd = std::min<i64>(q_max, 200);   // divisor sets

    std::vector<IdentityTally> T(13);
    const char* names[] = {"H = H1 (odd q >= 3)",
                           "H0 = r_q(-x), real integer",
                           "|H1(q1 q2)| = |H1(q1)| |H1(q2)|",
                           "H(q, x + 2q) = H(q, x)",
                           "vanishing outside support set, bound inside",
                           "|H| <= sqrt q",
                           "Htilde vanishing and bound (odd part >= 3)",
                           "Htilde(q, 2^{b+1} x') = eps^{-1} 2^{b/2+1} H(q', x')",
                           "Htilde for odd part 1: q^{-1/2} (2q [2q | x] - 1)",
                           "sum of odd H_j = (Htilde(x) - Htilde(x+q)) / 2",
                           "H_1 +- H_5, H_3 +- H_7 from shifted Htilde (mod 4 and mod 8)",
                           "H as combination of H_1, H_3, H_5, H_7 (even q)",
                           "|H| from 2-part and odd local factors"};
    for (std::size_t i = 0; i < T.size(); ++i) {
        T[i].name = names[i];
        T[i].tol = tol;
    }

    // rows of H for q <= max(qs, qd), reused below
    const i64 qrow = std::max(qs, qd);
    std::vector<std::vector<cplx>> Hrow((std::size_t)qrow + 1);
    parallel_for((std::size_t)qrow, o.threads, [&](std::size_t i) { Hrow[i + 1] = h_row(HKind::H, (i64)i + 1); });

    // 0: H = H1, odd q
    {
        std::vector<double> err((std::size_t)qa + 1, 0);
        std::vector<i64> cnt((std::size_t)qa + 1, 0);
        parallel_for((std::size_t)qa + 1, o.threads, [&](std::size_t i) {
            i64 q = (i64)i;
            if (q < 3 || q % 2 == 0) return;
            auto h = (q <= qrow) ? Hrow[(std::size_t)q] : h_row(HKind::H, q);
            auto h1 = h_row(HKind::H1, q);
            for (i64 x = 0; x < 2 * q; ++x) err[i] = std::max(err[i], std::abs(h[(std::size_t)x] - h1[(std::size_t)(x % q)]));
            cnt[i] = 2 * q;
        });
        for (std::size_t i = 0; i < err.size(); ++i)
            if (cnt[i]) {
                T[0].cases += cnt[i] - 1;
                T[0].add(err[i]);
            }
    }
    // 1: H0
    {
        std::vector<double> err((std::size_t)qb + 1, 0);
        parallel_for((std::size_t)qb, o.threads, [&](std::size_t i) {
            i64 q = (i64)i + 1;
            auto h0 = h_row(HKind::H0, q);
            for (i64 x = 0; x < q; ++x) {
                cplx v = h0[(std::size_t)x];
                double e = std::max({std::abs(v.imag()), std::abs(v.real() - std::round(v.real())),
                                     std::abs(v.real() - (double)h0_fast(q, x))});
                err[i + 1] = std::max(err[i + 1], e);
            }
        });
        for (i64 q = 1; q <= qb; ++q) {
            T[1].cases += q - 1;
            T[1].add(err[(std::size_t)q]);
        }
    }
    // 2: multiplicativity, sampled x
    {
        std::vector<std::pair<i64, i64>> pairs;
        for (i64 a = 3; a <= qm; a += 2)
            for (i64 b = a + 2; b <= qm; b += 2)
                if (gcd((u64)a, (u64)b) == 1) pairs.push_back({a, b});
        std::vector<double> err(pairs.size(), 0);
        parallel_for(pairs.size(), o.threads, [&](std::size_t i) {
            auto [a, b] = pairs[i];
            CounterRng rng(o.seed, 0x4d554c54ULL + i);
            for (int t = 0; t < 4; ++t) {
                i64 x = (i64)rng.below((u64)(a * b));
                if (t == 0) x = 0;
                double l = std::abs(h_sum(HKind::H1, a * b, x));
                double rr = std::abs(h_sum(HKind::H1, a, x)) * std::abs(h_sum(HKind::H1, b, x));
                err[i] = std::max(err[i], std::abs(l - rr));
            }
        });
        for (double e : err) {
            T[2].cases += 3;
            T[2].add(e);
        }
    }
    // 3, 4, 5, 12 on rows q <= qs
    {
        const HAbs habs(qs);
        for (i64 q = 1; q <= qs; ++q) {
            const auto& h = Hrow[(std::size_t)q];
            for (i64 x = 0; x < 2 * q; ++x) {
                cplx v = h[(std::size_t)x];
                T[3].add(std::abs(h_sum(HKind::H, q, x + 2 * q) - v));
                auto ver = support_verdict(q, x);
                T[4].add(ver.in_support ? std::max(0.0, std::abs(v) - ver.bound) : std::abs(v));
                T[5].add(std::max(0.0, std::abs(v) - std::sqrt((double)q)));
                T[12].add(std::abs(habs(q, x) - std::abs(v)));
            }
        }
    }
    // 6, 7, 8: Htilde
    for (i64 q = 1; q <= qs; ++q) {
        Factorization fq = factorize((u64)q);
        const int b = fq.two_exponent();
        const i64 qo = (i64)fq.odd_part();
        auto ht = h_row(HKind::Htilde, q);
        const i64 step = i64(1) << (b + 1);
        for (i64 x = 0; x < 2 * q; ++x) {
            cplx v = ht[(std::size_t)x];
            if (qo == 1) {
                double want = (x % (2 * q) == 0 ? 2.0 * (double)q - 1.0 : -1.0) / std::sqrt((double)q);
                T[8].add(std::abs(v - want));
                continue;
            }
            auto ver = support_verdict(q, x, Flavor::tilde);
            T[6].add(ver.in_support ? std::max(0.0, std::abs(v) - ver.bound) : std::abs(v));
            if (x % step == 0) {
                cplx want = std::pow(2.0, b / 2.0 + 1) / epsilon(qo) * h_sum(HKind::H, qo, x / step);
                T[7].add(std::abs(v - want));
            }
        }
    }
    // 9, 10, 11: shifting identities for even q
    {
        const cplx I1(0, 1);
        for (i64 q = 2; q <= qe; q += 2) {
            Factorization fq = factorize((u64)q);
            const int b = fq.two_exponent();
            const i64 qo = (i64)fq.odd_part();
            auto ht = h_row(HKind::Htilde, q);
            std::vector<std::vector<cplx>> hj(8);
            for (int j = 1; j < 8; j += 2) hj[(std::size_t)j] = h_row(HKind::Hj, q, j);
            const auto& h = Hrow[(std::size_t)q];
            auto Ht = [&](i64 x) { return ht[(std::size_t)mod(x, 2 * q)]; };
            const double sgn_q = ((qo - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
            const double sgn_b = b % 2 == 0 ? 1.0 : -1.0;
            for (i64 x = 0; x < 2 * q; ++x) {
                auto H = [&](int j) { return hj[(std::size_t)j][(std::size_t)x]; };
                T[9].add(std::abs(H(1) + H(3) + H(5) + H(7) - 0.5 * (Ht(x) - Ht(x + q))));
                cplx A = 0.25 * (Ht(x) - Ht(x + q));
                cplx B = (Ht(x + q / 2) - Ht(x + 3 * q / 2)) / (4.0 * I1);
                T[10].add(std::abs(H(1) + H(5) - (A + B)));
                T[10].add(std::abs(H(3) + H(7) - (A - B)));
                if (q % 4 == 0) {
                    cplx C = Ht(x + q / 4) - Ht(x + 5 * q / 4);
                    cplx D = (Ht(x + 3 * q / 4) - Ht(x + 7 * q / 4)) / I1;
                    cplx e1 = e_frac(-1, 8), e3 = e_frac(-3, 8);
                    T[10].add(std::abs(H(1) - H(5) - (e1 / 4.0 * C + e1 / 4.0 * D)));
                    T[10].add(std::abs(H(3) - H(7) - (e3 / 4.0 * C - e3 / 4.0 * D)));
                }
                cplx comb = e_frac(1, 8) * H(1) + sgn_b * sgn_q * e_frac(3, 8) * H(3) + sgn_b * e_frac(5, 8) * H(5) +
                            sgn_q * e_frac(7, 8) * H(7);
                T[11].add(std::abs(h[(std::size_t)x] - comb));
            }
        }
    }
    ojson names_j = ojson::array();
    for (std::size_t i = 0; i < T.size(); ++i) {
        r.add_row({(double)i, (double)T[i].cases, T[i].max_err, T[i].holds ? 1.0 : 0.0});
        names_j.push_back(T[i].name);
        if (!T[i].holds) r.fail("identity failed: " + T[i].name);
    }
    r.metadata["identities"] = names_j;

    // divisor sets against the vanishing scan, and the two S_J methods
    i64 missing = 0, excess = 0, dcases = 0;
    for (i64 x = 0; x <= std::min<i64>(500, 2 * qd + 100); ++x) {
        auto ds = divisor_set(x, qd);
        std::set<i64> mem(ds.members.begin(), ds.members.end());
        for (i64 q = 1; q <= qd; ++q) {
            bool nz = std::abs(Hrow[(std::size_t)q][(std::size_t)mod(x, 2 * q)]) > 1e-9;
            if (nz && !mem.count(q)) ++missing;
            if (!nz && mem.count(q)) ++excess;
            ++dcases;
        }
    }
    r.metadata["divisor_set"] = {{"cases", dcases}, {"nonvanishing_q_missing", missing}, {"members_where_H_vanishes", excess}};
    if (missing) r.fail("divisor_set misses q with H(q,x) != 0");
    double es = 0;
    for (i64 x = 0; x <= 200; ++x)
        for (i64 J : {1, 2, 3, 4, 16, 64})
            es = std::max(es, std::abs(log_average_S(x, J, SMethod::direct) - log_average_S(x, J, SMethod::support_filtered)));
    r.metadata["S_methods_max_diff"] = es;
    if (es > 1e-8) r.fail("S_J direct vs support_filtered");
    return r;
}

// ---------------------------------------------------------------------------

ExperimentReport run_lowpass_scan(const std::vector<i64>& J_list, i64 x_lo, i64 x_hi, bool adversarial,
                                  const RunOptions& o) {
    if (J_list.empty()) throw std::domain_error("lowpass-scan: empty J list");
    for (std::size_t i = 0; i < J_list.size(); ++i)
        if (!is_pow2(J_list[i]) || (i && J_list[i] <= J_list[i - 1]))
            throw std::domain_error("lowpass-scan: J list must be ascending powers of two");
    if (x_hi < x_lo) throw std::domain_error("lowpass-scan: empty x window");
    ExperimentReport r;
    r.name = "lowpass-scan";
    r.parameters = {{"J", as_json(J_list)}, {"x_lo", x_lo}, {"x_hi", x_hi}, {"adversarial", adversarial}};
    r.metadata = common_meta(o);
    r.metadata["x_sampling"] = adversarial ? "window plus smooth-number candidates <= J^2 and x = 0" : "window only";
    r.columns = {"J", "argmax_x", "max_S", "normalized", "normalized_over_first"};
    auto res = scan_max_S_multi(J_list, x_lo, x_hi, adversarial, o.threads);
    double first = 0, cfit = 0;
    for (std::size_t i = 0; i < J_list.size(); ++i) {
        double lj = std::log((double)J_list[i]);
        double nrm = J_list[i] == 1 ? 0.0 : res[i].value / (lj * lj);
        if (i == 0) first = nrm;
        cfit = std::max(cfit, nrm);
        r.add_row({(double)J_list[i], (double)res[i].argmax, res[i].value, nrm, first > 0 ? nrm / first : 0.0});
    }
    r.fit("C_lowpass", cfit, "max over J of max_x S_J(x) / (log J)^2");
    // x = 0 through the even-exponent enumeration against the direct sum
    double e0 = 0;
    for (i64 J : J_list)
        if (J <= 1024) e0 = std::max(e0, std::abs(log_average_S(0, J, SMethod::direct) - log_average_S(0, J)));
    r.metadata["x0_direct_vs_enumeration"] = e0;
    if (e0 > 1e-8) r.fail("S_J(0) enumeration disagrees with the direct sum");
    return r;
}

ExperimentReport run_fjk_constant(const std::vector<i64>& N_list, i64 grid, const RunOptions& o) {
    if (!is_pow2(grid)) throw std::domain_error("fjk-constant: grid must be a power of two");
    const double gtol = tol_or(o, 1e-9);
    const int e = ilog2(grid);
    ExperimentReport r;
    r.name = "fjk-constant";
    r.parameters = {{"N", as_json(N_list)}, {"grid", grid}};
    r.metadata = common_meta(o);
    r.metadata["gamma_tolerance"] = gtol;
    r.columns = {"N", "max_constant", "argmax_j", "max_remainder", "gamma_bound_excess", "gamma_quadrature_vs_fresnel"};
    for (i64 N : N_list) {
        std::vector<double> c((std::size_t)grid), rem((std::size_t)grid), exc((std::size_t)grid), qd((std::size_t)grid);
        parallel_for((std::size_t)grid, o.threads, [&](std::size_t j) {
            Dyadic xi{(u64)j, e};
            FjkResult f = fjk_remainder(xi, N);
            c[j] = f.constant;
            rem[j] = f.remainder;
            double th = arc_offset(xi, f.approx);
            cplx gq = gamma_N(th, N, 1e-12);
            double bound = th == 0 ? 1.0 : std::min(1.0, 1.0 / ((double)N * std::sqrt(std::abs(th))));
            exc[j] = std::abs(gq) - bound;
            qd[j] = std::abs(gq - gamma_N_fresnel(th, N));
        });
        std::size_t am = 0;
        for (std::size_t j = 1; j < c.size(); ++j)
            if (c[j] > c[am]) am = j;
        double ex = *std::max_element(exc.begin(), exc.end());
        double dq = *std::max_element(qd.begin(), qd.end());
        r.add_row({(double)N, c[am], (double)am, *std::max_element(rem.begin(), rem.end()), ex, dq});
        if (!std::isfinite(c[am])) r.fail("non-finite FJK constant");
        if (ex > gtol) r.fail("gamma_N exceeds min(1, N^-1 |theta|^-1/2)");
        if (dq > gtol) r.fail("gamma_N quadrature and Fresnel forms disagree");
    }
    double lo = 1e300, hi = 0;
    for (auto& row : r.rows) {
        lo = std::min(lo, row[1]);
        hi = std::max(hi, row[1]);
    }
    r.fit("C_fjk", hi, "max over grid j/2^k and N of remainder * N / sqrt(q)");
    r.metadata["max_over_min"] = lo > 0 ? hi / lo : 0.0;
    return r;
}

ExperimentReport run_gamma_decay(const std::vector<i64>& N_list, int points, const RunOptions& o) {
    if (points < 2) throw std::domain_error("gamma-decay: need at least two points");
    const double tol = tol_or(o, 1e-9);
    ExperimentReport r;
    r.name = "gamma-decay";
    r.parameters = {{"N", as_json(N_list)}, {"points", points}};
    r.metadata = common_meta(o);
    r.metadata["tolerance"] = tol;
    r.metadata["theta_range"] = "theta = +-10^u / N^2, u uniform in [-3, 4.5]";
    r.columns = {"N", "theta", "abs_gamma", "bound", "excess", "fresnel_diff", "fourier_diff"};
    for (i64 N : N_list) {
        const std::size_t n = (std::size_t)points * 2;
        std::vector<std::vector<double>> rows(n);
        parallel_for(n, o.threads, [&](std::size_t i) {
            double u = -3.0 + 7.5 * (double)(i / 2) / (double)(points - 1);
            double th = std::pow(10.0, u) / ((double)N * (double)N) * (i % 2 ? -1.0 : 1.0);
            cplx g = gamma_N(th, N, 1e-12);
            double bound = std::min(1.0, 1.0 / ((double)N * std::sqrt(std::abs(th))));
            rows[i] = {(double)N, th, std::abs(g), bound, std::abs(g) - bound, std::abs(g - gamma_N_fresnel(th, N)),
                       std::abs(g - gamma_N_fourier(th, N, 1e-12))};
        });
        for (auto& row : rows) {
            r.add_row(row);
            if (row[4] > tol) r.fail("gamma_N decay bound violated");
            if (row[5] > tol || row[6] > 2 * tol) r.fail("gamma_N forms disagree");
        }
    }
    return r;
}

ExperimentReport run_minor_arc(i64 N, const std::vector<i64>& M_list, i64 grid, const RunOptions& o) {
    if (!is_pow2(grid)) throw std::domain_error("minor-arc: grid must be a power of two");
    if (M_list.empty()) throw std::domain_error("minor-arc: empty M list");
    const i64 Mmax = *std::max_element(M_list.begin(), M_list.end());
    for (i64 M : M_list)
        if (!is_pow2(M) || M < 2 || 4 * M > N) throw std::domain_error("minor-arc: need M = 2^m with 2 <= M <= N/4");
    const int e = ilog2(grid);
    ExperimentReport r;
    r.name = "minor-arc";
    r.parameters = {{"N", N}, {"M", as_json(M_list)}, {"grid", grid}};
    r.metadata = common_meta(o);
    r.columns = {"M", "sup_abs_c", "normalized", "normalized_over_first", "sup_times_sqrtM"};
    std::vector<std::vector<double>> sup((std::size_t)grid);
    parallel_for((std::size_t)grid, o.threads, [&](std::size_t j) {
        ArcRecord rec = arc_multipliers(Dyadic{(u64)j, e}, N, Mmax);
        std::vector<double> v;
        for (i64 M : M_list) {
            cplx a = 0;
            for (int s = 1; s <= ilog2(M); ++s) a += rec.levels[(std::size_t)s - 1];
            v.push_back(std::abs(rec.weyl - a));
        }
        sup[j] = std::move(v);
    });
    double first = 0;
    for (std::size_t m = 0; m < M_list.size(); ++m) {
        double s = 0;
        for (auto& v : sup) s = std::max(s, v[m]);
        double M = (double)M_list[m];
        double nrm = s * std::sqrt(M) / std::log(M);
        if (m == 0) first = nrm;
        r.add_row({M, s, nrm, nrm / first, s * std::sqrt(M)});
    }
    double cf = 0;
    for (auto& row : r.rows) cf = std::max(cf, row[2]);
    r.fit("C_minor", cf, "max over M of grid sup |c_N| * M^{1/2} / log M");
    return r;
}

// ---------------------------------------------------------------------------
// indicator pairs and the improving inequality

double orlicz_psi(double x) {
    if (x <= 0) return 0;
    return std::pow(x, 2.0 / 3.0) * std::pow(1.0 + std::abs(std::log(x)), 4.0 / 3.0);
}

namespace {

int floor_log2(i64 n) {
    int k = 0;
    while ((i64(1) << (k + 1)) <= n) ++k;
    return k;
}

i64 poly_at(const std::vector<i64>& c, i64 n) {
    i64 v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * n + c[i];
    return v;
}

int degree(const std::vector<i64>& c) {
    int d = -1;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0) d = (int)i;
    return d;
}

bool is_squares(const std::vector<i64>& c) { return degree(c) == 2 && c[0] == 0 && c[1] == 0 && c[2] == 1; }

// f on [0, 2n), g on [0, n). Four families, picked by stream mod 4: Bernoulli
// sets, intervals, translates of the shift set (g marks the translates), and
// residue classes.
std::pair<Signal, Signal> make_pair(i64 n, u64 seed, u64 stream, const std::vector<i64>& shifts) {
    CounterRng rng(seed, stream);
    Signal f = Signal::zeros(0, (std::size_t)(2 * n)), g = Signal::zeros(0, (std::size_t)n);
    const int lg = floor_log2(n);
    auto dens = [&] { return std::ldexp(1.0, -(int)rng.below((u64)lg + 1)); };
    switch (stream % 4) {
        case 0: {
            double rf = dens(), rg = dens();
            for (auto& v : f.samples) v = rng.bernoulli(rf) ? 1.0 : 0.0;
            for (auto& v : g.samples) v = rng.bernoulli(rg) ? 1.0 : 0.0;
            break;
        }
        case 1: {
            i64 lf = std::max<i64>(1, (i64)(2.0 * (double)n * dens()));
            i64 lgn = std::max<i64>(1, (i64)((double)n * dens()));
            i64 a = (i64)rng.below((u64)(2 * n - lf + 1)), b = (i64)rng.below((u64)(n - lgn + 1));
            for (i64 x = a; x < a + lf; ++x) f.samples[(std::size_t)x] = 1;
            for (i64 x = b; x < b + lgn; ++x) g.samples[(std::size_t)x] = 1;
            break;
        }
        case 2: {
            i64 m = 1 + (i64)rng.below((u64)std::min<i64>(n, 64));
            for (i64 t = 0; t < m; ++t) {
                i64 c = (i64)rng.below((u64)n);
                g.samples[(std::size_t)c] = 1;
                for (i64 s : shifts)
                    if (c + s >= 0 && c + s < 2 * n) f.samples[(std::size_t)(c + s)] = 1;
            }
            break;
        }
        default: {
            i64 d = 1 + (i64)rng.below(64);
            i64 rf = (i64)rng.below((u64)d), rg = (i64)rng.below((u64)d);
            for (i64 x = rf; x < 2 * n; x += d) f.samples[(std::size_t)x] = 1;
            for (i64 x = rg; x < n; x += d) g.samples[(std::size_t)x] = 1;
            break;
        }
    }
    auto empty = [](const Signal& s) { return std::all_of(s.samples.begin(), s.samples.end(), [](double v) { return v == 0; }); };
    if (empty(f)) f.samples[0] = 1;
    if (empty(g)) g.samples[0] = 1;
    return {std::move(f), std::move(g)};
}

Signal average_with(const std::vector<i64>& c, const Signal& f, i64 N) {
    if (is_squares(c)) return average_AN(f, N, N >= 32 ? AvgMethod::dft : AvgMethod::direct);
    return average_poly(f, c, N);
}

std::vector<i64> shift_set(const std::vector<i64>& c, i64 N) {
    std::vector<i64> s;
    for (i64 k = 1; k <= N; ++k) s.push_back(poly_at(c, k));
    return s;
}

u64 pair_stream(i64 N, int t) { return (u64)N * 1000003ULL + (u64)t * 4 + (u64)(t % 4); }

struct PairStats {
    double norm_ratio = 0, bilinear_ratio = 0, orlicz_ratio = 0;
};

PairStats pair_stats(const std::vector<i64>& c, i64 N, double p, const Signal& f, const Signal& g) {
    const i64 n = (i64)g.size();
    IntervalZ I(0, n - 1), I2 = I.doubled();
    Signal A = average_with(c, f, N);
    const double pp = p / (p - 1);
    double fp = norm_p(f, I2, p), gp = norm_p(g, I, p);
    double pair = 0;
    for (i64 x = 0; x < n; ++x)
        if (g.samples[(std::size_t)x] != 0) pair += A.at(x) * g.samples[(std::size_t)x];
    PairStats s;
    s.norm_ratio = norm_p(A, I, pp) / fp;
    s.bilinear_ratio = pair / ((double)n * fp * gp);
    s.orlicz_ratio = pair / (orlicz_psi(norm_p(f, I2, 1)) * orlicz_psi(norm_p(g, I, 1)) * (double)n);
    return s;
}

i64 ipow_i(i64 b, int e) {
    i64 v = 1;
    while (e-- > 0) v *= b;
    return v;
}

struct Extremal {
    bool valid = false;
    Signal f, g;
};

// F = {P(1), ..., P(N)} inside 2I, g = delta_0
Extremal extremal_pair(const std::vector<i64>& c, i64 N, i64 n) {
    Extremal e;
    auto s = shift_set(c, N);
    for (i64 v : s)
        if (v < 0 || v >= 2 * n) return e;
    e.f = Signal::zeros(0, (std::size_t)(2 * n));
    for (i64 v : s) e.f.samples[(std::size_t)v] = 1;
    e.g = Signal::zeros(0, (std::size_t)n);
    e.g.samples[0] = 1;
    e.valid = true;
    return e;
}

void check_poly(const std::vector<i64>& c) {
    int d = degree(c);
    if (d < 1) throw std::domain_error("poly-average: polynomial must have degree >= 1");
    for (i64 k = 1; k <= 8; ++k)
        if (poly_at(c, k) < 0 || poly_at(c, k + 1) <= poly_at(c, k))
            throw std::domain_error("poly-average: need P(k) >= 0 and increasing for k >= 1");
}

}  // namespace

std::pair<Signal, Signal> random_indicator_pair(i64 n, u64 seed, u64 stream) {
    i64 r = (i64)std::floor(std::sqrt((double)n));
    return make_pair(n, seed, stream, shift_set({0, 0, 1}, r));
}

i64 extremal_pairing_count(const std::vector<i64>& coeffs, i64 N) {
    const i64 n = ipow_i(N, degree(coeffs));
    Extremal e = extremal_pair(coeffs, N, n);
    if (!e.valid) throw std::domain_error("extremal pair does not fit in 2I");
    Signal A = average_poly(e.f, coeffs, N);
    return std::llround(A.at(0) * (double)N);
}

std::pair<i64, i64> lower_bound_exponent(i64 p_num, i64 p_den) {
    if (p_num <= 0 || p_den <= 0) throw std::domain_error("lower_bound_exponent: p must be positive");
    i64 num = 3 * p_den - 2 * p_num, den = p_num;
    i64 g = (i64)gcd((u64)std::abs(num), (u64)den);
    if (g == 0) g = 1;
    return {num / g, den / g};
}

ExperimentReport run_poly_average(const std::vector<i64>& coeffs, const std::vector<i64>& N_list, double p,
                                  int trials, const RunOptions& o) {
    check_poly(coeffs);
    if (!(p > 1)) throw std::domain_error("improving ratio: p must exceed 1");
    if (trials < 1) throw std::domain_error("improving ratio: trials must be positive");
    const int d = degree(coeffs);
    ExperimentReport r;
    r.name = "poly-average";
    r.parameters = {{"poly", as_json(coeffs)}, {"N", as_json(N_list)}, {"p", p}, {"trials", trials}};
    r.metadata = common_meta(o);
    r.metadata["interval"] = "I = [0, N^deg), f on 2I, g on I";
    r.columns = {"N", "max_norm_ratio", "max_bilinear_ratio", "extremal_pairing", "extremal_norm_ratio",
                 "extremal_bilinear_ratio", "lower_bound"};
    for (i64 N : N_list) {
        if (N < 2) throw std::domain_error("improving ratio: N must be at least 2");
        const i64 n = ipow_i(N, d);
        auto shifts = shift_set(coeffs, N);
        std::vector<PairStats> st((std::size_t)trials);
        parallel_for((std::size_t)trials, o.threads, [&](std::size_t t) {
            auto [f, g] = make_pair(n, o.seed, pair_stream(N, (int)t), shifts);
            st[t] = pair_stats(coeffs, N, p, f, g);
        });
        double mn = 0, mb = 0;
        for (auto& s : st) {
            mn = std::max(mn, s.norm_ratio);
            mb = std::max(mb, s.bilinear_ratio);
        }
        double ep = NAN, en = NAN, eb = NAN;
        Extremal ex = extremal_pair(coeffs, N, n);
        if (ex.valid) {
            Signal A = average_with(coeffs, ex.f, N);
            ep = std::round(A.at(0) * (double)N) / (double)N;
            PairStats s = pair_stats(coeffs, N, p, ex.f, ex.g);
            en = s.norm_ratio;
            eb = s.bilinear_ratio;
        }
        double lb = std::pow((double)N, (2.0 * d - 1.0) / p - d);
        r.add_row({(double)N, mn, mb, ep, en, eb, lb});
    }
    double c = 0;
    for (auto& row : r.rows) c = std::max(c, row[2]);
    r.fit("C_improving", c, "max over N and trials of (A f, g) / (|I| <f>_{2I,p} <g>_{I,p})");
    return r;
}

ExperimentReport run_improving_ratio(const std::vector<i64>& N_list, double p, int trials, const RunOptions& o) {
    ExperimentReport r = run_poly_average({0, 0, 1}, N_list, p, trials, o);
    r.name = "improving-ratio";
    r.parameters = {{"N", as_json(N_list)}, {"p", p}, {"trials", trials}};
    r.metadata["regime"] = p > 1.5 ? "improving (p > 3/2)" : "failure branch (p <= 3/2)";
    return r;
}

ExperimentReport run_orlicz_ratio(const std::vector<i64>& N_list, int trials, const RunOptions& o) {
    if (trials < 1) throw std::domain_error("orlicz-ratio: trials must be positive");
    const std::vector<i64> sq{0, 0, 1};
    ExperimentReport r;
    r.name = "orlicz-ratio";
    r.parameters = {{"N", as_json(N_list)}, {"trials", trials}};
    r.metadata = common_meta(o);
    r.metadata["psi"] = "x^{2/3} (1 + |log x|)^{4/3}";
    r.columns = {"N", "max_ratio", "extremal_ratio", "log_N_pow_8_3", "ratio_over_first"};
    double first = 0;
    std::vector<double> lx, ly;
    for (i64 N : N_list) {
        if (N < 2) throw std::domain_error("orlicz-ratio: N must be at least 2");
        const i64 n = N * N;
        auto shifts = shift_set(sq, N);
        std::vector<double> st((std::size_t)trials);
        parallel_for((std::size_t)trials, o.threads, [&](std::size_t t) {
            auto [f, g] = make_pair(n, o.seed, pair_stream(N, (int)t), shifts);
            st[t] = pair_stats(sq, N, 2.0, f, g).orlicz_ratio;
        });
        double m = *std::max_element(st.begin(), st.end());
        Extremal ex = extremal_pair(sq, N, n);
        double er = pair_stats(sq, N, 2.0, ex.f, ex.g).orlicz_ratio;
        if (r.rows.empty()) first = m;
        double ln = std::log((double)N);
        r.add_row({(double)N, m, er, std::pow(ln, 8.0 / 3.0), m / first});
        lx.push_back(std::log(ln));
        ly.push_back(std::log(m));
    }
    double c = 0;
    for (auto& row : r.rows) c = std::max(c, row[1]);
    r.fit("C_orlicz", c, "max over N and trials of (A f, g) / (psi(<f>_{2I,1}) psi(<g>_{I,1}) |I|)");
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= (double)lx.size();
        my /= (double)ly.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        r.fit("log_growth_exponent", sxx > 0 ? sxy / sxx : 0.0,
              "least-squares slope of log(max_ratio) against log(log N)");
    }
    return r;
}

ExperimentReport run_halfdim(const std::vector<i64>& N_list, const std::vector<double>& eps_list,
                             const std::string& strategy, const RunOptions& o) {
    static const std::vector<std::string> names{"random", "squares", "progression", "block"};
    std::vector<int> strat;
    if (strategy == "all") {
        strat = {0, 1, 2, 3};
    } else {
        auto it = std::find(names.begin(), names.end(), strategy);
        if (it == names.end()) throw std::domain_error("halfdim: unknown strategy " + strategy);
        strat = {(int)(it - names.begin())};
    }
    ExperimentReport r;
    r.name = "halfdim";
    r.parameters = {{"N", as_json(N_list)}, {"eps", as_json(eps_list)}, {"strategy", strategy}};
    r.metadata = common_meta(o);
    r.metadata["strategies"] = as_json(names);
    r.columns = {"N", "eps", "strategy", "superlevel_size", "eps3_size", "log_N_pow_8"};
    for (i64 N : N_list) {
        if (N < 2) throw std::domain_error("halfdim: N must be at least 2");
        const i64 n2 = N * N;
        for (int s : strat) {
            Signal G = Signal::zeros(0, (std::size_t)(n2 + 1));
            CounterRng rng(o.seed, (u64)N * 31 + (u64)s);
            switch (s) {
                case 0: {
                    i64 placed = 0;
                    while (placed < N) {
                        i64 x = (i64)rng.below((u64)n2 + 1);
                        if (G.samples[(std::size_t)x] == 0) {
                            G.samples[(std::size_t)x] = 1;
                            ++placed;
                        }
                    }
                    break;
                }
                case 1:
                    for (i64 k = 1; k <= N; ++k) G.samples[(std::size_t)(k * k)] = 1;
                    break;
                case 2:
                    for (i64 k = 0; k < N; ++k) G.samples[(std::size_t)(k * N)] = 1;
                    break;
                default:
                    for (i64 k = 0; k < N; ++k) G.samples[(std::size_t)k] = 1;
            }
            Signal A = average_AN(G, N, N >= 32 ? AvgMethod::dft : AvgMethod::direct);
            for (double eps : eps_list) {
                // A_N of an indicator takes values k/N; count hits exactly
                i64 cnt = 0;
                for (double v : A.samples)
                    if ((double)std::llround(v * (double)N) > eps * (double)N) ++cnt;
                double ln = std::log((double)N);
                r.add_row({(double)N, eps, (double)s, (double)cnt, eps * eps * eps * (double)cnt, std::pow(ln, 8.0)});
            }
        }
    }
    return r;
}

ExperimentReport run_multifreq(const std::vector<int>& s_list, i64 N_max, int trials, const RunOptions& o) {
    if (!is_pow2(N_max) || N_max < 2) throw std::domain_error("multifreq: N_max must be a power of two >= 2");
    if (trials < 1) throw std::domain_error("multifreq: trials must be positive");
    ExperimentReport r;
    r.name = "multifreq";
    r.parameters = {{"s", as_json(s_list)}, {"N_max", N_max}, {"trials", trials}};
    r.metadata = common_meta(o);
    r.metadata["operator"] = "sup over dyadic 2^s <= N <= N_max of |F^{-1}(a_{N,s} F f)|, full period";
    r.columns = {"s", "max_ratio", "normalized", "scales"};
    const IntervalZ I(0, N_max * N_max - 1);
    const i64 n2 = 2 * N_max * N_max;
    for (int s : s_list) {
        if (s < 1) throw std::domain_error("multifreq: s must be >= 1");
        std::vector<i64> Ns;
        for (i64 N = i64(1) << s; N <= N_max; N *= 2) Ns.push_back(N);
        if (Ns.empty()) continue;
        std::vector<double> ratios((std::size_t)trials, 0);
        std::vector<MultiplierGrid> grids;
        i64 L = dft_length((std::size_t)n2, N_max);
        for (i64 N : Ns) {
            MultiplierGrid g = sample_multiplier({Which::level, N, 0, 0, s, L}, o.threads);
            g.values.resize((std::size_t)(L / 2 + 1));
            g.values.shrink_to_fit();
            grids.push_back(std::move(g));
        }
        auto arcs = arcs_at_level(s);
        for (int t = 0; t < trials; ++t) {
            CounterRng rng(o.seed, (u64)s * 7919 + (u64)t);
            Signal f = Signal::zeros(0, (std::size_t)n2);
            switch (t % 4) {
                case 0:
                    for (auto& v : f.samples) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
                    break;
                case 1:
                    for (auto& v : f.samples) v = rng.bernoulli(0.1) ? 1.0 : 0.0;
                    break;
                case 2: {
                    // modulated to sit on a level-s arc: 2 xi = a/q
                    Rational a = arcs[(std::size_t)rng.below(arcs.size())];
                    for (i64 x = 0; x < n2; ++x)
                        f.samples[(std::size_t)x] = std::cos(std::numbers::pi * (double)(a.a * x % (2 * a.q)) / (double)a.q);
                    break;
                }
                default:
                    f.samples[(std::size_t)rng.below((u64)n2)] = 1;
            }
            double fn = 0;
            for (double v : f.samples) fn += v * v;
            SplitEngine eng(f, I, N_max);
            std::vector<double> T;
            for (auto& g : grids) {
                Signal u = eng.apply(g);
                if (T.empty()) T.assign(u.size(), 0.0);
                for (std::size_t i = 0; i < u.size(); ++i) T[i] = std::max(T[i], std::abs(u.samples[i]));
            }
            double tn = 0;
            for (double v : T) tn += v * v;
            ratios[(std::size_t)t] = fn > 0 ? std::sqrt(tn / fn) : 0.0;
        }
        double m = *std::max_element(ratios.begin(), ratios.end());
        r.add_row({(double)s, m, m / ((double)s * std::pow(2.0, -s / 2.0)), (double)Ns.size()});
    }
    double c = 0;
    for (auto& row : r.rows) c = std::max(c, row[2]);
    r.fit("C_multifreq", c, "max over s and trials of l2 ratio / (s 2^{-s/2})");
    return r;
}

// ---------------------------------------------------------------------------

namespace {

// background Bernoulli(density) on 2E plus a few dense blobs
Signal clustered_indicator(i64 n, double density, CounterRng& rng) {
    Signal f = Signal::zeros(0, (std::size_t)(2 * n));
    for (auto& v : f.samples) v = rng.bernoulli(density) ? 1.0 : 0.0;
    const int lg = floor_log2(n);
    const int blobs = 1 + (int)rng.below(4);
    for (int b = 0; b < blobs; ++b) {
        i64 len = i64(1) << rng.below((u64)std::max(1, lg - 2));
        i64 a = (i64)rng.below((u64)(2 * n - len + 1));
        for (i64 x = a; x < a + len; ++x)
            if (rng.bernoulli(0.9)) f.samples[(std::size_t)x] = 1;
    }
    return f;
}

}  // namespace

ExperimentReport run_sparse_demo(const std::vector<i64>& E_sizes, double density, double C, int trials,
                                 const RunOptions& o) {
    if (!(density >= 0 && density <= 1)) throw std::domain_error("sparse-demo: density must lie in [0, 1]");
    if (trials < 1) throw std::domain_error("sparse-demo: trials must be positive");
    const double rs = 8.0 / 5.0;
    ExperimentReport r;
    r.name = "sparse-demo";
    r.parameters = {{"E", as_json(E_sizes)}, {"density", density}, {"C", C}, {"trials", trials}};
    r.metadata = common_meta(o);
    r.metadata["stopping_constant"] = C;
    r.metadata["dyadic_grid"] = "anchored at the left endpoint of E = [0, |E|)";
    r.metadata["sparse_exponents"] = {rs, rs};
    r.columns = {"E_size", "trial", "intervals", "max_depth", "worst_children_ratio", "witness_ok", "admissible_ok",
                 "maximal_pairing", "tau_pairing", "sparse_form", "ratio"};
    for (i64 n : E_sizes) {
        if (!is_pow2(n)) throw std::domain_error("sparse-demo: |E| must be a power of two");
        const IntervalZ E(0, n - 1);
        std::vector<std::vector<double>> rows((std::size_t)trials);
        std::vector<std::string> errs((std::size_t)trials);
        parallel_for((std::size_t)trials, o.threads, [&](std::size_t t) {
            CounterRng rng(o.seed, (u64)n * 131 + (u64)t);
            Signal f = clustered_indicator(n, density, rng);
            Signal g = Signal::zeros(0, (std::size_t)n);
            for (auto& v : g.samples) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
            try {
                DecomposeStats st;
                SparseCollection c = sparse_decompose(E, f, g, C, &st);
                std::string why;
                bool wok = verify_sparsity(c, &why);
                if (!wok) errs[t] = why;
                StoppingTime tau = build_admissible_tau(E, f, C);
                bool aok = check_admissible(tau, f, C);
                if (!aok) errs[t] = "built stopping time is not admissible";
                double lhs = bilinear(dyadic_maximal_on(f, E), g);
                double tp = bilinear(apply_A_tau(f, tau), g);
                double rhs = sparse_form(c, f, g, rs, rs);
                rows[t] = {(double)n, (double)t, (double)c.items.size(), (double)st.max_depth, st.worst_children_ratio,
                           wok ? 1.0 : 0.0, aok ? 1.0 : 0.0, lhs, tp, rhs, rhs > 0 ? lhs / rhs : 0.0};
            } catch (const InvariantViolation& ex) {
                errs[t] = ex.what();
                rows[t] = {(double)n, (double)t, NAN, NAN, NAN, 0, 0, NAN, NAN, NAN, NAN};
            }
        });
        for (std::size_t t = 0; t < rows.size(); ++t) {
            r.add_row(rows[t]);
            if (!errs[t].empty()) r.fail("|E| = " + std::to_string(n) + " trial " + std::to_string(t) + ": " + errs[t]);
        }
    }
    ojson by = ojson::object(), med = ojson::object();
    for (i64 n : E_sizes) {
        std::vector<double> v;
        for (auto& row : r.rows)
            if (row[0] == (double)n && std::isfinite(row[10])) v.push_back(row[10]);
        std::sort(v.begin(), v.end());
        by[std::to_string(n)] = v.empty() ? 0.0 : v.back();
        med[std::to_string(n)] = v.empty() ? 0.0 : (v[(v.size() - 1) / 2] + v[v.size() / 2]) / 2;
    }
    r.metadata["max_ratio_by_E"] = by;
    r.metadata["median_ratio_by_E"] = med;
    return r;
}

ExperimentReport run_high_low(i64 N, const std::vector<i64>& J_list, int trials, const RunOptions& o) {
    if (!is_pow2(N) || N < 16) throw std::domain_error("high-low: N must be a power of two >= 16");
    if (trials < 1) throw std::domain_error("high-low: trials must be positive");
    for (i64 J : J_list)
        if (!is_pow2(J) || J < 2 || 4 * J > N) throw std::domain_error("high-low: need J = 2^s with 2 <= J <= N/4");
    const double tol = tol_or(o, 1e-7);
    const i64 n = N * N;
    const IntervalZ I(0, n - 1), I2 = I.doubled();
    ExperimentReport r;
    r.name = "high-low";
    r.parameters = {{"N", N}, {"J", as_json(J_list)}, {"trials", trials}};
    r.metadata = common_meta(o);
    r.metadata["identity_tolerance"] = tol;
    r.columns = {"J", "max_high_ratio", "high_normalized", "max_low_ratio", "low_normalized", "max_identity_err",
                 "max_direct_err"};

    const i64 L = dft_length((std::size_t)I2.size(), N);
    r.metadata["dft_length"] = L;
    auto half = [&](MultiplierGrid g) {
        g.values.resize((std::size_t)(L / 2 + 1));
        g.values.shrink_to_fit();
        return g;
    };
    MultiplierGrid W = half(weyl_grid(N, L));
    std::vector<MultiplierGrid> B1;
    for (i64 J : J_list) B1.push_back(half(sample_multiplier({Which::b_N1, N, J, J, 0, L}, o.threads)));

    const std::size_t nj = J_list.size();
    std::vector<double> mh(nj, 0), ml(nj, 0), mi(nj, 0), md(nj, 0);
    const i64 r2 = (i64)std::floor(std::sqrt((double)n));
    const auto shifts = shift_set({0, 0, 1}, r2);
    for (int t = 0; t < trials; ++t) {
        Signal f = make_pair(n, o.seed, pair_stream(N, t) ^ 0x484c, shifts).first;
        double f2 = norm_p(f, I2, 2), f1 = norm_p(f, I2, 1);
        Signal A = average_AN(f, N, AvgMethod::dft);
        // a few points by direct summation
        CounterRng rng(o.seed, 0x5350ULL + (u64)t);
        std::vector<i64> xs;
        for (int k = 0; k < 32; ++k) xs.push_back((i64)rng.below((u64)n));
        std::vector<double> Ad;
        for (i64 x : xs) {
            double s = 0;
            for (i64 k = 1; k <= N; ++k) s += f.at(x + k * k);
            Ad.push_back(s / (double)N);
        }
        SplitEngine eng(f, I, N);
        for (std::size_t j = 0; j < nj; ++j) {
            HighLow hl = eng.split(W, B1[j]);
            mh[j] = std::max(mh[j], norm_p(hl.H, I, 2) / f2);
            ml[j] = std::max(ml[j], norm_p(hl.L, I, INFINITY) / f1);
            for (i64 x = 0; x < n; ++x) mi[j] = std::max(mi[j], std::abs(hl.H.at(x) + hl.L.at(x) - A.at(x)));
            for (std::size_t k = 0; k < xs.size(); ++k)
                md[j] = std::max(md[j], std::abs(hl.H.at(xs[k]) + hl.L.at(xs[k]) - Ad[k]));
        }
    }
    for (std::size_t j = 0; j < nj; ++j) {
        double J = (double)J_list[j], lj = std::log(J);
        r.add_row({J, mh[j], mh[j] / (std::log(J) / std::sqrt(J)), ml[j], ml[j] / (J * lj * lj), mi[j], md[j]});
        if (mi[j] > tol || md[j] > tol) r.fail("H + L differs from A_N f at J = " + format_number(J));
    }
    double ch = 0, cl = 0;
    for (auto& row : r.rows) {
        ch = std::max(ch, row[2]);
        cl = std::max(cl, row[4]);
    }
    r.fit("C_high", ch, "max over J and trials of <H>_{I,2} / <f>_{2I,2} / (J^{-1/2} log J)");
    r.fit("C_low", cl, "max over J and trials of <L>_{I,inf} / <f>_{2I,1} / (J (log J)^2)");
    return r;
}

}  // namespace sqlab
