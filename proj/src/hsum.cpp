#include "sqlab/hsum.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "sqlab/parallel.hpp"

namespace sqlab {

namespace {

struct Terms {
    i64 den;  // phases e(a x / den)
    std::vector<i64> a;
    std::vector<cplx> w;
};

Terms build_terms(HKind kind, i64 q, int j, Method m) {
    if (q <= 0) throw std::domain_error("h_sum: q must be positive");
    Terms t;
    switch (kind) {
        case HKind::H:
            t.den = 2 * q;
            for (i64 a = 1; a <= 2 * q - 1; ++a)
                if (gcd((u64)a, (u64)q) == 1) {
                    t.a.push_back(a);
                    t.w.push_back(gauss_G0(a, q, m));
                }
            break;
        case HKind::H0:
            t.den = q;
            for (i64 a = 0; a <= q - 1; ++a) {
                t.a.push_back(a);
                t.w.push_back(gauss_G(a, q, m));
            }
            break;
        case HKind::H1:
            t.den = q;
            for (i64 a = 1; a <= q; ++a)
                if (gcd((u64)a, (u64)q) == 1) {
                    t.a.push_back(a);
                    t.w.push_back(gauss_G(a, q, m));
                }
            break;
        case HKind::Htilde:
        case HKind::Hj: {
            if (kind == HKind::Hj && (j < 0 || j > 7)) throw std::domain_error("h_sum: j must be in 0..7");
            t.den = 2 * q;
            i64 qo = (i64)factorize((u64)q).odd_part();
            double s = 1.0 / std::sqrt((double)q);
            for (i64 a = 1; a <= 2 * q - 1; ++a) {
                if (gcd((u64)a, (u64)qo) != 1) continue;
                if (kind == HKind::Hj && a % 8 != j) continue;
                t.a.push_back(a);
                t.w.push_back(s * (double)jacobi(a, qo));
            }
            break;
        }
    }
    return t;
}

}  // namespace

cplx h_sum(HKind kind, i64 q, i64 x, int j, Method weights) {
    Terms t = build_terms(kind, q, j, weights);
    KahanC acc;
    for (std::size_t i = 0; i < t.a.size(); ++i) {
        i64 r = (i64)mulmod((u64)t.a[i], (u64)mod(x, t.den), (u64)t.den);
        acc.add(t.w[i] * e_frac(r, t.den));
    }
    return acc.value();
}

std::vector<cplx> h_row(HKind kind, i64 q, int j, Method weights) {
    Terms t = build_terms(kind, q, j, weights);
    const i64 D = t.den;
    std::vector<cplx> roots(D);
    for (i64 k = 0; k < D; ++k) roots[k] = e_frac(k, D);
    std::vector<cplx> out(D);
    for (i64 x = 0; x < D; ++x) {
        cplx s = 0;
        for (std::size_t i = 0; i < t.a.size(); ++i) s += t.w[i] * roots[(t.a[i] * x) % D];
        out[x] = s;
    }
    return out;
}

i64 h0_fast(i64 q, i64 x) { return (i64)count_sqrts(-x, (u64)q); }

// ---------------------------------------------------------------------------
// support lemmas

namespace {

bool divides(u64 d, i64 x) { return x % (i64)d == 0; }

// odd-prime condition shared by all three sets
bool odd_condition(u64 p, int k, i64 x) {
    u64 pk = ipow(p, k);
    if (k % 2 == 0 && divides(pk, x)) return true;
    return divides(pk / p, x) && !divides(pk, x);
}

}  // namespace

HSupportVerdict support_verdict(i64 q, i64 x, Flavor flavor) {
    if (q <= 0) throw std::domain_error("support_verdict: q must be positive");
    HSupportVerdict v;
    if (q == 1 && flavor == Flavor::plain) return v;  // H(1, .) = 0
    Factorization f = factorize((u64)q);
    int b = f.two_exponent();
    double bound = 1;
    for (auto& pk : f.factors) {
        if (pk.p == 2) continue;
        if (!odd_condition(pk.p, pk.k, x)) return v;
        bound *= (double)ipow(pk.p, pk.k / 2);
    }
    if (flavor == Flavor::plain) {
        if (b > 0) {
            if (!divides(u64(1) << std::max(b - 2, 0), x)) return v;
            bound *= std::pow(2.0, b / 2.0);
        }
    } else {
        if (!divides(u64(1) << (b + 1), x)) return v;
        bound *= std::pow(2.0, b / 2.0 + 1);
    }
    v.in_support = true;
    v.bound = bound;
    return v;
}

// ---------------------------------------------------------------------------
// D(x) enumeration

namespace {

std::vector<u64> odd_primes_upto(i64 J) {
    std::vector<u64> out;
    if (J < 3) return out;
    std::vector<char> comp(J + 1, 0);
    for (i64 p = 2; p <= J; ++p) {
        if (comp[p]) continue;
        if (p != 2) out.push_back((u64)p);
        for (i64 m = p * p; m <= J; m += p) comp[m] = 1;
    }
    return out;
}

// Exponent choices for one odd prime together with |H1(p^k, x)|.
struct Choice {
    u64 pk;
    double local;
};

struct PrimeRule {
    u64 p;
    std::vector<Choice> nonzero;  // k >= 1 options
};

std::vector<u64> prime_table(i64 J) {
    static std::mutex mu;
    static std::vector<u64> cache;
    static i64 cached_J = 0;
    std::lock_guard<std::mutex> lk(mu);
    if (J > cached_J) {
        cache = odd_primes_upto(std::max<i64>(J, 2 * cached_J));
        cached_J = std::max<i64>(J, 2 * cached_J);
    }
    auto end = std::upper_bound(cache.begin(), cache.end(), (u64)J);
    return std::vector<u64>(cache.begin(), end);
}

struct Enumerator {
    i64 x;
    i64 J;
    int two_max;  // largest admissible b
    std::vector<u64> primes;           // odd primes <= J
    std::vector<int> rule_index;       // -1 for fresh primes
    std::vector<PrimeRule> rules;      // primes dividing x (x != 0) or all primes (x == 0)

    Enumerator(i64 x_, i64 J_) : x(x_), J(J_) {
        primes = prime_table(J);
        rule_index.assign(primes.size(), -1);
        if (x == 0) {
            two_max = 62;
            for (std::size_t i = 0; i < primes.size(); ++i) {
                u64 p = primes[i];
                if ((i64)(p * p) > J) break;
                PrimeRule r{p, {}};
                for (int k = 2; ipow(p, k) <= (u64)J; k += 2)
                    r.nonzero.push_back({ipow(p, k), HAbs::odd_local(p, k, 0)});
                rule_index[i] = (int)rules.size();
                rules.push_back(r);
            }
        } else {
            i64 ax = x < 0 ? -x : x;
            two_max = valuation(ax, 2) + 2;
            Factorization fx = factorize((u64)ax);
            for (auto& pl : fx.factors) {
                if (pl.p == 2 || (i64)pl.p > J) continue;
                auto it = std::lower_bound(primes.begin(), primes.end(), pl.p);
                std::size_t i = (std::size_t)(it - primes.begin());
                PrimeRule r{pl.p, {}};
                for (int k = 1; ipow(pl.p, k) <= (u64)J; ++k) {
                    bool ok = (k % 2 == 0 && k <= pl.k) || k == pl.k + 1;
                    if (ok) r.nonzero.push_back({ipow(pl.p, k), HAbs::odd_local(pl.p, k, x)});
                    if (k > pl.k) break;
                }
                rule_index[i] = (int)rules.size();
                rules.push_back(r);
            }
        }
    }

    // visit(odd part m, product of |H1(p^k,x)| over its prime powers)
    template <class V>
    void run(V&& visit) const {
        rec(0, 1, 1.0, visit);
    }

    template <class V>
    void rec(std::size_t idx, u64 m, double val, V& visit) const {
        visit(m, val);
        for (std::size_t i = idx; i < primes.size(); ++i) {
            u64 p = primes[i];
            if (m * p > (u64)J) break;
            int ri = rule_index[i];
            if (ri < 0) {
                if (x == 0) continue;  // x = 0 needs even exponents
                rec(i + 1, m * p, val, visit);  // fresh prime, |H1(p,x)| = 1
            } else {
                for (auto& c : rules[ri].nonzero) {
                    if (m * c.pk > (u64)J) break;
                    rec(i + 1, m * c.pk, val * c.local, visit);
                }
            }
        }
    }
};

}  // namespace

DivisorSet divisor_set(i64 x, i64 J) {
    if (J < 1) throw std::domain_error("divisor_set: J must be positive");
    DivisorSet ds;
    ds.x = x;
    ds.J = J;
    Enumerator en(x, J);
    en.run([&](u64 m, double) {
        for (int b = 0; b <= en.two_max && ((u64)m << b) <= (u64)J; ++b) ds.members.push_back((i64)(m << b));
    });
    std::sort(ds.members.begin(), ds.members.end());
    return ds;
}

// ---------------------------------------------------------------------------
// |H| through the local factorization

HAbs::HAbs(i64 J) : J_(J) {
    int bmax = 0;
    while ((i64(1) << (bmax + 1)) <= J) ++bmax;
    two_.resize(bmax + 1);
    for (int b = 1; b <= bmax; ++b) {
        auto row = h_row(HKind::H, i64(1) << b);
        two_[b].resize(row.size());
        for (std::size_t y = 0; y < row.size(); ++y) two_[b][y] = std::abs(row[y]);
    }
}

double HAbs::two_part(int b, i64 x) const {
    if (b >= (int)two_.size()) {
        // outside the table: direct evaluation
        return std::abs(h_sum(HKind::H, i64(1) << b, x));
    }
    return two_[b][mod(x, i64(1) << (b + 1))];
}

double HAbs::odd_local(u64 p, int k, i64 x) {
    double a = (double)count_sqrts_prime_power(-x, p, k);
    double b = (double)count_sqrts_prime_power(-x, p, k - 1);
    return std::abs(a - b);
}

double HAbs::operator()(i64 q, i64 x) const {
    if (q <= 0) throw std::domain_error("HAbs: q must be positive");
    if (q == 1) return 0;
    Factorization f = factorize((u64)q);
    double v = 1;
    for (auto& pk : f.factors) {
        if (pk.p == 2)
            v *= two_part(pk.k, x);
        else
            v *= odd_local(pk.p, pk.k, x);
        if (v == 0) break;
    }
    return v;
}

// ---------------------------------------------------------------------------
// S_J

namespace {

// tables are never freed so references stay valid across threads
const HAbs& shared_habs(i64 J) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<HAbs>> tables;
    std::lock_guard<std::mutex> lk(mu);
    if (tables.empty() || tables.back()->J() < J) tables.push_back(std::make_unique<HAbs>(std::max<i64>(J, 64)));
    return *tables.back();
}

}  // namespace

std::vector<double> log_average_S_multi(i64 x, const std::vector<i64>& J_list, const HAbs& habs) {
    if (J_list.empty()) return {};
    i64 Jmax = J_list.back();
    std::vector<double> bins(J_list.size(), 0.0);
    Enumerator en(x, Jmax);
    en.run([&](u64 m, double val) {
        for (int b = 0; b <= en.two_max && ((u64)m << b) <= (u64)Jmax; ++b) {
            u64 q = m << b;
            double h;
            if (b == 0)
                h = (m == 1) ? 0.0 : val;
            else
                h = val * habs.two_part(b, x);
            if (h == 0) continue;
            std::size_t bi = (std::size_t)(std::lower_bound(J_list.begin(), J_list.end(), (i64)q) - J_list.begin());
            bins[bi] += h / (double)q;
        }
    });
    for (std::size_t i = 1; i < bins.size(); ++i) bins[i] += bins[i - 1];
    return bins;
}

double log_average_S(i64 x, i64 J, SMethod method) {
    if (J < 1) throw std::domain_error("log_average_S: J must be positive");
    if (method == SMethod::direct) {
        KahanC acc;
        for (i64 q = 1; q <= J; ++q) acc.add(std::abs(h_sum(HKind::H, q, x)) / (double)q);
        return acc.value().real();
    }
    return log_average_S_multi(x, {J}, shared_habs(J))[0];
}

std::vector<i64> adversarial_candidates(i64 J) {
    // products of prime powers from {2,3,5,7,11,13}, up to J^2
    const i64 lim = J * J;
    const i64 ps[] = {2, 3, 5, 7, 11, 13};
    std::vector<i64> out{0};
    std::vector<i64> cur{1};
    for (i64 p : ps) {
        std::vector<i64> nxt;
        for (i64 c : cur)
            for (i64 v = c; v <= lim; v *= p) nxt.push_back(v);
        cur.swap(nxt);
    }
    out.insert(out.end(), cur.begin(), cur.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<ScanResult> scan_max_S_multi(const std::vector<i64>& J_list, i64 x_lo, i64 x_hi,
                                         bool adversarial, int threads) {
    if (J_list.empty()) return {};
    if (x_hi < x_lo) throw std::domain_error("scan_max_S: empty x range");
    if (!std::is_sorted(J_list.begin(), J_list.end())) throw std::domain_error("scan_max_S: J list must ascend");
    std::vector<i64> xs;
    for (i64 x = x_lo; x <= x_hi; ++x) xs.push_back(x);
    if (adversarial) {
        auto c = adversarial_candidates(J_list.back());
        xs.insert(xs.end(), c.begin(), c.end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    }
    const HAbs& habs = shared_habs(J_list.back());
    const std::size_t nJ = J_list.size();
    std::vector<double> vals(xs.size() * nJ);
    parallel_for(xs.size(), threads, [&](std::size_t i) {
        auto s = log_average_S_multi(xs[i], J_list, habs);
        std::copy(s.begin(), s.end(), vals.begin() + i * nJ);
    });
    std::vector<ScanResult> out(nJ);
    for (std::size_t k = 0; k < nJ; ++k) {
        out[k] = {xs[0], vals[k]};
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (vals[i * nJ + k] > out[k].value) out[k] = {xs[i], vals[i * nJ + k]};
    }
    return out;
}

ScanResult scan_max_S(i64 J, i64 x_lo, i64 x_hi, bool adversarial, int threads) {
    return scan_max_S_multi({J}, x_lo, x_hi, adversarial, threads)[0];
}

}  // namespace sqlab
