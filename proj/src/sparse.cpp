#include "sqlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "json.hpp"
#include "sqlab/errors.hpp"

namespace sqlab {

AverageTable::AverageTable(const Signal& f, i64 lo, i64 hi) : lo_(lo), hi_(hi) {
    pre_.assign((std::size_t)(hi - lo + 2), 0.0);
    for (i64 x = lo; x <= hi; ++x) pre_[(std::size_t)(x - lo + 1)] = pre_[(std::size_t)(x - lo)] + std::abs(f.at(x));
}

double AverageTable::sum(i64 a, i64 b) const {
    a = std::max(a, lo_);
    b = std::min(b, hi_);
    if (b < a) return 0;
    return pre_[(std::size_t)(b - lo_ + 1)] - pre_[(std::size_t)(a - lo_)];
}

bool is_dyadic_interval(const IntervalZ& E) { return is_pow2(E.size()); }

i64 tau_cap(i64 n) {
    i64 r = (i64)std::floor(std::sqrt((double)n));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    i64 t = 1;
    while (2 * t <= r) t *= 2;
    return t;
}

namespace {

void require_dyadic(const IntervalZ& E) {
    if (!is_dyadic_interval(E)) throw std::domain_error("sparse: |E| must be a power of two");
}

// f restricted to 2E, tabulated on 3E
AverageTable table_for(const IntervalZ& E, const Signal& f) {
    IntervalZ E2 = E.doubled();
    Signal r = Signal::zeros(E2.a, (std::size_t)E2.size());
    for (i64 x = E2.a; x <= E2.b; ++x) r.samples[(std::size_t)(x - E2.a)] = f.at(x);
    IntervalZ E3 = E.tripled();
    return AverageTable(r, E3.a, E3.b);
}

std::vector<IntervalZ> children_from(const IntervalZ& E, const AverageTable& t, double C) {
    std::vector<IntervalZ> out;
    double base = t.avg(E.doubled());
    if (base == 0) return out;
    double thr = C * base;
    std::function<void(i64, i64)> rec = [&](i64 a, i64 len) {
        IntervalZ I(a, a + len - 1);
        if (t.avg(I.tripled()) > thr) {
            out.push_back(I);
            return;
        }
        if (len == 1) return;
        rec(a, len / 2);
        rec(a + len / 2, len / 2);
    };
    rec(E.a, E.size());
    return out;
}

}  // namespace

std::vector<IntervalZ> find_stopping_children(const IntervalZ& E, const Signal& f, double C) {
    require_dyadic(E);
    if (!(C > 1)) throw std::domain_error("sparse: C must exceed 1");
    AverageTable t = table_for(E, f);
    auto ch = children_from(E, t, C);
    i64 mass = 0;
    for (auto& I : ch) mass += I.size();
    if (4 * mass > E.size()) throw InvariantViolation("stopping children exceed |E|/4");
    return ch;
}

std::vector<i64> minimal_tau(const IntervalZ& E, const Signal& f, double C) {
    require_dyadic(E);
    AverageTable t = table_for(E, f);
    const i64 n = E.size();
    const double thr = C * t.avg(E.doubled());
    std::vector<i64> longest(n, 0);  // longest violating interval starting at each point
    if (thr > 0) {
        for (i64 u = 0; u < n; ++u) {
            for (i64 len = n - u; len >= 1; --len) {
                IntervalZ I(E.a + u, E.a + u + len - 1);
                if (t.sum(I.a - len, I.b + len) > thr * 3.0 * (double)len) {
                    longest[u] = len;
                    break;
                }
            }
        }
    }
    std::vector<i64> cover(n, 0);
    for (i64 u = 0; u < n; ++u)
        for (i64 x = u; x < u + longest[u]; ++x) cover[x] = std::max(cover[x], longest[u]);
    std::vector<i64> tmin(n);
    for (i64 i = 0; i < n; ++i) {
        i64 tt = 1;
        while (tt * tt <= cover[i]) tt *= 2;
        tmin[i] = tt;
    }
    return tmin;
}

StoppingTime build_admissible_tau(const IntervalZ& E, const Signal& f, double C) {
    auto tmin = minimal_tau(E, f, C);
    const i64 cap = tau_cap(E.size());
    StoppingTime tau{E, std::vector<i64>(tmin.size())};
    for (std::size_t i = 0; i < tmin.size(); ++i) {
        if (tmin[i] > cap) throw InvariantViolation("no admissible scale below the cap");
        i64 x = E.a + (i64)i;
        i64 best = tmin[i];
        double bestv = -1;
        for (i64 N = tmin[i]; N <= cap; N *= 2) {
            double s = 0;
            for (i64 k = 1; k <= N; ++k) s += f.at(x + k * k);
            s /= (double)N;
            if (s >= bestv) {
                bestv = s;
                best = N;
            }
        }
        tau.values[i] = best;
    }
    return tau;
}

bool check_admissible(const StoppingTime& tau, const Signal& f, double C) {
    const IntervalZ& E = tau.E;
    require_dyadic(E);
    AverageTable t = table_for(E, f);
    const i64 n = E.size();
    const double thr = C * t.avg(E.doubled());
    if (thr == 0) return true;
    for (i64 u = 0; u < n; ++u) {
        i64 mn = INT64_MAX;
        for (i64 len = 1; u + len <= n; ++len) {
            mn = std::min(mn, tau.values[(std::size_t)(u + len - 1)]);
            i64 a = E.a + u, b = a + len - 1;
            if (t.sum(a - len, b + len) > thr * 3.0 * (double)len && mn * mn <= len) return false;
        }
    }
    return true;
}

Signal apply_A_tau(const Signal& f, const StoppingTime& tau) {
    Signal out = Signal::zeros(tau.E.a, (std::size_t)tau.E.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        i64 x = tau.E.a + (i64)i, N = tau.values[i];
        double s = 0;
        for (i64 k = 1; k <= N; ++k) s += f.at(x + k * k);
        out.samples[i] = s / (double)N;
    }
    return out;
}

SparseCollection sparse_decompose(const IntervalZ& E, const Signal& f, const Signal& g, double C,
                                  DecomposeStats* stats) {
    (void)g;  // the collection depends on f only; g enters through the sparse form
    require_dyadic(E);
    const int depth_cap = (int)std::ceil(std::log((double)E.size()) / std::log(4.0 / 3.0)) + 1;
    SparseCollection out;
    DecomposeStats st;
    std::function<void(const IntervalZ&, int)> rec = [&](const IntervalZ& I, int depth) {
        if (depth > depth_cap) throw std::logic_error("sparse recursion exceeded log_{4/3}|E| levels");
        st.max_depth = std::max(st.max_depth, depth);
        AverageTable t = table_for(I, f);
        auto ch = children_from(I, t, C);
        i64 mass = 0;
        for (auto& c : ch) mass += c.size();
        st.worst_children_ratio = std::max(st.worst_children_ratio, (double)mass / (double)I.size());
        if (4 * mass > I.size()) throw InvariantViolation("stopping children exceed |E|/4");
        SparseInterval node{I, {}};
        std::size_t ci = 0;
        for (i64 x = I.a; x <= I.b; ++x) {
            while (ci < ch.size() && ch[ci].b < x) ++ci;
            if (ci < ch.size() && ch[ci].contains(x)) continue;
            node.witness.push_back(x);
        }
        out.items.push_back(std::move(node));
        for (auto& c : ch) rec(c, depth + 1);
    };
    rec(E, 0);
    if (stats) *stats = st;
    return out;
}

bool verify_sparsity(const SparseCollection& c, std::string* why) {
    std::vector<i64> all;
    for (auto& it : c.items) {
        for (i64 x : it.witness)
            if (!it.I.contains(x)) {
                if (why) *why = "witness point outside its interval";
                return false;
            }
        if (4 * (i64)it.witness.size() <= it.I.size()) {
            if (why) *why = "witness density not above 1/4";
            return false;
        }
        all.insert(all.end(), it.witness.begin(), it.witness.end());
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
        if (why) *why = "witnesses overlap";
        return false;
    }
    return true;
}

double sparse_form(const SparseCollection& c, const Signal& f, const Signal& g, double r, double s) {
    double tot = 0;
    for (auto& it : c.items) tot += (double)it.I.size() * norm_p(f, it.I.doubled(), r) * norm_p(g, it.I, s);
    return tot;
}

std::string sparse_to_json(const SparseCollection& c) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& it : c.items) arr.push_back({{"a", it.I.a}, {"b", it.I.b}, {"witness", it.witness}});
    return arr.dump();
}

Signal dyadic_maximal_on(const Signal& f, const IntervalZ& E) {
    Signal out = Signal::zeros(E.a, (std::size_t)E.size());
    const i64 cap = tau_cap(E.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        i64 x = E.a + (i64)i;
        double best = 0, s = 0;
        i64 k = 0;
        for (i64 N = 1; N <= cap; N *= 2) {
            for (; k < N; ++k) s += f.at(x + (k + 1) * (k + 1));
            best = std::max(best, std::abs(s) / (double)N);
        }
        out.samples[i] = best;
    }
    return out;
}

}  // namespace sqlab
