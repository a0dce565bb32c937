#include "doctest.h"
#include "sqlab/experiments.hpp"

#include <cmath>

using namespace sqlab;

namespace {

RunOptions opts(int threads = 1) {
    RunOptions o;
    o.seed = 5;
    o.threads = threads;
    return o;
}

double col_max(const ExperimentReport& r, const std::string& c) {
    double m = -INFINITY;
    for (std::size_t i = 0; i < r.rows.size(); ++i) m = std::max(m, r.cell(i, c));
    return m;
}

}  // namespace

TEST_CASE("helpers") {
    CHECK(orlicz_psi(0) == 0);
    CHECK(orlicz_psi(1) == doctest::Approx(1));
    CHECK(orlicz_psi(0.5) > 0);
    auto e = lower_bound_exponent(4, 3);
    CHECK(e.first == 1);
    CHECK(e.second == 4);
    auto e2 = lower_bound_exponent(8, 5);
    CHECK(e2.first == -1);
    CHECK(e2.second == 8);
    for (i64 N : {4, 16, 64, 256}) CHECK(extremal_pairing_count({0, 0, 1}, N) == N);
    auto [f, g] = random_indicator_pair(256, 1, 3);
    auto [f2, g2] = random_indicator_pair(256, 1, 3);
    CHECK(f.samples == f2.samples);
    CHECK(g.samples == g2.samples);
    for (double v : f.samples) CHECK((v == 0 || v == 1));
}

TEST_CASE("gauss-check small") {
    auto r = run_gauss_check(40, opts());
    CHECK(r.ok());
    CHECK(r.rows.size() == 40);
    CHECK(col_max(r, "max_err_G") < 1e-10);
    CHECK(col_max(r, "max_err_G0") < 1e-10);
}

TEST_CASE("sqrt-count small") {
    auto r = run_sqrt_count(200, 13, 4, opts());
    CHECK(r.ok());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(r.cell(i, "mismatches") == 0);
        CHECK(r.cell(i, "cases") > 0);
    }
}

TEST_CASE("hsum-identities small") {
    auto r = run_hsum_identities(60, opts());
    CHECK(r.ok());
    for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.cell(i, "holds") == 1);
}

TEST_CASE("lowpass-scan small") {
    auto r = run_lowpass_scan({4, 8, 16}, 0, 300, true, opts());
    CHECK(r.ok());
    CHECK(r.rows.size() == 3);
    auto z = run_lowpass_scan({1}, 0, 50, false, opts());
    CHECK(z.cell(0, "max_S") == 0);
}

TEST_CASE("fjk-constant and gamma-decay small") {
    auto r = run_fjk_constant({16, 64}, 1024, opts());
    CHECK(r.ok());
    CHECK(std::isfinite(col_max(r, "max_constant")));
    auto g = run_gamma_decay({16}, 12, opts());
    CHECK(g.ok());
    CHECK(col_max(g, "excess") <= 1e-9);
}

TEST_CASE("minor-arc small") {
    auto r = run_minor_arc(64, {4, 8, 16}, 4096, opts());
    CHECK(r.ok());
    CHECK(r.rows.size() == 3);
}

TEST_CASE("improving-ratio small and the polynomial identity") {
    auto a = run_improving_ratio({8, 16}, 1.6, 4, opts());
    auto b = run_poly_average({0, 0, 1}, {8, 16}, 1.6, 4, opts());
    CHECK(a.ok());
    CHECK(a.rows == b.rows);
    for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.cell(i, "extremal_pairing") == 1);
    auto c = run_poly_average({0, 1, 1}, {4, 8}, 1.6, 3, opts());
    CHECK(c.ok());
}

TEST_CASE("orlicz, halfdim, multifreq small") {
    auto o = run_orlicz_ratio({16, 64}, 4, opts());
    CHECK(o.ok());
    auto h = run_halfdim({16, 32}, {0.5, 2.0}, "all", opts());
    CHECK(h.ok());
    for (std::size_t i = 0; i < h.rows.size(); ++i)
        if (h.cell(i, "eps") > 1) CHECK(h.cell(i, "superlevel_size") == 0);
    auto m = run_multifreq({1, 2, 3}, 64, 2, opts());
    CHECK(m.ok());
}

TEST_CASE("sparse-demo and high-low small") {
    auto s = run_sparse_demo({256, 512}, 0.02, 8, 3, opts());
    CHECK(s.ok());
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        CHECK(s.cell(i, "witness_ok") == 1);
        CHECK(s.cell(i, "admissible_ok") == 1);
        CHECK(s.cell(i, "worst_children_ratio") <= 0.25);
    }
    auto h = run_high_low(64, {2, 4, 8}, 2, opts());
    CHECK(h.ok());
    CHECK(col_max(h, "max_identity_err") < 1e-7);
}

TEST_CASE("reports do not depend on the thread count") {
    CHECK(run_orlicz_ratio({16, 32}, 6, opts(1)).to_json() == run_orlicz_ratio({16, 32}, 6, opts(3)).to_json());
    CHECK(run_sparse_demo({256}, 0.02, 8, 4, opts(1)).to_json() == run_sparse_demo({256}, 0.02, 8, 4, opts(4)).to_json());
    CHECK(run_lowpass_scan({8, 16}, 0, 200, true, opts(1)).to_json() ==
          run_lowpass_scan({8, 16}, 0, 200, true, opts(2)).to_json());
}

TEST_CASE("domain errors") {
    CHECK_THROWS(run_lowpass_scan({16, 8}, 0, 10, false, opts()));
    CHECK_THROWS(run_sparse_demo({300}, 0.1, 8, 2, opts()));
    CHECK_THROWS(run_high_low(64, {32}, 1, opts()));
    CHECK_THROWS(run_halfdim({16}, {0.5}, "nonsense", opts()));
}
