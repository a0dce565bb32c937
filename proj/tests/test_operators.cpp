#include "doctest.h"
#include "sqlab/operators.hpp"
#include "sqlab/rng.hpp"

#include <cmath>

using namespace sqlab;

namespace {

Signal random_signal(i64 off, std::size_t n, u64 stream, bool indicator = false) {
    CounterRng r(7, stream);
    Signal s = Signal::zeros(off, n);
    for (auto& v : s.samples) v = indicator ? (r.bernoulli(0.3) ? 1.0 : 0.0) : r.uniform() * 2 - 1;
    return s;
}

Signal squares_indicator(i64 N) {
    Signal s = Signal::zeros(0, (std::size_t)(N * N + 1));
    for (i64 k = 1; k <= N; ++k) s.samples[(std::size_t)(k * k)] = 1;
    return s;
}

}  // namespace

TEST_CASE("average_AN examples") {
    Signal f = random_signal(-3, 20, 1);
    Signal a = average_AN(f, 1);
    for (i64 x = -10; x < 25; ++x) CHECK(a.at(x) == f.at(x + 1));
    Signal d = average_AN(Signal::delta(5), 2);
    for (i64 x = -10; x < 10; ++x) CHECK(d.at(x) == ((x == 4 || x == 1) ? 0.5 : 0.0));
    for (i64 N : {1, 5, 32}) CHECK(average_AN(squares_indicator(N), N).at(0) == doctest::Approx(1));
    CHECK_THROWS(average_AN(f, 0));
}

TEST_CASE("average_AN direct and dft agree") {
    for (i64 N : {3, 16, 64, 256}) {
        Signal f = random_signal(-50, 5000, (u64)N);
        Signal a = average_AN(f, N, AvgMethod::direct), b = average_AN(f, N, AvgMethod::dft);
        REQUIRE(a.offset == b.offset);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a.samples[i] - b.samples[i]) < 1e-9);
    }
}

TEST_CASE("average_AN is positivity preserving and contracts the sup norm") {
    Signal f = random_signal(0, 400, 9, true);
    Signal a = average_AN(f, 10);
    for (double v : a.samples) {
        CHECK(v >= 0);
        CHECK(v <= 1 + 1e-15);
    }
}

TEST_CASE("average_poly with n^2 equals average_AN") {
    Signal f = random_signal(10, 300, 3);
    Signal a = average_AN(f, 12), p = average_poly(f, {0, 0, 1}, 12);
    for (i64 x = -200; x < 400; ++x) CHECK(a.at(x) == doctest::Approx(p.at(x)).epsilon(1e-14));
    Signal q = average_poly(Signal::delta(0), {0, 1, 1}, 3);  // n^2 + n = 2, 6, 12
    for (i64 x = -20; x < 5; ++x) CHECK(q.at(x) == doctest::Approx((x == -2 || x == -6 || x == -12) ? 1.0 / 3 : 0.0));
}

TEST_CASE("maximal_A examples") {
    Signal f = random_signal(0, 50, 4, true);
    Signal m = maximal_A(f, 1), a = average_AN(f, 1);
    for (i64 x = -5; x < 60; ++x) CHECK(m.at(x) == a.at(x));
    Signal d = maximal_A(Signal::delta(0), 16);
    for (i64 k = 1; k <= 16; ++k) {
        i64 N = 1;
        while (N < k) N *= 2;
        CHECK(d.at(-k * k) >= 1.0 / (double)N - 1e-15);
    }
    Signal z = maximal_A(Signal::zeros(0, 10), 8);
    for (double v : z.samples) CHECK(v == 0);
    CHECK_THROWS(maximal_A(f, 3));
}

TEST_CASE("norm_p examples") {
    IntervalZ I(3, 18);
    Signal chi = Signal::zeros(3, 16);
    for (auto& v : chi.samples) v = 1;
    for (double p : {1.0, 1.6, 2.0, (double)INFINITY}) CHECK(norm_p(chi, I, p) == doctest::Approx(1));
    for (double p : {1.0, 1.6, 2.0}) CHECK(norm_p(Signal::delta(7), I, p) == doctest::Approx(std::pow(16.0, -1 / p)));
    Signal f = random_signal(0, 30, 5);
    IntervalZ J(0, 29);
    CHECK(norm_p(f, J, 1) <= norm_p(f, J, 2) + 1e-15);
    CHECK(norm_p(f, J, 2) <= norm_p(f, J, INFINITY) + 1e-15);
    CHECK_THROWS(norm_p(f, J, 0.5));
}

TEST_CASE("bilinear examples") {
    CHECK(bilinear(Signal::delta(0), Signal::delta(0)) == 1);
    CHECK(bilinear(Signal::delta(0), Signal::delta(1)) == 0);
    for (i64 N : {2, 8, 64}) CHECK(bilinear(average_AN(squares_indicator(N), N), Signal::delta(0)) == doctest::Approx(1));
}

TEST_CASE("apply_multiplier examples") {
    const i64 N = 8;
    Signal f = random_signal(-7, 100, 6);
    const i64 L = 1024;
    MultiplierGrid one{L, std::vector<cplx>(L, 1.0)};
    Signal g = apply_multiplier(f, one, N);
    for (i64 x = -20; x < 110; ++x) CHECK(std::abs(g.at(x) - f.at(x)) < 1e-10);
    Signal a = average_AN(f, N), w = apply_multiplier(f, weyl_grid(N, L), N);
    for (i64 x = a.first(); x <= a.last(); ++x) CHECK(std::abs(w.at(x) - a.at(x)) < 1e-7);
    MultiplierGrid A = sample_multiplier({Which::a_N, N, 2, 0, 0, L}), C = sample_multiplier({Which::c_N, N, 2, 0, 0, L});
    Signal sa = apply_multiplier(f, A, N), sc = apply_multiplier(f, C, N);
    for (i64 x = a.first(); x <= a.last(); ++x) CHECK(std::abs(sa.at(x) + sc.at(x) - a.at(x)) < 1e-9);
    CHECK_THROWS(apply_multiplier(f, weyl_grid(N, 256), N));
}

TEST_CASE("high_low_split examples") {
    const i64 N = 32;
    IntervalZ I(0, N * N - 1);
    Signal f = random_signal(0, (std::size_t)(2 * N * N), 11, true);
    Signal a = average_AN(f, N);
    auto hl = high_low_split(f, I, N, 8);  // J >= N/4
    for (i64 x = I.a; x <= I.b; ++x) {
        CHECK(std::abs(hl.H.at(x)) < 1e-12);
        CHECK(std::abs(hl.L.at(x) - a.at(x)) < 1e-9);
    }
    auto z = high_low_split(Signal::zeros(0, 10), I, N, 4);
    for (double v : z.H.samples) CHECK(v == 0);
    for (double v : z.L.samples) CHECK(v == 0);
    for (i64 J : {2, 4}) {
        auto s = high_low_split(f, I, N, J);
        for (i64 x = I.a; x <= I.b; ++x) REQUIRE(std::abs(s.H.at(x) + s.L.at(x) - a.at(x)) < 1e-7);
    }
    Signal outside = Signal::delta(3 * N * N);
    CHECK_THROWS(high_low_split(outside, I, N, 4));
    CHECK_THROWS(high_low_split(f, IntervalZ(0, 99), N, 4));
}

TEST_CASE("SplitEngine reuses grids") {
    const i64 N = 32;
    IntervalZ I(0, N * N - 1);
    Signal f = random_signal(0, (std::size_t)(2 * N * N), 12, true);
    SplitEngine e(f, I, N);
    auto W = weyl_grid(N, e.L());
    auto B = sample_multiplier({Which::b_N1, N, 4, 4, 0, e.L()});
    auto a = e.split(W, B), b = e.split(4);
    for (i64 x = I.a; x <= I.b; ++x) {
        CHECK(a.H.at(x) == doctest::Approx(b.H.at(x)));
        CHECK(a.L.at(x) == doctest::Approx(b.L.at(x)));
    }
}

TEST_CASE("signal file formats round trip") {
    Signal f = random_signal(-12, 33, 13);
    Signal j = signal_from_json(signal_to_json(f));
    CHECK(j.offset == f.offset);
    CHECK(j.samples == f.samples);
    Signal b = signal_from_binary(signal_to_binary(f));
    CHECK(b.offset == f.offset);
    CHECK(b.samples == f.samples);
    auto bytes = signal_to_binary(f);
    bytes.pop_back();
    CHECK_THROWS(signal_from_binary(bytes));
}

TEST_CASE("intervals") {
    IntervalZ I(4, 7);
    CHECK(I.size() == 4);
    CHECK(I.doubled().a == 4);
    CHECK(I.doubled().b == 11);
    CHECK(I.tripled().a == 0);
    CHECK(I.tripled().b == 11);
    CHECK_THROWS(IntervalZ(3, 2));
    CHECK(dft_length(100, 4) == 512);
}
