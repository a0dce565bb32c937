#pragma once
// Signals on Z, the averages A_N, multiplier application by periodized DFT and
// the High/Low split.

#include <string>
#include <vector>

#include "sqlab/arith.hpp"
#include "sqlab/circle.hpp"

namespace sqlab {

struct Signal {
    i64 offset = 0;
    std::vector<double> samples;  // value at offset + index, zero elsewhere

    Signal() = default;
    Signal(i64 off, std::vector<double> s) : offset(off), samples(std::move(s)) {}
    static Signal zeros(i64 off, std::size_t len) { return {off, std::vector<double>(len, 0.0)}; }
    static Signal delta(i64 x) { return {x, {1.0}}; }

    double at(i64 x) const {
        i64 i = x - offset;
        return (i < 0 || i >= (i64)samples.size()) ? 0.0 : samples[(std::size_t)i];
    }
    i64 first() const { return offset; }
    i64 last() const { return offset + (i64)samples.size() - 1; }
    std::size_t size() const { return samples.size(); }
    // smallest window holding every nonzero sample; empty signal gives {0, 0}
    std::pair<i64, i64> nonzero_hull() const;
};

struct IntervalZ {
    i64 a = 0, b = 0;  // [a, b]
    IntervalZ() = default;
    IntervalZ(i64 a_, i64 b_);
    i64 size() const { return b - a + 1; }
    bool contains(i64 x) const { return a <= x && x <= b; }
    IntervalZ doubled() const { return {a, 2 * b - a + 1}; }
    IntervalZ tripled() const { return {a - size(), b + size()}; }
};

enum class AvgMethod { direct, dft };

Signal average_AN(const Signal& f, i64 N, AvgMethod method = AvgMethod::direct);
// A_N f(x) = (1/N) sum_{n=1}^N f(x + P(n)), P given by integer coefficients c0 + c1 n + ...
Signal average_poly(const Signal& f, const std::vector<i64>& coeffs, i64 N);
Signal maximal_A(const Signal& f, i64 dyadic_max);

double norm_p(const Signal& f, const IntervalZ& I, double p);  // p = inf for the max
double bilinear(const Signal& u, const Signal& v);

// output covers one full period, x in [offset + len - L, offset + len)
Signal apply_multiplier(const Signal& f, const MultiplierGrid& grid, i64 natural_N);

struct HighLow {
    Signal H;
    Signal L;
};

// f supported in 2I with |I| = N^2; J power of two
HighLow high_low_split(const Signal& f, const IntervalZ& I, i64 N, i64 J, int threads = 1);

// Holds F f once so several J reuse it. Real kernels only: the multipliers are
// Hermitian, so a half-spectrum transform suffices.
class SplitEngine {
public:
    SplitEngine(const Signal& f, const IntervalZ& I, i64 N);
    ~SplitEngine();
    SplitEngine(const SplitEngine&) = delete;
    SplitEngine& operator=(const SplitEngine&) = delete;

    i64 L() const { return L_; }
    // inverse transform of grid * F f, window of one period as in apply_multiplier
    // grids may hold only the first L/2+1 values; with minus, applies grid - *minus
    Signal apply(const MultiplierGrid& grid, const MultiplierGrid* minus = nullptr) const;
    HighLow split(i64 J, int threads = 1) const;
    // precomputed weyl and b_{N,1} grids of length L(), reused across signals
    HighLow split(const MultiplierGrid& weyl, const MultiplierGrid& b1) const;

private:
    Signal f_;
    IntervalZ I_;
    i64 N_;
    i64 L_;
    void* spec_;  // fftw_complex[L/2+1]
};

i64 dft_length(std::size_t support, i64 N);  // smallest 2^k >= 4 (support + N^2)

// Signal file formats
std::string signal_to_json(const Signal& s);
Signal signal_from_json(const std::string& text);
std::vector<char> signal_to_binary(const Signal& s);
Signal signal_from_binary(const std::vector<char>& bytes);

}  // namespace sqlab
