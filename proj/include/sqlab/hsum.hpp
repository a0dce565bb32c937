#pragma once
// The exponential sums H, H0, H1, Htilde, H_j, their support lemmas and the
// logarithmic average S_J(x) = sum_{q<=J} |H(q,x)|/q.

#include <vector>

#include "sqlab/arith.hpp"
#include "sqlab/gauss.hpp"

namespace sqlab {

enum class HKind { H, H0, H1, Htilde, Hj };

// Direct summation as displayed. j is used only for Hj.
cplx h_sum(HKind kind, i64 q, i64 x, int j = 0, Method weights = Method::closed);

// All x in [0, period) at once, period = 2q (H, Htilde, Hj) or q (H0, H1).
// Same summation as h_sum with a shared phase table.
std::vector<cplx> h_row(HKind kind, i64 q, int j = 0, Method weights = Method::closed);

i64 h0_fast(i64 q, i64 x);

struct HSupportVerdict {
    bool in_support = false;
    double bound = 0;
};

enum class Flavor { plain, tilde };

HSupportVerdict support_verdict(i64 q, i64 x, Flavor flavor = Flavor::plain);

struct DivisorSet {
    i64 x = 0;
    i64 J = 1;
    std::vector<i64> members;  // ascending
};

DivisorSet divisor_set(i64 x, i64 J);

// |H(q,x)| through the factorization H(q,x) = H(2^b,x) H1(q',x) (q even) or
// H1(q,x) (q odd >= 3), with |H1(p^k,x)| = |r_{p^k}(-x) - r_{p^{k-1}}(-x)|.
// The 2-part is tabulated once per b.
class HAbs {
public:
    explicit HAbs(i64 J);
    double operator()(i64 q, i64 x) const;
    double two_part(int b, i64 x) const;  // |H(2^b, x)|, b >= 1
    static double odd_local(u64 p, int k, i64 x);
    i64 J() const { return J_; }

private:
    i64 J_;
    std::vector<std::vector<double>> two_;  // two_[b][x mod 2^{b+1}]
};

enum class SMethod { direct, support_filtered };

double log_average_S(i64 x, i64 J, SMethod method = SMethod::support_filtered);

// S_J(x) for every J in J_list (ascending) in one enumeration of D(x).
std::vector<double> log_average_S_multi(i64 x, const std::vector<i64>& J_list, const HAbs& habs);

struct ScanResult {
    i64 argmax = 0;
    double value = 0;
};

// Candidates built from small prime powers <= J^2 (and x = 0), the x values
// that enlarge D(x).
std::vector<i64> adversarial_candidates(i64 J);

ScanResult scan_max_S(i64 J, i64 x_lo, i64 x_hi, bool adversarial, int threads = 1);

// per-J maxima over the window plus candidates; returns one result per J
std::vector<ScanResult> scan_max_S_multi(const std::vector<i64>& J_list, i64 x_lo, i64 x_hi,
                                         bool adversarial, int threads = 1);

}  // namespace sqlab
