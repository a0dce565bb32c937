#pragma once
// Admissible stopping times and the sparse recursion for the dyadic maximal
// average. Dyadic grid anchored at the left endpoint of the top interval E.

#include <string>
#include <vector>

#include "sqlab/operators.hpp"

namespace sqlab {

constexpr double kStopConstant = 8.0;

struct StoppingTime {
    IntervalZ E;
    std::vector<i64> values;  // values[x - E.a], powers of two with value^2 <= |E|
    i64 at(i64 x) const { return values[(std::size_t)(x - E.a)]; }
};

struct SparseInterval {
    IntervalZ I;
    std::vector<i64> witness;  // E_I, ascending
};

struct SparseCollection {
    std::vector<SparseInterval> items;
};

// <|f|>_{J,1} for the tripled/doubled intervals, computed on all of Z
class AverageTable {
public:
    AverageTable(const Signal& f, i64 lo, i64 hi);  // prefix sums of |f| over [lo, hi]
    double sum(i64 a, i64 b) const;                  // sum over [a, b], zero outside [lo, hi]
    double avg(const IntervalZ& I) const { return sum(I.a, I.b) / (double)I.size(); }

private:
    i64 lo_, hi_;
    std::vector<double> pre_;
};

// largest power of two <= floor(sqrt(n))
i64 tau_cap(i64 n);

std::vector<IntervalZ> find_stopping_children(const IntervalZ& E, const Signal& f, double C = kStopConstant);

// tau_min(x): smallest power of two t with t^2 > |I| for every violating I containing x
std::vector<i64> minimal_tau(const IntervalZ& E, const Signal& f, double C = kStopConstant);

StoppingTime build_admissible_tau(const IntervalZ& E, const Signal& f, double C = kStopConstant);
bool check_admissible(const StoppingTime& tau, const Signal& f, double C = kStopConstant);

Signal apply_A_tau(const Signal& f, const StoppingTime& tau);

struct DecomposeStats {
    int max_depth = 0;
    double worst_children_ratio = 0;  // max over nodes of sum|children| / |E|
};

SparseCollection sparse_decompose(const IntervalZ& E, const Signal& f, const Signal& g, double C = kStopConstant,
                                  DecomposeStats* stats = nullptr);

// witnesses disjoint, inside their interval, |E_I| > |I|/4
bool verify_sparsity(const SparseCollection& c, std::string* why = nullptr);

double sparse_form(const SparseCollection& c, const Signal& f, const Signal& g, double r, double s);

std::string sparse_to_json(const SparseCollection& c);

// max over dyadic N with N^2 <= |E| of A_N f on E
Signal dyadic_maximal_on(const Signal& f, const IntervalZ& E);

bool is_dyadic_interval(const IntervalZ& E);

}  // namespace sqlab
