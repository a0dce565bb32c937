#pragma once
// Normalized quadratic Gauss sums
//   G(a,q)  = (1/q)  sum_{n<q}  e(a n^2 / q)
//   G0(a,q) = (1/2q) sum_{n<2q} e(a n^2 / 2q)

#include "sqlab/arith.hpp"

namespace sqlab {

enum class Method { direct, closed };

// e(num/den) with num reduced exactly mod den
cplx e_frac(i64 num, i64 den);

cplx gauss_G(i64 a, i64 q, Method m = Method::closed);
cplx gauss_G0(i64 a, i64 q, Method m = Method::closed);

// compensated complex accumulator (Neumaier)
struct KahanC {
    double re = 0, im = 0, cre = 0, cim = 0;
    void add(cplx z);
    cplx value() const { return {re + cre, im + cim}; }
};

}  // namespace sqlab
