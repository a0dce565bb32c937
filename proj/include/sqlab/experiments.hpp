#pragma once
// Experiment runners. Each returns a deterministic report for fixed inputs
// and seed; the thread count never changes the numbers.

#include <string>
#include <vector>

#include "sqlab/operators.hpp"
#include "sqlab/report.hpp"

namespace sqlab {

struct RunOptions {
    u64 seed = 1;
    int threads = 1;
    double tol = 0;  // 0 keeps each experiment's own default
};

// 1 <= q <= q_max, 0 <= a < 2q; closed vs direct, modulus classification,
// G0(a,q) = G(a,2q), G(2a,2q) = G(a,q) and the product identity for odd q1, q2
ExperimentReport run_gauss_check(i64 q_max, const RunOptions& o);

// r_q(x) against brute force for q <= q_max and the prime-power case tables
ExperimentReport run_sqrt_count(i64 q_max, u64 p_max, int k_max, const RunOptions& o);

// one row per identity: (id, cases, max_error, holds); names in metadata
ExperimentReport run_hsum_identities(i64 q_max, const RunOptions& o);

ExperimentReport run_lowpass_scan(const std::vector<i64>& J_list, i64 x_lo, i64 x_hi, bool adversarial,
                                  const RunOptions& o);

ExperimentReport run_fjk_constant(const std::vector<i64>& N_list, i64 grid, const RunOptions& o);

ExperimentReport run_gamma_decay(const std::vector<i64>& N_list, int points, const RunOptions& o);

// sup over xi = j/grid of |c_N| for each M, N fixed
ExperimentReport run_minor_arc(i64 N, const std::vector<i64>& M_list, i64 grid, const RunOptions& o);

// Improving inequality with A_N built from the polynomial P (coefficients
// c0 + c1 n + ...). |I| = N^deg, f on 2I, g on I.
ExperimentReport run_poly_average(const std::vector<i64>& coeffs, const std::vector<i64>& N_list, double p,
                                  int trials, const RunOptions& o);
ExperimentReport run_improving_ratio(const std::vector<i64>& N_list, double p, int trials, const RunOptions& o);

ExperimentReport run_orlicz_ratio(const std::vector<i64>& N_list, int trials, const RunOptions& o);

// strategy: random | squares | progression | block | all
ExperimentReport run_halfdim(const std::vector<i64>& N_list, const std::vector<double>& eps_list,
                             const std::string& strategy, const RunOptions& o);

ExperimentReport run_multifreq(const std::vector<int>& s_list, i64 N_max, int trials, const RunOptions& o);

ExperimentReport run_sparse_demo(const std::vector<i64>& E_sizes, double density, double C, int trials,
                                 const RunOptions& o);

ExperimentReport run_high_low(i64 N, const std::vector<i64>& J_list, int trials, const RunOptions& o);

// --- helpers shared with the tests ---------------------------------------------

double orlicz_psi(double x);  // x^{2/3} (1 + |log x|)^{4/3}, psi(0) = 0

// #{1 <= k <= N : P(k) in F} for F = {P(1), ..., P(N)}, computed from A_N at 0
i64 extremal_pairing_count(const std::vector<i64>& coeffs, i64 N);

// 3/p - 2 for p = num/den, as a reduced fraction {num, den}
std::pair<i64, i64> lower_bound_exponent(i64 p_num, i64 p_den);

// the random indicator pair of trial t at scale N (f on 2I, g on I, |I| = n)
std::pair<Signal, Signal> random_indicator_pair(i64 n, u64 seed, u64 stream);

}  // namespace sqlab
