#pragma once
// Circle-method pieces for the Weyl multiplier m_N(xi) = (1/N) sum_{k<=N} e(k^2 xi):
// the bump eta, gamma_N, Dirichlet approximation and the arc decomposition.

#include <mutex>
#include <optional>
#include <vector>

#include "sqlab/arith.hpp"

namespace sqlab {

// xi = m / 2^e exactly, 0 <= m < 2^e, e <= 62
struct Dyadic {
    u64 m = 0;
    int e = 0;
    static Dyadic from_double(double xi);  // reduced mod 1, rounded to 2^-62
    double value() const;
};

struct Rational {
    i64 a = 0;
    i64 q = 1;
    bool operator==(const Rational&) const = default;
};

// --- bump -------------------------------------------------------------------

double eta(double t);
inline double eta_k(double xi, double k) { return eta(k * xi); }

// --- Weyl sum ----------------------------------------------------------------

cplx weyl_multiplier(double xi, i64 N);
cplx weyl_multiplier(Dyadic xi, i64 N);

// --- gamma_N(xi) = (1/N) int_0^N e(xi t^2 / 2) dt ----------------------------

// panel quadrature in u = t/N, at most half an oscillation per panel, GL15
cplx gamma_N(double xi, i64 N, double tol = 1e-12);
// Fresnel integrals, fast path for grids
cplx gamma_N_fresnel(double xi, i64 N);
// Fourier form int_0^1 e(N^2 xi t / 2) / (2 sqrt t) dt by graded panels in t
cplx gamma_N_fourier(double xi, i64 N, double tol = 1e-12);

void fresnel(double x, double& C, double& S);  // C(x)=int_0^x cos(pi t^2/2)dt

// --- Dirichlet approximation ---------------------------------------------------

// reduced a/q, q <= 4N, |2 xi - a/q| <= 1/(4Nq), a in [0, 2q); smallest q
Rational dirichlet_approx(Dyadic xi, i64 N);
Rational dirichlet_approx(double xi, i64 N);
std::optional<Rational> dirichlet_bruteforce(Dyadic xi, i64 N);
// exact check of the defining inequality
bool dirichlet_ok(Dyadic xi, i64 N, Rational r);

// theta = 2 xi - a/q wrapped to [-1, 1), computed from exact integers
double arc_offset(Dyadic xi, Rational r);

// reduced a/q in [0,2) with 2^{s-1} <= q < 2^s
std::vector<Rational> arcs_at_level(int s);

// --- arc decomposition ---------------------------------------------------------

struct ArcRecord {
    cplx weyl;
    cplx a_N;     // sum over s <= log2 M with eta_{2^{2s}}
    cplx c_N;     // weyl - a_N
    std::vector<cplx> levels;  // a_{N,s}, s = 1..log2 M (index s-1)
    std::vector<std::optional<Rational>> level_arc;
    // with J = 2^{s0}: a^{(1)} uses eta_{q N^2 / J}
    cplx tilde;   // sum_{s<=s0} a^{(1)}_{N,s}  (= b_{N,1} when M = J)
    cplx b_N1;
    cplx b_N2;    // a_N - tilde
    cplx b_tau1;  // sum_{s<=s0} (a_{N,s} - a^{(1)}_{N,s})
    cplx b_tau2;  // sum_{s>s0} a_{N,s}
};

// M power of two <= N/4; J power of two <= M or 0 for none
ArcRecord arc_multipliers(Dyadic xi, i64 N, i64 M, i64 J = 0);
ArcRecord arc_multipliers(double xi, i64 N, i64 M, i64 J = 0);

struct FjkResult {
    Rational approx;
    double remainder = 0;
    double constant = 0;  // remainder * N / sqrt(q)
};

FjkResult fjk_remainder(Dyadic xi, i64 N);
FjkResult fjk_remainder(double xi, i64 N);

// --- sampled multipliers ------------------------------------------------------------

enum class Which { weyl, a_N, c_N, b_N1, b_N2, a_tilde, level, high };

struct MultiplierGrid {
    i64 L = 0;
    std::vector<cplx> values;  // values[j] = m(j/L)
};

struct GridSpec {
    Which which = Which::weyl;
    i64 N = 1;
    i64 M = 0;      // a_N cutoff
    i64 J = 0;      // fixed-scale split
    int level = 0;  // for Which::level: a_{N,s}
    i64 L = 0;
};

// Which::high is c_N + b_{N,2} (= weyl - b_{N,1}).
MultiplierGrid sample_multiplier(const GridSpec& spec, int threads = 1);

// histogram FFT: values[j] = (1/N) sum_k e(k^2 j / L)
MultiplierGrid weyl_grid(i64 N, i64 L);

bool is_pow2(i64 v);
// FFTW planning is not thread-safe; every planner call takes this lock
std::mutex& fftw_plan_mutex();
int ilog2(i64 v);

}  // namespace sqlab
