#include "sqlab/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "json.hpp"

namespace sqlab {

namespace {

std::mutex& plan_mutex() { return fftw_plan_mutex(); }

struct Plan {
    fftw_plan p = nullptr;
    ~Plan() {
        if (p) {
            std::lock_guard<std::mutex> lk(plan_mutex());
            fftw_destroy_plan(p);
        }
    }
};

struct FftwBuf {
    void* ptr = nullptr;
    explicit FftwBuf(std::size_t bytes) {
        ptr = fftw_malloc(bytes);
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuf() { fftw_free(ptr); }
    FftwBuf(const FftwBuf&) = delete;
    FftwBuf& operator=(const FftwBuf&) = delete;
};

i64 next_pow2(i64 v) {
    i64 L = 1;
    while (L < v) L <<= 1;
    return L;
}

// period window: index n < len is x = off + n, n >= len is x = off + n - L
Signal unwrap_period(const double* buf, i64 L, i64 off, i64 len, double scale) {
    Signal out = Signal::zeros(off + len - L, (std::size_t)L);
    for (i64 n = 0; n < L; ++n) {
        i64 idx = n < len ? n + (L - len) : n - len;
        out.samples[(std::size_t)idx] = buf[n] * scale;
    }
    return out;
}

}  // namespace

std::pair<i64, i64> Signal::nonzero_hull() const {
    i64 lo = -1, hi = -1;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i] != 0) {
            if (lo < 0) lo = (i64)i;
            hi = (i64)i;
        }
    if (lo < 0) return {0, 0};
    return {offset + lo, offset + hi + 1};
}

IntervalZ::IntervalZ(i64 a_, i64 b_) : a(a_), b(b_) {
    if (b < a) throw std::domain_error("IntervalZ: need a <= b");
}

i64 dft_length(std::size_t support, i64 N) { return next_pow2(4 * ((i64)support + N * N)); }

// ---------------------------------------------------------------------------
// averages

Signal average_AN(const Signal& f, i64 N, AvgMethod method) {
    if (N < 1) throw std::domain_error("average_AN: N must be positive");
    const i64 len = (i64)f.size();
    if (len == 0) return {};
    const i64 N2 = N * N;
    Signal out = Signal::zeros(f.offset - N2, (std::size_t)(len + N2 - 1));
    if (method == AvgMethod::direct) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            i64 x = out.offset + (i64)i;
            double s = 0;
            for (i64 k = 1; k <= N; ++k) s += f.at(x + k * k);
            out.samples[i] = s / (double)N;
        }
        return out;
    }
    const i64 L = next_pow2(len + N2 + 1);
    FftwBuf gb(sizeof(double) * L), kb(sizeof(double) * L);
    FftwBuf gs(sizeof(fftw_complex) * (L / 2 + 1)), ks(sizeof(fftw_complex) * (L / 2 + 1));
    auto* g = static_cast<double*>(gb.ptr);
    auto* k = static_cast<double*>(kb.ptr);
    auto* G = static_cast<fftw_complex*>(gs.ptr);
    auto* K = static_cast<fftw_complex*>(ks.ptr);
    Plan pg, pk, pi;
    {
        std::lock_guard<std::mutex> lk(plan_mutex());
        pg.p = fftw_plan_dft_r2c_1d((int)L, g, G, FFTW_ESTIMATE);
        pk.p = fftw_plan_dft_r2c_1d((int)L, k, K, FFTW_ESTIMATE);
        pi.p = fftw_plan_dft_c2r_1d((int)L, G, g, FFTW_ESTIMATE);
    }
    std::fill(g, g + L, 0.0);
    std::fill(k, k + L, 0.0);
    std::copy(f.samples.begin(), f.samples.end(), g);
    for (i64 j = 1; j <= N; ++j) k[mod(-j * j, L)] += 1.0 / (double)N;
    fftw_execute(pg.p);
    fftw_execute(pk.p);
    for (i64 j = 0; j <= L / 2; ++j) {
        cplx z = cplx(G[j][0], G[j][1]) * cplx(K[j][0], K[j][1]);
        G[j][0] = z.real();
        G[j][1] = z.imag();
    }
    fftw_execute(pi.p);
    for (std::size_t i = 0; i < out.size(); ++i) {
        i64 x = out.offset + (i64)i;
        out.samples[i] = g[mod(x - f.offset, L)] / (double)L;
    }
    return out;
}

Signal average_poly(const Signal& f, const std::vector<i64>& coeffs, i64 N) {
    if (N < 1) throw std::domain_error("average_poly: N must be positive");
    if (f.size() == 0) return {};
    std::vector<i64> P(N + 1);
    for (i64 n = 1; n <= N; ++n) {
        i64 v = 0;
        for (std::size_t i = coeffs.size(); i-- > 0;) v = v * n + coeffs[i];
        P[n] = v;
    }
    i64 pmin = *std::min_element(P.begin() + 1, P.end());
    i64 pmax = *std::max_element(P.begin() + 1, P.end());
    Signal out = Signal::zeros(f.first() - pmax, (std::size_t)(f.last() - pmin - (f.first() - pmax) + 1));
    for (std::size_t i = 0; i < out.size(); ++i) {
        i64 x = out.offset + (i64)i;
        double s = 0;
        for (i64 n = 1; n <= N; ++n) s += f.at(x + P[n]);
        out.samples[i] = s / (double)N;
    }
    return out;
}

Signal maximal_A(const Signal& f, i64 dyadic_max) {
    if (!is_pow2(dyadic_max)) throw std::domain_error("maximal_A: dyadic_max must be a power of two");
    if (f.size() == 0) return {};
    const i64 D2 = dyadic_max * dyadic_max;
    Signal out = Signal::zeros(f.offset - D2, f.size() + (std::size_t)D2 - 1);
    for (i64 N = 1; N <= dyadic_max; N *= 2) {
        Signal a = average_AN(f, N, AvgMethod::direct);
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::size_t j = (std::size_t)(a.offset + (i64)i - out.offset);
            out.samples[j] = std::max(out.samples[j], std::abs(a.samples[i]));
        }
    }
    return out;
}

double norm_p(const Signal& f, const IntervalZ& I, double p) {
    if (!(p >= 1)) throw std::domain_error("norm_p: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0;
        for (i64 x = I.a; x <= I.b; ++x) m = std::max(m, std::abs(f.at(x)));
        return m;
    }
    double s = 0;
    for (i64 x = I.a; x <= I.b; ++x) {
        double v = std::abs(f.at(x));
        if (v != 0) s += std::pow(v, p);
    }
    return std::pow(s / (double)I.size(), 1.0 / p);
}

double bilinear(const Signal& u, const Signal& v) {
    i64 lo = std::max(u.first(), v.first()), hi = std::min(u.last(), v.last());
    double s = 0;
    for (i64 x = lo; x <= hi; ++x) s += u.at(x) * v.at(x);
    return s;
}

// ---------------------------------------------------------------------------
// multipliers

Signal apply_multiplier(const Signal& f, const MultiplierGrid& grid, i64 natural_N) {
    const i64 L = grid.L;
    const i64 len = (i64)f.size();
    if ((i64)grid.values.size() != L || !is_pow2(L)) throw std::domain_error("apply_multiplier: malformed grid");
    if ((double)L < 2.0 * ((double)len + (double)natural_N * natural_N + 1))
        throw std::domain_error("apply_multiplier: L too small for support and scale");
    FftwBuf bb(sizeof(fftw_complex) * L);
    auto* b = static_cast<fftw_complex*>(bb.ptr);
    Plan fw, bw;
    {
        std::lock_guard<std::mutex> lk(plan_mutex());
        fw.p = fftw_plan_dft_1d((int)L, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
        bw.p = fftw_plan_dft_1d((int)L, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (i64 n = 0; n < L; ++n) {
        b[n][0] = n < len ? f.samples[(std::size_t)n] : 0.0;
        b[n][1] = 0;
    }
    fftw_execute(fw.p);
    for (i64 j = 0; j < L; ++j) {
        cplx z = cplx(b[j][0], b[j][1]) * grid.values[(std::size_t)j];
        b[j][0] = z.real();
        b[j][1] = z.imag();
    }
    fftw_execute(bw.p);
    std::vector<double> re(L);
    for (i64 n = 0; n < L; ++n) re[n] = b[n][0];
    return unwrap_period(re.data(), L, f.offset, len, 1.0 / (double)L);
}

// ---------------------------------------------------------------------------
// High / Low

SplitEngine::SplitEngine(const Signal& f, const IntervalZ& I, i64 N) : I_(I), N_(N), spec_(nullptr) {
    if (N < 1) throw std::domain_error("high_low_split: N must be positive");
    if (I.size() != N * N) throw std::domain_error("high_low_split: need |I| = N^2");
    IntervalZ I2 = I.doubled();
    auto [lo, hi] = f.nonzero_hull();
    if (lo != hi && (lo < I2.a || hi - 1 > I2.b)) throw std::domain_error("high_low_split: f not supported in 2I");
    f_ = Signal::zeros(I2.a, (std::size_t)I2.size());
    for (i64 x = I2.a; x <= I2.b; ++x) f_.samples[(std::size_t)(x - I2.a)] = f.at(x);
    L_ = dft_length(f_.size(), N);
    FftwBuf in(sizeof(double) * L_);
    auto* g = static_cast<double*>(in.ptr);
    spec_ = fftw_malloc(sizeof(fftw_complex) * (L_ / 2 + 1));
    if (!spec_) throw std::bad_alloc();
    Plan p;
    {
        std::lock_guard<std::mutex> lk(plan_mutex());
        p.p = fftw_plan_dft_r2c_1d((int)L_, g, static_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
    }
    std::fill(g, g + L_, 0.0);
    std::copy(f_.samples.begin(), f_.samples.end(), g);
    fftw_execute(p.p);
}

SplitEngine::~SplitEngine() { fftw_free(spec_); }

Signal SplitEngine::apply(const MultiplierGrid& grid, const MultiplierGrid* minus) const {
    const i64 H = L_ / 2 + 1;
    auto usable = [&](const MultiplierGrid& g) { return g.L == L_ && (i64)g.values.size() >= H; };
    if (!usable(grid) || (minus && !usable(*minus))) throw std::domain_error("SplitEngine: grid length mismatch");
    FftwBuf tb(sizeof(fftw_complex) * H), ob(sizeof(double) * L_);
    auto* t = static_cast<fftw_complex*>(tb.ptr);
    auto* o = static_cast<double*>(ob.ptr);
    auto* s = static_cast<const fftw_complex*>(spec_);
    Plan p;
    {
        std::lock_guard<std::mutex> lk(plan_mutex());
        p.p = fftw_plan_dft_c2r_1d((int)L_, t, o, FFTW_ESTIMATE);
    }
    for (i64 j = 0; j < H; ++j) {
        cplx m = grid.values[(std::size_t)j];
        if (minus) m -= minus->values[(std::size_t)j];
        cplx z = cplx(s[j][0], s[j][1]) * m;
        t[j][0] = z.real();
        t[j][1] = z.imag();
    }
    // Hermitian input: the DC and Nyquist bins must be real
    t[0][1] = 0;
    t[H - 1][1] = 0;
    fftw_execute(p.p);
    return unwrap_period(o, L_, f_.offset, (i64)f_.size(), 1.0 / (double)L_);
}

HighLow SplitEngine::split(i64 J, int threads) const {
    if (!is_pow2(J)) throw std::domain_error("high_low_split: J must be a power of two");
    HighLow out;
    if (4 * J >= N_) {
        out.L = apply(weyl_grid(N_, L_));
        out.H = Signal::zeros(out.L.offset, out.L.size());
        return out;
    }
    MultiplierGrid b1 = sample_multiplier({Which::b_N1, N_, J, J, 0, L_}, threads);
    return split(weyl_grid(N_, L_), b1);
}

HighLow SplitEngine::split(const MultiplierGrid& weyl, const MultiplierGrid& b1) const {
    HighLow out;
    out.L = apply(b1);
    // c_N + b_{N,2} = weyl - b_{N,1}
    out.H = apply(weyl, &b1);
    return out;
}

HighLow high_low_split(const Signal& f, const IntervalZ& I, i64 N, i64 J, int threads) {
    auto [lo, hi] = f.nonzero_hull();
    if (lo == hi) {
        IntervalZ I2 = I.doubled();
        HighLow z;
        z.H = Signal::zeros(I2.a, (std::size_t)I2.size());
        z.L = z.H;
        return z;
    }
    SplitEngine e(f, I, N);
    return e.split(J, threads);
}

// ---------------------------------------------------------------------------
// file formats

std::string signal_to_json(const Signal& s) {
    nlohmann::json j;
    j["offset"] = s.offset;
    j["samples"] = s.samples;
    return j.dump();
}

Signal signal_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    Signal s;
    s.offset = j.at("offset").get<i64>();
    s.samples = j.at("samples").get<std::vector<double>>();
    for (double v : s.samples)
        if (!std::isfinite(v)) throw std::domain_error("signal: non-finite sample");
    return s;
}

static_assert(std::endian::native == std::endian::little, "binary signal format assumes a little-endian host");

std::vector<char> signal_to_binary(const Signal& s) {
    std::vector<char> out(16 + 8 * s.size());
    i64 off = s.offset;
    u64 n = s.size();
    std::memcpy(out.data(), &off, 8);
    std::memcpy(out.data() + 8, &n, 8);
    if (n) std::memcpy(out.data() + 16, s.samples.data(), 8 * n);
    return out;
}

Signal signal_from_binary(const std::vector<char>& bytes) {
    if (bytes.size() < 16) throw std::domain_error("signal: truncated header");
    i64 off;
    u64 n;
    std::memcpy(&off, bytes.data(), 8);
    std::memcpy(&n, bytes.data() + 8, 8);
    if (bytes.size() != 16 + 8 * n) throw std::domain_error("signal: length mismatch");
    Signal s = Signal::zeros(off, n);
    if (n) std::memcpy(s.samples.data(), bytes.data() + 16, 8 * n);
    return s;
}

}  // namespace sqlab
