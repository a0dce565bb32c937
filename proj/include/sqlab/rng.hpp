#pragma once
// Counter-based generator: value i of stream s is splitmix64(seed, s, i), so a
// trial draws the same numbers no matter which thread runs it.

#include <cmath>
#include <cstdint>

namespace sqlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix64(seed) ^ splitmix64(~stream * 0xd1342543de82ef95ULL)) {}

    std::uint64_t next() { return splitmix64(key_ + 0x632be59bd9b4e019ULL * ++ctr_); }
    double uniform() { return (double)(next() >> 11) * 0x1.0p-53; }
    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : (std::uint64_t)(uniform() * (double)n); }
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace sqlab
