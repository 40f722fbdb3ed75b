#pragma once
// Portable random streams.
//
// Algorithm (fixed, so results reproduce across platforms and builds):
//   - engine: std::mt19937_64, whose output sequence is pinned by the C++ standard
//   - stream k of a run seeded with s is seeded with splitmix64(s ^ splitmix64(k + 1))
//   - uniform double in [0,1): top 53 bits of one engine draw times 2^-53
//   - standard normal: Box-Muller, both outputs used in order
// std::*_distribution is deliberately avoided; its algorithms are implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace echolab
{

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(seed ^ splitmix64(stream + 1));
}

class Rng
{
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : eng_(stream_seed(seed, stream)) {}

    std::uint64_t next_u64() { return eng_(); }

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace echolab
