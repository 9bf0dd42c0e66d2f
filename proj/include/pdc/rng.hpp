#pragma once

#include <cmath>
#include <cstdint>

namespace pdc {

// Self-contained generator so that frames are bit-reproducible across
// platforms and standard libraries (std::normal_distribution is not).
// xoshiro256++ core seeded through splitmix64, Box-Muller for normals.

inline uint64_t splitmix64(uint64_t& state)
{
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable seed derivation for parallel work: every (frame, mode, stage) gets
// its own stream, so results cannot depend on execution order.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0)
{
    uint64_t s = master;
    s ^= splitmix64(a) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    s ^= splitmix64(b) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    s ^= splitmix64(c) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    uint64_t t = s;
    return splitmix64(t);
}

class Rng {
public:
    explicit Rng(uint64_t seed)
    {
        uint64_t sm = seed;
        for (auto& w : s_)
            w = splitmix64(sm);
        have_gauss_ = false;
    }

    uint64_t next_u64()
    {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in (0,1); never exactly 0 so logs are safe
    double uniform()
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal()
    {
        if (have_gauss_) {
            have_gauss_ = false;
            return gauss_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        gauss_ = r * std::sin(a);
        have_gauss_ = true;
        return r * std::cos(a);
    }

    // Knuth product method, chunked so it stays exact for large means.
    long poisson(double mean)
    {
        long n = 0;
        while (mean > 30.0) {
            // Poisson(a+b) = Poisson(a) + Poisson(b)
            n += poisson_small(30.0);
            mean -= 30.0;
        }
        return n + poisson_small(mean);
    }

    // Bernoulli-sum; exact, and n stays modest (counts per pixel).
    long binomial(long n, double p)
    {
        if (p <= 0.0)
            return 0;
        if (p >= 1.0)
            return n;
        long k = 0;
        for (long i = 0; i < n; ++i)
            if (uniform() < p)
                ++k;
        return k;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    long poisson_small(double mean)
    {
        if (mean <= 0.0)
            return 0;
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    uint64_t s_[4];
    double gauss_ = 0.0;
    bool have_gauss_;
};

} // namespace pdc
