#ifndef XLRIS_RANDOM_HPP
#define XLRIS_RANDOM_HPP

#include <complex>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace xlris
{
    // splitmix64 finaliser; used to derive independent substream seeds.
    constexpr std::uint64_t mix64(std::uint64_t x) noexcept
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Seeded random stream. Copyable; a copy continues the same sequence independently.
    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t seed = 0) : engine_(mix64(seed)) {}

        // Substream for a (master seed, tag...) tuple, e.g. derive(seed, {trial, scheme}).
        static RandomStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> tags)
        {
            std::uint64_t s = mix64(master);
            for (auto t : tags)
                s = mix64(s ^ mix64(t + 0x632BE59BD9B4E019ULL));
            return RandomStream(s);
        }

        double uniform(double lo, double hi)
        {
            if (lo == hi)
                return lo;
            return std::uniform_real_distribution<double>(lo, hi)(engine_);
        }

        double normal() { return normal_(engine_); }

        // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
        std::complex<double> complex_normal(double variance = 1.0)
        {
            const double s = std::sqrt(variance / 2.0);
            const double re = normal_(engine_);
            const double im = normal_(engine_);
            return {s * re, s * im};
        }

        std::mt19937_64 &engine() noexcept { return engine_; }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };
}

#endif
