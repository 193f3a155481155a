#ifndef BGMP_RANDOM_HPP
#define BGMP_RANDOM_HPP

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <bit>
#include <cstdint>
#include <initializer_list>

namespace bgmp {

// boost::random distributions are implemented in-header, so the stream for a
// given seed is the same on every platform and standard library.
using Engine = boost::random::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive hash of a master seed with work-item coordinates.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t h = splitmix64(master);
    for (auto p : parts)
        h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline std::uint64_t coordinate_bits(double v) noexcept
{
    return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v);
}

class Gaussian {
public:
    Gaussian(double mean, double stddev) : dist_(mean, stddev) {}
    double operator()(Engine& eng) { return dist_(eng); }

private:
    boost::random::normal_distribution<double> dist_;
};

class Coin {
public:
    explicit Coin(double p) : dist_(p) {}
    bool operator()(Engine& eng) { return dist_(eng); }

private:
    boost::random::bernoulli_distribution<double> dist_;
};

} // namespace bgmp

#endif // BGMP_RANDOM_HPP
