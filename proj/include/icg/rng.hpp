#ifndef ICG_RNG_HPP
#define ICG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace icg {

/// Counter-based 64-bit generator.
///
/// Output `i` of the stream with seed `s` is `mix64(s + (i + 1) * 0x9E3779B97F4A7C15)`,
/// where `mix64` is the SplitMix64 finalizer. Only unsigned 64-bit wrap-around
/// arithmetic is involved, so the stream is identical on every platform and any
/// position can be evaluated without generating the ones before it.
class CounterRng
{
public:
    static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    static constexpr std::uint64_t mix64(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t at(std::uint64_t index) const noexcept
    {
        return mix64(seed_ + (index + 1) * golden_gamma);
    }

    /// Uniform double in [0, 1) built from the top 53 bits of output `index`.
    double uniform_at(std::uint64_t index) const noexcept
    {
        return static_cast<double>(at(index) >> 11) * 0x1.0p-53;
    }

    /// Exponential variate with the given mean by inverse CDF: -mean * ln(1 - u).
    double exponential_at(std::uint64_t index, double mean) const noexcept
    {
        if (mean == 0.0)
            return 0.0;
        return -mean * std::log1p(-uniform_at(index));
    }

    constexpr std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/// Child seed for a labelled sub-stream, e.g. (root, level, trial).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = CounterRng::mix64(root ^ 0x6A09E667F3BCC909ULL);
    for (auto label : path)
        s = CounterRng::mix64(s + (label + 1) * CounterRng::golden_gamma);
    return s;
}

} // namespace icg

#endif // ICG_RNG_HPP
