#include "cdflab/rng.hpp"

namespace cdflab
{
namespace
{
constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}
}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t stream_index)
    : base_seed_(base_seed), stream_index_(stream_index)
{
    // Key the SplitMix64 sequence by both coordinates; the second mix keeps
    // (s, i) and (s', i') with s + i == s' + i' from colliding.
    std::uint64_t key = splitmix64_mix(base_seed + golden_gamma)
                        ^ splitmix64_mix(rotl(stream_index, 17) ^ 0x5851f42d4c957f2dULL);
    for (auto& word : state_)
    {
        key += golden_gamma;
        word = splitmix64_mix(key);
    }
    // xoshiro must not start from the all-zero state.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
        state_[0] = golden_gamma;
}

std::uint64_t RngStream::next() noexcept
{
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform_open() noexcept
{
    // 53 random mantissa bits, offset by half an ulp: (k + 0.5) / 2^53.
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

RngStream derive_stream(std::uint64_t base_seed, std::uint64_t index)
{
    return RngStream(base_seed, index);
}

}  // namespace cdflab
