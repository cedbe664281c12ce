#pragma once

#include <cstdint>
#include <array>

namespace cdflab
{

//---------------------------------------------------------------------------//
/*!
 * Reproducible random stream for one replication.
 *
 * The generator is xoshiro256** whose 256-bit state is derived
 * arithmetically from (base_seed, stream_index) by SplitMix64 mixing, so
 * replication i never depends on how many draws replication i-1 made.
 *
 * A stream is single-owner mutable state: move it to a worker, never share.
 */
class RngStream
{
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t base_seed, std::uint64_t stream_index);

    std::uint64_t base_seed() const noexcept { return base_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

    // Raw 64 random bits.
    std::uint64_t next() noexcept;
    std::uint64_t operator()() noexcept { return next(); }

    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

    // Uniform on the open interval (0, 1); never returns 0 or 1.
    double uniform_open() noexcept;

  private:
    std::uint64_t base_seed_;
    std::uint64_t stream_index_;
    std::array<std::uint64_t, 4> state_;
};

// Stream for replication `index` of an experiment seeded with `base_seed`.
RngStream derive_stream(std::uint64_t base_seed, std::uint64_t index);

// SplitMix64 finalizer; exposed for seed hashing elsewhere.
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace cdflab
