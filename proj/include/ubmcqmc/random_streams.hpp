#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace ubmcqmc {

/// What an IID stream is used for inside one chain. Streams with different
/// roles (or different chain ids) never share state.
enum class StreamRole : std::uint64_t {
    initial = 1,    // draws from the initial distribution
    burn_in,        // IID rows before the core matrix
    overflow,       // IID rows after the core matrix
    y_chain,        // residual sampling of the Y chain
    coupling,       // acceptance uniforms of the maximal coupling
    x_aux,          // extra randomness consumed by X updates (accept/reject)
    randomization,  // shifts and permutations of the core matrix
    pilot,          // pilot runs for the burn-in choice
    data,           // synthetic datasets
};

inline constexpr std::uint64_t splitmix_increment = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t chain,
                                   StreamRole role) noexcept {
    std::uint64_t k = mix64(seed + splitmix_increment);
    k = mix64(k ^ (chain + 0x632be59bd9b4e019ULL));
    return mix64(k ^ (static_cast<std::uint64_t>(role) * 0xd6e8feb86659fd93ULL));
}

/// Counter-based SplitMix64 stream. Element i of the stream is a pure
/// function of (key, i), so a stream can be positioned anywhere in O(1).
///
/// Satisfies UniformRandomBitGenerator.
class IidStream {
public:
    using result_type = std::uint64_t;

    constexpr IidStream() noexcept = default;
    constexpr explicit IidStream(std::uint64_t key) noexcept : key_(key) {}
    constexpr IidStream(std::uint64_t seed, std::uint64_t chain, StreamRole role) noexcept
        : key_(stream_key(seed, chain, role)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        return mix64(key_ + (++counter_) * splitmix_increment);
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1).
    constexpr double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    void fill(std::span<double> out) noexcept {
        for (double& v : out) v = uniform();
    }

    /// Independent child stream, e.g. one per row of an IID matrix.
    [[nodiscard]] constexpr IidStream substream(std::uint64_t index) const noexcept {
        return IidStream(mix64(key_ ^ mix64(index + 0x2545f4914f6cdd1dULL)));
    }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t position() const noexcept { return counter_; }
    constexpr void seek(std::uint64_t position) noexcept { counter_ = position; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace ubmcqmc
