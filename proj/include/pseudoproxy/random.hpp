#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pseudoproxy {

/// Avalanche finalizer from splitmix64 (Stafford "Mix13" constants).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

/// Folds one more 64-bit word into a running hash. Each fold is a full
/// mix64 round, so any single-bit change in any word flips ~half the output.
constexpr std::uint64_t fold64(std::uint64_t h, std::uint64_t word) noexcept
{
    return mix64(h ^ mix64(word + golden_gamma));
}

/// What a substream is used for. Values are frozen: they feed the stream keys.
enum class Purpose : std::uint32_t {
    target = 1,
    proxy_noise = 2,
    ar1_ensemble = 3,
};

struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint32_t cell_index = 0;
    std::uint32_t replication_index = 0;
    std::uint32_t purpose_tag = 0;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

constexpr StreamKey make_key(std::uint64_t seed, std::uint32_t cell, std::uint32_t rep, Purpose purpose) noexcept
{
    return {seed, cell, rep, static_cast<std::uint32_t>(purpose)};
}

/// Seed of the substream named by `key`:
///   h0 = mix64(master_seed)
///   h1 = fold64(h0, cell_index)
///   h2 = fold64(h1, replication_index)
///   seed = fold64(h2, purpose_tag)
constexpr std::uint64_t stream_seed(const StreamKey& key) noexcept
{
    std::uint64_t h = mix64(key.master_seed);
    h = fold64(h, key.cell_index);
    h = fold64(h, key.replication_index);
    return fold64(h, key.purpose_tag);
}

/**
 * Single-consumer stream of standard normal variates.
 *
 * Uniforms come from a splitmix64 sequence (state advances by the golden
 * gamma, output is mix64 of the state) mapped to the open interval (0, 1)
 * with 53 bits. Normals are produced in pairs by the Box-Muller transform;
 * the sine half of each pair is cached and returned by the next call.
 *
 * `substream(i)` derives an independent child stream from the seed alone, so
 * children do not depend on how many variates the parent has consumed.
 */
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept
    {
        state_ += golden_gamma;
        return mix64(state_);
    }

    /// Uniform on (0, 1); never returns 0 or 1.
    double uniform() noexcept
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double operator()() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    NormalStream substream(std::uint64_t index) const noexcept
    {
        return NormalStream(fold64(seed_ ^ 0x5bd1e995a5a5a5a5ULL, index));
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline NormalStream derive_stream(const StreamKey& key) noexcept
{
    return NormalStream(stream_seed(key));
}

}  // namespace pseudoproxy
