#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wbbn::sim
{

/// Purpose tags keep protocol draws in separate streams so that changing how
/// often one layer draws never shifts another layer's sequence.
enum class StreamPurpose : std::uint32_t
{
    Mobility = 1,
    Shadowing = 2,
    PhyReception = 3,
    MacBackoff = 4,
    Routing = 5,
    Traffic = 6,
    Test = 99,
};

struct StreamId
{
    StreamPurpose purpose;
    std::uint32_t node;
};

/// SplitMix64 finalizer. Used both to derive stream seeds and as a
/// counter-based hash for stateless random processes.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hashCombine(std::uint64_t a, std::uint64_t b) noexcept
{
    return mix64(a ^ mix64(b));
}

/// Maps 64 random bits to [0, 1) using the top 53 bits.
constexpr double unitFromBits(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Standard normal from two 64-bit words (Box-Muller, cosine branch).
double normalFromBits(std::uint64_t a, std::uint64_t b) noexcept;

/// A reproducible random stream keyed by (seed, purpose, node).
///
/// std::mt19937_64 has a fully specified output sequence; the distribution
/// transforms below are hand-written because the std:: distributions are
/// implementation-defined and would break cross-platform replay.
class RandomStream
{
public:
    RandomStream(std::uint64_t seed, StreamId id);

    std::uint64_t nextBits() { return m_engine(); }

    /// Uniform in [lo, hi); returns lo when lo == hi.
    double uniform(double lo, double hi);

    /// Uniform integer in [lo, hi] inclusive.
    std::uint64_t uniformInt(std::uint64_t lo, std::uint64_t hi);

    double normal(double mean, double stddev);

    bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

    std::uint64_t seed() const { return m_seed; }
    StreamId id() const { return m_id; }

private:
    std::uint64_t m_seed;
    StreamId m_id;
    std::mt19937_64 m_engine;
};

std::string_view toString(StreamPurpose purpose);

} // namespace wbbn::sim
