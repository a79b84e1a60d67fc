#include "wbbn/sim/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wbbn::sim
{

double normalFromBits(std::uint64_t a, std::uint64_t b) noexcept
{
    // 1 - u keeps the logarithm argument in (0, 1].
    const double u1 = 1.0 - unitFromBits(a);
    const double u2 = unitFromBits(b);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RandomStream::RandomStream(std::uint64_t seed, StreamId id)
    : m_seed(seed),
      m_id(id),
      m_engine(hashCombine(hashCombine(seed, static_cast<std::uint64_t>(id.purpose)), id.node))
{
}

double RandomStream::uniform(double lo, double hi)
{
    if (lo > hi)
    {
        throw std::invalid_argument("RandomStream::uniform: lo > hi");
    }
    if (lo == hi)
    {
        return lo;
    }
    const double value = lo + (hi - lo) * unitFromBits(m_engine());
    // Rounding can land exactly on hi for wide ranges.
    return value < hi ? value : std::nextafter(hi, lo);
}

std::uint64_t RandomStream::uniformInt(std::uint64_t lo, std::uint64_t hi)
{
    if (lo > hi)
    {
        throw std::invalid_argument("RandomStream::uniformInt: lo > hi");
    }
    const std::uint64_t span = hi - lo;
    if (span == ~std::uint64_t{0})
    {
        return m_engine();
    }
    const std::uint64_t range = span + 1;
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
    std::uint64_t bits = m_engine();
    while (bits >= limit)
    {
        bits = m_engine();
    }
    return lo + bits % range;
}

double RandomStream::normal(double mean, double stddev)
{
    const std::uint64_t a = m_engine();
    const std::uint64_t b = m_engine();
    return mean + stddev * normalFromBits(a, b);
}

std::string_view toString(StreamPurpose purpose)
{
    switch (purpose)
    {
    case StreamPurpose::Mobility: return "mobility";
    case StreamPurpose::Shadowing: return "shadowing";
    case StreamPurpose::PhyReception: return "phy-rx";
    case StreamPurpose::MacBackoff: return "mac-backoff";
    case StreamPurpose::Routing: return "routing";
    case StreamPurpose::Traffic: return "traffic";
    case StreamPurpose::Test: return "test";
    }
    return "unknown";
}

} // namespace wbbn::sim
