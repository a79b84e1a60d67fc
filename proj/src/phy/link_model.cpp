#include "wbbn/phy/link_model.hpp"

#include "wbbn/sim/random.hpp"

#include <cmath>

namespace wbbn::phy
{

double ShadowingProcess::standardSample(std::uint32_t from, std::uint32_t to, std::int64_t interval) const
{
    using sim::hashCombine;
    const std::uint64_t link = (static_cast<std::uint64_t>(from) << 32) | to;
    const std::uint64_t key = hashCombine(hashCombine(hashCombine(m_seed, 0x5348'4144'4f57ULL), link),
                                          static_cast<std::uint64_t>(interval));
    return sim::normalFromBits(sim::mix64(key), sim::mix64(key ^ 0xa5a5'a5a5'a5a5'a5a5ULL));
}

double ShadowingProcess::sampleDb(const ChannelParams &params, std::uint32_t from, std::uint32_t to, double t) const
{
    if (params.shadowSigmaDb == 0.0)
    {
        return 0.0;
    }
    const auto interval = static_cast<std::int64_t>(std::floor(t / params.shadowCoherence));
    return params.shadowSigmaDb * standardSample(from, to, interval);
}

LinkModel::LinkModel(ChannelParams onBody, ChannelParams bodyToBody, std::uint64_t seed, bool shadowing)
    : m_onBody(onBody), m_bodyToBody(bodyToBody), m_process(seed), m_shadowing(shadowing)
{
    validate(m_onBody);
    validate(m_bodyToBody);
}

double LinkModel::pathlossDb(LinkKind kind, double distance, std::uint32_t from, std::uint32_t to, double t) const
{
    const ChannelParams &p = params(kind);
    if (!(distance > 0.0))
    {
        distance = p.d0 / 10.0;
        ++m_clamped;
    }
    double pl = meanPathlossDb(p, distance);
    if (m_shadowing)
    {
        pl += m_process.sampleDb(p, from, to, t);
    }
    return pl;
}

} // namespace wbbn::phy
