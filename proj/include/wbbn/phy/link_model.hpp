#pragma once

#include "wbbn/phy/phy.hpp"

#include <cstdint>

namespace wbbn::phy
{

/// Zero-mean Gaussian shadowing in dB, piecewise constant over the coherence
/// time, independent per directed link. Samples are a pure function of
/// (seed, from, to, interval index), so the process needs no stored state and
/// is unaffected by the order in which links are queried.
class ShadowingProcess
{
public:
    explicit ShadowingProcess(std::uint64_t seed) : m_seed(seed) {}

    double sampleDb(const ChannelParams &params, std::uint32_t from, std::uint32_t to, double t) const;

    /// Unit-variance value for a given coherence interval index.
    double standardSample(std::uint32_t from, std::uint32_t to, std::int64_t interval) const;

private:
    std::uint64_t m_seed;
};

/// Pathloss for one band: on-body parameters for nodes on the same body,
/// body-to-body parameters otherwise.
class LinkModel
{
public:
    LinkModel(ChannelParams onBody, ChannelParams bodyToBody, std::uint64_t seed, bool shadowing = true);

    const ChannelParams &params(LinkKind kind) const { return kind == LinkKind::OnBody ? m_onBody : m_bodyToBody; }

    /// PL = pl0 + 10 n log10(d / d0) + S(t). A zero distance is clamped to
    /// d0 / 10 and counted.
    double pathlossDb(LinkKind kind, double distance, std::uint32_t from, std::uint32_t to, double t) const;

    std::uint64_t clampedDistances() const { return m_clamped; }
    bool shadowingEnabled() const { return m_shadowing; }

private:
    ChannelParams m_onBody;
    ChannelParams m_bodyToBody;
    ShadowingProcess m_process;
    bool m_shadowing;
    mutable std::uint64_t m_clamped = 0;
};

} // namespace wbbn::phy
