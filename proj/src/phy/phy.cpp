#include "wbbn/phy/phy.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <string>

namespace wbbn::phy
{

int bandMhz(Band band)
{
    return band == Band::Mhz900 ? 900 : 2450;
}

Band bandFromMhz(int mhz)
{
    switch (mhz)
    {
    case 900: return Band::Mhz900;
    case 2450: return Band::Mhz2450;
    default: throw PhyError("unsupported frequency " + std::to_string(mhz) + " MHz (expected 900 or 2450)");
    }
}

std::string_view toString(Modulation modulation)
{
    return modulation == Modulation::Dbpsk ? "DBPSK" : "DQPSK";
}

Modulation modulationFromString(std::string_view name)
{
    if (name == "DBPSK" || name == "dbpsk")
    {
        return Modulation::Dbpsk;
    }
    if (name == "DQPSK" || name == "dqpsk")
    {
        return Modulation::Dqpsk;
    }
    throw PhyError("unknown modulation '" + std::string(name) + "' (expected DBPSK or DQPSK)");
}

double dataRateBps(Band band, Modulation modulation)
{
    if (band == Band::Mhz900)
    {
        return modulation == Modulation::Dbpsk ? 101.2e3 : 404.8e3;
    }
    return modulation == Modulation::Dbpsk ? 121.4e3 : 971.4e3;
}

ChannelParams defaultChannelParams(LinkKind kind, Band band)
{
    ChannelParams p;
    p.kind = kind;
    if (kind == LinkKind::OnBody)
    {
        p.pl0Db = 35.2;
        p.d0 = 0.1;
        p.exponent = 3.35;
        p.shadowSigmaDb = 4.9;
    }
    else if (band == Band::Mhz2450)
    {
        p.pl0Db = 48.4;
        p.d0 = 1.0;
        p.exponent = 3.11;
        p.shadowSigmaDb = 6.1;
    }
    else
    {
        p.pl0Db = 38.2;
        p.d0 = 1.0;
        p.exponent = 2.8;
        p.shadowSigmaDb = 5.0;
    }
    return p;
}

void validate(const ChannelParams &params)
{
    if (!(params.exponent > 0.0))
    {
        throw PhyError("pathloss exponent must be > 0");
    }
    if (!(params.shadowSigmaDb >= 0.0))
    {
        throw PhyError("shadowing sigma must be >= 0");
    }
    if (!(params.d0 > 0.0))
    {
        throw PhyError("reference distance d0 must be > 0");
    }
    if (!(params.shadowCoherence > 0.0))
    {
        throw PhyError("shadowing coherence time must be > 0");
    }
}

double thermalNoiseDbm(double bandwidthHz, double noiseFigureDb)
{
    return -174.0 + 10.0 * std::log10(bandwidthHz) + noiseFigureDb;
}

double RadioEnvironment::noiseDbm() const
{
    return thermalNoiseDbm(bandwidthHz, noiseFigureDb);
}

double meanPathlossDb(const ChannelParams &params, double distance)
{
    return params.pl0Db + 10.0 * params.exponent * std::log10(distance / params.d0);
}

double receivedPowerDbm(double txPowerDbm, double pathlossDb)
{
    return txPowerDbm - pathlossDb;
}

LinkBudget sinr(double prxDbm, const double *interferersDbm, std::size_t count, double noiseDbm)
{
    LinkBudget budget;
    budget.prxDbm = prxDbm;
    budget.noiseDbm = noiseDbm;
    for (std::size_t i = 0; i < count; ++i)
    {
        budget.interferenceMw += dbmToMw(interferersDbm[i]);
    }
    budget.sinrDb = mwToDbm(dbmToMw(prxDbm) / (dbmToMw(noiseDbm) + budget.interferenceMw));
    return budget;
}

double bitSnr(double sinrLinear, double bandwidthHz, double bitRateBps)
{
    return sinrLinear * bandwidthHz / bitRateBps;
}

namespace
{

constexpr int kSeriesTerms = 48; // (sqrt2 - 1)^48 < 1e-18
constexpr double kAsymptoticGamma = 100.0;

// e^{-x} I_k(x) for k = 0..kSeriesTerms, by Miller's backward recurrence
// normalised with e^{-x} (I_0 + 2 sum_{k>=1} I_k) = 1.
std::array<double, kSeriesTerms + 1> scaledBesselI(double x)
{
    std::array<double, kSeriesTerms + 1> out{};
    const int start = kSeriesTerms + 30 + static_cast<int>(std::ceil(x + 10.0 * std::sqrt(x)));
    double above = 0.0;
    double current = 1.0e-30;
    double sum = 0.0;
    for (int k = start; k >= 1; --k)
    {
        const double below = above + (2.0 * k / x) * current;
        above = current;
        current = below;
        // `above` now holds f_k, `current` holds f_{k-1}.
        sum += 2.0 * above;
        if (k <= kSeriesTerms)
        {
            out[static_cast<std::size_t>(k)] = above;
        }
        if (current > 1.0e200)
        {
            current *= 1.0e-200;
            above *= 1.0e-200;
            sum *= 1.0e-200;
            for (auto &v : out)
            {
                v *= 1.0e-200;
            }
        }
    }
    out[0] = current;
    sum += current;
    for (auto &v : out)
    {
        v /= sum;
    }
    return out;
}

// sum_{k>=0} r^k e^{-x} I_k(x), with the k = 0 term weighted by w0.
double weightedBesselSeries(double ratio, double x, double w0)
{
    const auto scaled = scaledBesselI(x);
    double total = w0 * scaled[0];
    double power = 1.0;
    for (int k = 1; k <= kSeriesTerms; ++k)
    {
        power *= ratio;
        total += power * scaled[static_cast<std::size_t>(k)];
    }
    return total;
}

} // namespace

double marcumQ1(double a, double b)
{
    if (a < 0.0 || b < 0.0)
    {
        throw PhyError("marcumQ1: arguments must be non-negative");
    }
    if (b == 0.0)
    {
        return 1.0;
    }
    if (a == 0.0)
    {
        return std::exp(-b * b / 2.0);
    }
    if (a < b)
    {
        // Q1 = e^{-(a^2+b^2)/2} sum_k (a/b)^k I_k(ab)
        return std::exp(-(b - a) * (b - a) / 2.0) * weightedBesselSeries(a / b, a * b, 1.0);
    }
    // Q1(a,b) + Q1(b,a) = 1 + e^{-(a^2+b^2)/2} I0(ab)
    const double i0Term = std::exp(-(b - a) * (b - a) / 2.0) * scaledBesselI(a * b)[0];
    if (a == b)
    {
        return 0.5 * (1.0 + i0Term);
    }
    return 1.0 + i0Term - marcumQ1(b, a);
}

double berDbpsk(double gamma)
{
    if (gamma < 0.0)
    {
        throw PhyError("bit SNR must be >= 0");
    }
    return 0.5 * std::exp(-gamma);
}

double berDqpsk(double gamma)
{
    if (gamma < 0.0)
    {
        throw PhyError("bit SNR must be >= 0");
    }
    if (gamma == 0.0)
    {
        return 0.5;
    }
    const double a = std::sqrt(2.0 * gamma * (1.0 - 1.0 / std::numbers::sqrt2));
    const double b = std::sqrt(2.0 * gamma * (1.0 + 1.0 / std::numbers::sqrt2));
    const double envelope = std::exp(-(b - a) * (b - a) / 2.0);
    const double ratio = a / b; // sqrt(2) - 1
    if (gamma > kAsymptoticGamma)
    {
        // e^{-x} I_k(x) -> 1/sqrt(2 pi x) for every fixed k.
        const double tail = 0.5 + ratio / (1.0 - ratio);
        return envelope * tail / std::sqrt(2.0 * std::numbers::pi * a * b);
    }
    // Q1(a,b) - I0(ab) e^{-(a^2+b^2)/2} / 2
    return envelope * weightedBesselSeries(ratio, a * b, 0.5);
}

double ber(Modulation modulation, double gamma)
{
    return modulation == Modulation::Dbpsk ? berDbpsk(gamma) : berDqpsk(gamma);
}

double per(double ber, std::uint64_t bits)
{
    if (ber < 0.0 || ber > 1.0)
    {
        throw PhyError("bit error rate outside [0, 1]");
    }
    if (bits == 0 || ber == 0.0)
    {
        return 0.0;
    }
    if (ber == 1.0)
    {
        return 1.0;
    }
    return -std::expm1(static_cast<double>(bits) * std::log1p(-ber));
}

double airtime(std::uint32_t payloadBytes, double dataRateBps, const FrameFormat &format)
{
    return static_cast<double>(format.frameBits(payloadBytes)) / dataRateBps;
}

double airtime(std::uint32_t payloadBytes, const PhyConfig &cfg, const FrameFormat &format)
{
    return airtime(payloadBytes, cfg.dataRateBps(), format);
}

double packetEnergy(double duration, double currentMa)
{
    if (duration < 0.0 || currentMa < 0.0)
    {
        throw PhyError("packet energy needs non-negative duration and current");
    }
    return duration * EnergyModel::kVoltage * currentMa * 1.0e-3;
}

void EnergyAccount::addTx(double seconds, const EnergyModel &model)
{
    m_tx += packetEnergy(seconds, model.txCurrentMa);
}

void EnergyAccount::addRx(double seconds, const EnergyModel &model)
{
    m_rx += packetEnergy(seconds, model.rxCurrentMa);
}

void EnergyAccount::addIdle(double seconds, const EnergyModel &model)
{
    m_idle += packetEnergy(seconds, model.idleCurrentMa);
}

} // namespace wbbn::phy
