#pragma once

#include <cmath>
#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <string_view>

namespace wbbn::phy
{

enum class Band : std::uint8_t
{
    Mhz900,
    Mhz2450,
};

enum class Modulation : std::uint8_t
{
    Dbpsk,
    Dqpsk,
};

int bandMhz(Band band);
Band bandFromMhz(int mhz);
std::string_view toString(Modulation modulation);
Modulation modulationFromString(std::string_view name);

class PhyError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Narrow-band data rate in bit/s for a (band, modulation) pair.
double dataRateBps(Band band, Modulation modulation);

struct PhyConfig
{
    Band band = Band::Mhz2450;
    Modulation modulation = Modulation::Dqpsk;
    double txPowerDbm = 0.0;

    double dataRateBps() const { return phy::dataRateBps(band, modulation); }
};

enum class LinkKind : std::uint8_t
{
    OnBody,
    BodyToBody,
};

struct ChannelParams
{
    LinkKind kind = LinkKind::BodyToBody;
    double pl0Db = 48.4;
    double d0 = 1.0;
    double exponent = 3.11;
    double shadowSigmaDb = 6.1;
    double shadowCoherence = 1.0; // seconds
};

ChannelParams defaultChannelParams(LinkKind kind, Band band);
void validate(const ChannelParams &params);

/// Receiver-side constants shared by every radio in a run.
struct RadioEnvironment
{
    double bandwidthHz = 1.0e6;
    double noiseFigureDb = 10.0;
    double ccaThresholdDbm = -85.0;
    double sensitivityDbm = -100.0;

    double noiseDbm() const;
};

double thermalNoiseDbm(double bandwidthHz, double noiseFigureDb);

/// Log-distance mean pathloss, without shadowing. Distance must be > 0.
double meanPathlossDb(const ChannelParams &params, double distance);

double receivedPowerDbm(double txPowerDbm, double pathlossDb);

struct LinkBudget
{
    double prxDbm = 0.0;
    double noiseDbm = 0.0;
    double interferenceMw = 0.0;
    double sinrDb = 0.0;
};

/// SINR over concurrent same-channel interferers (all in dBm).
LinkBudget sinr(double prxDbm, const double *interferersDbm, std::size_t count, double noiseDbm);

template <typename Range>
LinkBudget sinr(double prxDbm, const Range &interferersDbm, double noiseDbm)
{
    return sinr(prxDbm, std::data(interferersDbm), std::size(interferersDbm), noiseDbm);
}

/// Per-bit SNR seen by the demodulator: SINR scaled by bandwidth / bit rate.
double bitSnr(double sinrLinear, double bandwidthHz, double bitRateBps);

/// Marcum Q-function of order one, Q1(a, b), a >= 0, b >= 0.
double marcumQ1(double a, double b);

double berDbpsk(double gamma);
double berDqpsk(double gamma);
/// Bit error probability for per-bit SNR gamma (linear). Throws on gamma < 0.
double ber(Modulation modulation, double gamma);

/// Packet error rate under independent bit errors.
double per(double ber, std::uint64_t bits);

/// Narrow-band frame layout. Preamble and PHY header are sent at the payload
/// rate; the defaults add up to 193 overhead bits.
struct FrameFormat
{
    std::uint32_t preambleBits = 90;
    std::uint32_t phyHeaderBits = 31;
    std::uint32_t macHeaderBytes = 7;
    std::uint32_t fcsBytes = 2;

    std::uint64_t overheadBits() const { return preambleBits + phyHeaderBits + 8ull * (macHeaderBytes + fcsBytes); }
    std::uint64_t frameBits(std::uint32_t payloadBytes) const { return overheadBits() + 8ull * payloadBytes; }
};

double airtime(std::uint32_t payloadBytes, double dataRateBps, const FrameFormat &format = {});
double airtime(std::uint32_t payloadBytes, const PhyConfig &cfg, const FrameFormat &format = {});

/// CC2420-class currents at 0 dBm; energy per interval is duration x 3 V x I.
struct EnergyModel
{
    static constexpr double kVoltage = 3.0;
    double txCurrentMa = 17.4;
    double rxCurrentMa = 18.8;
    double idleCurrentMa = 0.426;
    double batteryJoules = 2430.0; // 225 mAh at 3 V
};

/// duration [s] x 3 V x current [mA] -> joules.
double packetEnergy(double duration, double currentMa);

/// Per-node energy, split by radio state. Adds never decrease a total.
class EnergyAccount
{
public:
    void addTx(double seconds, const EnergyModel &model);
    void addRx(double seconds, const EnergyModel &model);
    void addIdle(double seconds, const EnergyModel &model);

    double txJoules() const { return m_tx; }
    double rxJoules() const { return m_rx; }
    double idleJoules() const { return m_idle; }
    double totalJoules() const { return m_tx + m_rx + m_idle; }

private:
    double m_tx = 0.0;
    double m_rx = 0.0;
    double m_idle = 0.0;
};

inline double dbmToMw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

inline double mwToDbm(double mw)
{
    return 10.0 * std::log10(mw);
}

} // namespace wbbn::phy
