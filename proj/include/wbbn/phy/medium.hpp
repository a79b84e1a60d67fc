#pragma once

#include "wbbn/net/packets.hpp"
#include "wbbn/phy/phy.hpp"
#include "wbbn/sim/random.hpp"
#include "wbbn/sim/scheduler.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace wbbn::phy
{

using RadioId = std::uint32_t;

/// Upcalls from the medium into whatever drives a radio (the MAC).
class RadioListener
{
public:
    virtual ~RadioListener() = default;
    /// Energy-detect CCA transitions (busy when any arrival >= threshold).
    virtual void onChannelBusy(bool busy) = 0;
    /// A frame addressed to this radio (or broadcast) passed the reception trial.
    virtual void onFrameReceived(const MacFrame &frame) = 0;
    virtual void onTransmitComplete() = 0;
};

struct RadioConfig
{
    NodeId node = kNoNode;
    ChannelId channel = 0;
    PhyConfig phy;
};

/// Pathloss in dB from node `from` to node `to` at time t.
using PathlossFn = std::function<double(NodeId from, NodeId to, double t)>;

struct MediumCounters
{
    std::uint64_t transmissions = 0;
    std::uint64_t receptionTrials = 0;
    std::uint64_t receptionFailures = 0;
    std::uint64_t abortedByTransmit = 0;
};

/// Shared wireless medium for every radio of one run.
///
/// Each transmission adds its received power at every same-channel radio for
/// the frame's air interval. A radio locks onto the first frame above
/// sensitivity while idle; the frame succeeds with probability 1 - PER where
/// PER uses the lowest SINR seen during the frame. Distinct channel ids never
/// interfere.
class Medium
{
public:
    Medium(sim::Scheduler &scheduler, RadioEnvironment env, FrameFormat format, PathlossFn pathloss, std::uint64_t seed);
    Medium(const Medium &) = delete;
    Medium &operator=(const Medium &) = delete;

    RadioId attach(const RadioConfig &config, RadioListener *listener);

    /// Starts sending `frame` now. Aborts any reception in progress at the
    /// sender. Throws std::logic_error if the radio is already transmitting.
    void transmit(RadioId radio, MacFrame frame);

    bool isTransmitting(RadioId radio) const { return m_radios.at(radio).transmitting; }
    bool isChannelBusy(RadioId radio) const { return m_radios.at(radio).ccaArrivals > 0; }
    bool isReceiving(RadioId radio) const { return m_radios.at(radio).lock.has_value(); }

    double airtime(RadioId radio, std::uint32_t payloadBytes) const;
    const RadioConfig &config(RadioId radio) const { return m_radios.at(radio).config; }
    const RadioEnvironment &environment() const { return m_env; }
    std::size_t radioCount() const { return m_radios.size(); }

    /// Channels with at least one attached radio.
    std::vector<ChannelId> channelsInUse() const;

    /// Seconds spent transmitting / locked on frames, up to `now`.
    double txSeconds(RadioId radio) const { return m_radios.at(radio).txSeconds; }
    double rxSeconds(RadioId radio, double now) const;

    /// Current interference-plus-signal power at a radio (mW), for tests.
    double arrivalPowerMw(RadioId radio) const { return m_radios.at(radio).arrivalSumMw; }

    const MediumCounters &counters() const { return m_counters; }

private:
    struct Lock
    {
        std::uint64_t transmission;
        double signalMw;
        double maxInterferenceMw;
        double since;
    };

    struct Radio
    {
        RadioConfig config;
        RadioListener *listener = nullptr;
        bool transmitting = false;
        double arrivalSumMw = 0.0;
        int arrivals = 0;
        int ccaArrivals = 0;
        std::optional<Lock> lock;
        double txSeconds = 0.0;
        double rxSeconds = 0.0;
    };

    struct Arrival
    {
        RadioId radio;
        double powerMw;
    };

    struct Transmission
    {
        RadioId sender;
        MacFrame frame;
        double start;
        double end;
        std::vector<Arrival> arrivals;
    };

    void finish(std::uint64_t id);
    void endLock(Radio &radio);
    sim::RandomStream &receptionStream(NodeId node);

    sim::Scheduler &m_scheduler;
    RadioEnvironment m_env;
    FrameFormat m_format;
    PathlossFn m_pathloss;
    std::uint64_t m_seed;
    double m_noiseMw;
    double m_ccaThresholdMw;
    double m_sensitivityMw;
    std::vector<Radio> m_radios;
    std::map<ChannelId, std::vector<RadioId>> m_byChannel;
    std::unordered_map<std::uint64_t, Transmission> m_active;
    std::map<NodeId, sim::RandomStream> m_rxStreams;
    std::uint64_t m_nextTransmission = 0;
    MediumCounters m_counters;
};

} // namespace wbbn::phy
