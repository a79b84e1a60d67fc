#include "wbbn/phy/medium.hpp"

#include <algorithm>
#include <stdexcept>

namespace wbbn::phy
{

Medium::Medium(sim::Scheduler &scheduler, RadioEnvironment env, FrameFormat format, PathlossFn pathloss, std::uint64_t seed)
    : m_scheduler(scheduler),
      m_env(env),
      m_format(format),
      m_pathloss(std::move(pathloss)),
      m_seed(seed),
      m_noiseMw(dbmToMw(env.noiseDbm())),
      m_ccaThresholdMw(dbmToMw(env.ccaThresholdDbm)),
      m_sensitivityMw(dbmToMw(env.sensitivityDbm))
{
}

RadioId Medium::attach(const RadioConfig &config, RadioListener *listener)
{
    const auto id = static_cast<RadioId>(m_radios.size());
    Radio radio;
    radio.config = config;
    radio.listener = listener;
    m_radios.push_back(radio);
    m_byChannel[config.channel].push_back(id);
    return id;
}

std::vector<ChannelId> Medium::channelsInUse() const
{
    std::vector<ChannelId> out;
    for (const auto &[channel, radios] : m_byChannel)
    {
        if (!radios.empty())
        {
            out.push_back(channel);
        }
    }
    return out;
}

double Medium::airtime(RadioId radio, std::uint32_t payloadBytes) const
{
    return phy::airtime(payloadBytes, m_radios.at(radio).config.phy, m_format);
}

double Medium::rxSeconds(RadioId radio, double now) const
{
    const Radio &r = m_radios.at(radio);
    return r.rxSeconds + (r.lock ? now - r.lock->since : 0.0);
}

sim::RandomStream &Medium::receptionStream(NodeId node)
{
    auto it = m_rxStreams.find(node);
    if (it == m_rxStreams.end())
    {
        it = m_rxStreams.emplace(node, sim::RandomStream(m_seed, {sim::StreamPurpose::PhyReception, node})).first;
    }
    return it->second;
}

void Medium::endLock(Radio &radio)
{
    radio.rxSeconds += m_scheduler.now() - radio.lock->since;
    radio.lock.reset();
}

void Medium::transmit(RadioId radioId, MacFrame frame)
{
    Radio &sender = m_radios.at(radioId);
    if (sender.transmitting)
    {
        throw std::logic_error("radio is already transmitting");
    }
    const double now = m_scheduler.now();
    if (sender.lock)
    {
        endLock(sender);
        ++m_counters.abortedByTransmit;
    }
    sender.transmitting = true;
    frame.channel = sender.config.channel;
    const double duration = airtime(radioId, frame.payloadBytes);
    const std::uint64_t id = m_nextTransmission++;
    ++m_counters.transmissions;

    Transmission tx{radioId, std::move(frame), now, now + duration, {}};
    const auto &peers = m_byChannel[sender.config.channel];
    tx.arrivals.reserve(peers.size());
    std::vector<RadioId> becameBusy;
    for (RadioId peer : peers)
    {
        if (peer == radioId)
        {
            continue;
        }
        Radio &rx = m_radios[peer];
        const double pl = m_pathloss(sender.config.node, rx.config.node, now);
        const double powerMw = dbmToMw(receivedPowerDbm(sender.config.phy.txPowerDbm, pl));
        tx.arrivals.push_back({peer, powerMw});
        rx.arrivalSumMw += powerMw;
        ++rx.arrivals;
        if (rx.lock)
        {
            rx.lock->maxInterferenceMw = std::max(rx.lock->maxInterferenceMw, rx.arrivalSumMw - rx.lock->signalMw);
        }
        else if (!rx.transmitting && powerMw >= m_sensitivityMw)
        {
            rx.lock = Lock{id, powerMw, rx.arrivalSumMw - powerMw, now};
        }
        if (powerMw >= m_ccaThresholdMw && rx.ccaArrivals++ == 0)
        {
            becameBusy.push_back(peer);
        }
    }
    const double end = tx.end;
    m_active.emplace(id, std::move(tx));
    m_scheduler.schedule(end, sender.config.node, sim::EventKind::FrameEnd, [this, id] { finish(id); });

    for (RadioId peer : becameBusy)
    {
        if (auto *listener = m_radios[peer].listener)
        {
            listener->onChannelBusy(true);
        }
    }
}

void Medium::finish(std::uint64_t id)
{
    auto node = m_active.extract(id);
    Transmission &tx = node.mapped();
    Radio &sender = m_radios[tx.sender];
    sender.transmitting = false;
    sender.txSeconds += tx.end - tx.start;

    std::vector<RadioId> delivered;
    std::vector<RadioId> becameIdle;
    const double bitRate = sender.config.phy.dataRateBps();
    const std::uint64_t bits = m_format.frameBits(tx.frame.payloadBytes);

    for (const Arrival &arrival : tx.arrivals)
    {
        Radio &rx = m_radios[arrival.radio];
        if (--rx.arrivals == 0)
        {
            rx.arrivalSumMw = 0.0;
        }
        else
        {
            rx.arrivalSumMw = std::max(0.0, rx.arrivalSumMw - arrival.powerMw);
        }
        if (arrival.powerMw >= m_ccaThresholdMw && --rx.ccaArrivals == 0)
        {
            becameIdle.push_back(arrival.radio);
        }
        if (!rx.lock || rx.lock->transmission != id)
        {
            continue;
        }
        const Lock lock = *rx.lock;
        endLock(rx);
        const bool addressed = tx.frame.isBroadcast() || tx.frame.dst == rx.config.node;
        if (!addressed)
        {
            continue;
        }
        ++m_counters.receptionTrials;
        const double sinrLinear = lock.signalMw / (m_noiseMw + lock.maxInterferenceMw);
        const double gamma = bitSnr(sinrLinear, m_env.bandwidthHz, bitRate);
        const double errorRate = per(ber(rx.config.phy.modulation, gamma), bits);
        if (receptionStream(rx.config.node).uniform(0.0, 1.0) < 1.0 - errorRate)
        {
            delivered.push_back(arrival.radio);
        }
        else
        {
            ++m_counters.receptionFailures;
        }
    }

    if (sender.listener != nullptr)
    {
        sender.listener->onTransmitComplete();
    }
    for (RadioId r : delivered)
    {
        if (auto *listener = m_radios[r].listener)
        {
            listener->onFrameReceived(tx.frame);
        }
    }
    for (RadioId r : becameIdle)
    {
        // A listener may have started a transmission meanwhile; CCA state is
        // still reported since arrivals are independent of own transmission.
        if (m_radios[r].ccaArrivals == 0)
        {
            if (auto *listener = m_radios[r].listener)
            {
                listener->onChannelBusy(false);
            }
        }
    }
}

} // namespace wbbn::phy
