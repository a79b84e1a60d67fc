#pragma once

#include "wbbn/net/packets.hpp"
#include "wbbn/phy/medium.hpp"
#include "wbbn/sim/random.hpp"
#include "wbbn/sim/scheduler.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>

namespace wbbn::mac
{

struct MacParams
{
    int cwMin = 16;
    int cwMax = 64;
    double slot = 145e-6;
    double sifs = 75e-6;
    int maxRetries = 7;
    std::size_t queueCapacity = 50;
    std::size_t duplicateWindow = 16;
};

void validate(const MacParams &params);

/// Contention window after `failures` consecutive failures: doubles on every
/// even-numbered failure, clamped to [cwMin, cwMax].
int contentionWindow(int failures, int cwMin, int cwMax);

struct CsmaState
{
    int cw = 16;
    int backoff = 0;
    int retries = 0;
    int cwMin = 16;
    int cwMax = 64;
    int failCount = 0;
};

struct MacCounters
{
    std::uint64_t txAttempts = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t dropsQueue = 0;
    std::uint64_t dropsRetry = 0;
    std::uint64_t acksSent = 0;
    std::uint64_t acksReceived = 0;
    std::uint64_t deliveredUp = 0;
    std::uint64_t duplicates = 0;
};

enum class SendOutcome : std::uint8_t
{
    Success,
    RetryLimit,
};

/// CSMA/CA with immediate acknowledgement on one radio.
///
/// Backoff counts down whole idle slots and freezes while energy-detect CCA
/// reports busy. Unicast frames wait for an ACK after SIFS; broadcasts are
/// sent once and never acknowledged.
class CsmaMac final : public phy::RadioListener
{
public:
    struct Upcalls
    {
        /// Frame for this node (fresh unicast or broadcast).
        std::function<void(const MacFrame &)> deliver;
        /// Unicast gave up after maxRetries retransmissions.
        std::function<void(NodeId dst, const NetMessage &)> linkFailure;
        /// Queue full; message never entered the MAC.
        std::function<void(const NetMessage &)> queueDrop;
        /// Unicast acknowledged or broadcast sent.
        std::function<void(NodeId dst, const NetMessage &)> sent;
    };

    CsmaMac(sim::Scheduler &scheduler, phy::Medium &medium, const phy::RadioConfig &radio, MacParams params,
            std::uint64_t seed);
    CsmaMac(const CsmaMac &) = delete;
    CsmaMac &operator=(const CsmaMac &) = delete;

    void setUpcalls(Upcalls upcalls) { m_up = std::move(upcalls); }

    /// Queues a message for `dst` (or kBroadcast). Returns false and counts a
    /// queue drop when the FIFO is full.
    bool enqueue(NodeId dst, NetMessage msg);

    NodeId node() const { return m_node; }
    phy::RadioId radio() const { return m_radio; }
    ChannelId channel() const { return m_medium.config(m_radio).channel; }
    std::size_t queueLength() const { return m_queue.size(); }
    const CsmaState &state() const { return m_state; }
    const MacCounters &counters() const { return m_counters; }
    const MacParams &params() const { return m_params; }
    double ackTimeout() const;

    // RadioListener
    void onChannelBusy(bool busy) override;
    void onFrameReceived(const MacFrame &frame) override;
    void onTransmitComplete() override;

private:
    enum class Phase : std::uint8_t
    {
        Idle,
        Backoff,
        Transmitting,
        WaitAck,
    };

    struct Pending
    {
        NodeId dst;
        NetMessage msg;
        std::uint8_t seq;
    };

    void startContention();
    void resumeCountdown();
    void freezeCountdown();
    void backoffExpired();
    void transmitHead();
    void ackTimeoutExpired();
    void finishHead(SendOutcome outcome);
    void sendAck(NodeId to, std::uint8_t seq);
    bool isDuplicate(NodeId src, std::uint8_t seq);
    std::uint8_t nextSeq(NodeId dst);

    sim::Scheduler &m_scheduler;
    phy::Medium &m_medium;
    phy::RadioId m_radio;
    NodeId m_node;
    MacParams m_params;
    sim::RandomStream m_rng;
    Upcalls m_up;

    std::deque<Pending> m_queue;
    CsmaState m_state;
    Phase m_phase = Phase::Idle;
    bool m_counting = false;
    double m_countStart = 0.0;
    std::optional<sim::EventId> m_backoffEvent;
    std::optional<sim::EventId> m_ackEvent;
    bool m_sendingAck = false;

    std::map<NodeId, std::uint8_t> m_txSeq;
    std::map<NodeId, std::deque<std::uint8_t>> m_seen;
    MacCounters m_counters;
};

} // namespace wbbn::mac
