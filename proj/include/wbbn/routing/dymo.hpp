#pragma once

#include "wbbn/net/packets.hpp"
#include "wbbn/sim/random.hpp"
#include "wbbn/sim/scheduler.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace wbbn::routing
{

/// Link-layer service the router runs on: the CSMA MAC in a full run, or an
/// idealised fixed-delay link in protocol harnesses.
class LinkLayer
{
public:
    virtual ~LinkLayer() = default;
    virtual void sendBroadcast(NetMessage msg) = 0;
    virtual void sendUnicast(NodeId nextHop, NetMessage msg) = 0;
};

struct DymoParams
{
    double routeLifetime = 10.0;
    int discoveryAttempts = 3;
    double discoveryTimeout = 2.0;
    std::size_t discoveryBuffer = 10; // packets per destination
    double helloInterval = 3.0;
    double neighborTimeout = 9.0;
    bool hellos = true;
    double energyThreshold = 0.05; // fraction below which RREQs are not forwarded
    std::uint32_t hopLimit = 32;
};

void validate(const DymoParams &params);

struct RouteTableEntry
{
    NodeId dest = kNoNode;
    NodeId nextHop = kNoNode;
    std::optional<std::uint16_t> seqNo;
    std::uint32_t hopCount = 1;
    double expiry = 0.0;
};

struct RoutingCounters
{
    std::uint64_t rreqOriginated = 0;
    std::uint64_t rreqForwarded = 0;
    std::uint64_t rreqReceived = 0;
    std::uint64_t rrepSent = 0;
    std::uint64_t rrepReceived = 0;
    std::uint64_t rerrSent = 0;
    std::uint64_t rerrReceived = 0;
    std::uint64_t hellosSent = 0;
    std::uint64_t discoveriesStarted = 0;
    std::uint64_t discoveriesFailed = 0;
    std::uint64_t dataForwarded = 0;
    std::uint64_t rreqSuppressedLowEnergy = 0;
};

enum class DropCause : std::uint8_t
{
    MacQueueFull,
    MacRetryLimit,
    NoRoute,
    DiscoveryBufferFull,
    HopLimit,
};

const char *toString(DropCause cause);

enum class SendResult : std::uint8_t
{
    Routed,
    DiscoveryStarted,
    Queued,
    Delivered,
};

/// Newer-than under 16-bit wraparound.
bool seqNewer(std::uint16_t candidate, std::uint16_t current);

/// Reactive AODVv2/DYMO routing for one node.
///
/// Route requests accumulate the forwarding path; every receiver learns
/// routes to every node on that path. Only the target answers, with a route
/// reply sent hop by hop back along the reversed path. Link breaks invalidate
/// routes and send a route error only to precursors that forwarded data
/// through the broken link.
class DymoRouter
{
public:
    struct Upcalls
    {
        std::function<void(const DataPacket &)> deliver;
        std::function<void(const DataPacket &, DropCause)> drop;
        /// Remaining battery fraction in [0, 1].
        std::function<double()> energyFraction;
        /// A discovery ended, with or without a route; its buffer is empty.
        std::function<void(NodeId dest, bool found)> discoveryDone;
    };

    DymoRouter(NodeId self, sim::Scheduler &scheduler, LinkLayer &link, DymoParams params, std::uint64_t seed);
    DymoRouter(const DymoRouter &) = delete;
    DymoRouter &operator=(const DymoRouter &) = delete;

    void setUpcalls(Upcalls upcalls) { m_up = std::move(upcalls); }

    /// Starts periodic neighbour probes (first one at a random offset).
    void start();

    /// Originate or relay a data packet toward packet.destination.
    SendResult sendData(DataPacket packet);

    /// Message received from neighbour `from` through the link layer.
    void receive(NodeId from, const NetMessage &msg);

    /// The link layer gave up delivering `msg` to `nextHop`.
    void linkFailed(NodeId nextHop, const NetMessage &msg);

    /// The link layer refused `msg` (queue full).
    void linkRejected(const NetMessage &msg);

    /// `neighbor` acknowledged a unicast; counts as hearing from it.
    void linkConfirmed(NodeId neighbor) { heardFrom(neighbor); }

    /// Invalidates routes through `nextHop` and notifies precursors.
    void handleLinkFailure(NodeId nextHop);

    /// Valid (unexpired) route to dest.
    std::optional<RouteTableEntry> route(NodeId dest) const;
    std::vector<RouteTableEntry> routes() const;
    std::set<NodeId> precursors(NodeId dest) const;
    std::set<NodeId> neighbors() const;
    bool participates() const;
    bool discovering(NodeId dest) const { return m_discoveries.contains(dest); }
    std::size_t buffered(NodeId dest) const;

    NodeId self() const { return m_self; }
    std::uint16_t sequenceNumber() const { return m_seq; }
    const RoutingCounters &counters() const { return m_counters; }
    const DymoParams &params() const { return m_params; }

private:
    struct Discovery
    {
        int attempts = 0;
        std::deque<DataPacket> buffer;
        std::optional<sim::EventId> timer;
    };

    void forward(DataPacket packet, const RouteTableEntry &entry);
    void startDiscovery(NodeId dest);
    void sendRreq(NodeId dest);
    void discoveryTimeout(NodeId dest);
    void completeDiscovery(NodeId dest);
    void handleRreq(NodeId from, const Rreq &rreq);
    void handleRrep(NodeId from, const Rrep &rrep);
    void handleRerr(NodeId from, const Rerr &rerr);
    void handleData(NodeId from, DataPacket packet);
    void heardFrom(NodeId neighbor);
    void neighborCheck(NodeId neighbor);
    void sendHello();
    bool offerRoute(NodeId dest, NodeId nextHop, std::uint32_t hops, std::optional<std::uint16_t> seq);
    void sendRerr(const std::map<NodeId, std::vector<NodeId>> &byPrecursor);
    void dropPacket(const DataPacket &packet, DropCause cause);

    NodeId m_self;
    sim::Scheduler &m_scheduler;
    LinkLayer &m_link;
    DymoParams m_params;
    sim::RandomStream m_rng;
    Upcalls m_up;

    std::uint16_t m_seq = 0;
    std::map<NodeId, RouteTableEntry> m_routes;
    std::map<NodeId, std::set<NodeId>> m_precursors;
    std::set<std::pair<NodeId, std::uint16_t>> m_seenRreq;
    std::map<NodeId, Discovery> m_discoveries;
    std::map<NodeId, double> m_neighbors; // last heard
    std::set<NodeId> m_neighborTimers;
    RoutingCounters m_counters;
};

} // namespace wbbn::routing
