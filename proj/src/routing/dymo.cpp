#include "wbbn/routing/dymo.hpp"

#include <algorithm>
#include <stdexcept>
#include <type_traits>
#include <variant>

namespace wbbn::routing
{

void validate(const DymoParams &params)
{
    if (!(params.routeLifetime > 0.0) || !(params.discoveryTimeout > 0.0))
    {
        throw std::invalid_argument("route lifetime and discovery timeout must be positive");
    }
    if (params.discoveryAttempts < 1 || params.discoveryBuffer < 1)
    {
        throw std::invalid_argument("discovery attempts and buffer must be >= 1");
    }
    if (!(params.helloInterval > 0.0) || !(params.neighborTimeout > 0.0))
    {
        throw std::invalid_argument("hello interval and neighbour timeout must be positive");
    }
    if (params.energyThreshold < 0.0 || params.energyThreshold > 1.0)
    {
        throw std::invalid_argument("energy threshold must be a fraction in [0, 1]");
    }
    if (params.hopLimit < 1)
    {
        throw std::invalid_argument("hop limit must be >= 1");
    }
}

const char *toString(DropCause cause)
{
    switch (cause)
    {
    case DropCause::MacQueueFull: return "mac-queue";
    case DropCause::MacRetryLimit: return "mac-retry";
    case DropCause::NoRoute: return "no-route";
    case DropCause::DiscoveryBufferFull: return "discovery-buffer";
    case DropCause::HopLimit: return "hop-limit";
    }
    return "unknown";
}

bool seqNewer(std::uint16_t candidate, std::uint16_t current)
{
    return static_cast<std::int16_t>(static_cast<std::uint16_t>(candidate - current)) > 0;
}

DymoRouter::DymoRouter(NodeId self, sim::Scheduler &scheduler, LinkLayer &link, DymoParams params, std::uint64_t seed)
    : m_self(self),
      m_scheduler(scheduler),
      m_link(link),
      m_params(params),
      m_rng(seed, {sim::StreamPurpose::Routing, self})
{
    validate(m_params);
}

void DymoRouter::start()
{
    if (!m_params.hellos)
    {
        return;
    }
    const double offset = m_rng.uniform(0.0, m_params.helloInterval);
    m_scheduler.scheduleIn(offset, m_self, sim::EventKind::Timer, [this] { sendHello(); });
}

void DymoRouter::sendHello()
{
    ++m_counters.hellosSent;
    m_link.sendBroadcast(Hello{m_self});
    m_scheduler.scheduleIn(m_params.helloInterval, m_self, sim::EventKind::Timer, [this] { sendHello(); });
}

bool DymoRouter::participates() const
{
    if (!m_up.energyFraction)
    {
        return true;
    }
    return m_up.energyFraction() >= m_params.energyThreshold;
}

std::optional<RouteTableEntry> DymoRouter::route(NodeId dest) const
{
    const auto it = m_routes.find(dest);
    if (it == m_routes.end() || it->second.expiry < m_scheduler.now())
    {
        return std::nullopt;
    }
    return it->second;
}

std::vector<RouteTableEntry> DymoRouter::routes() const
{
    std::vector<RouteTableEntry> out;
    for (const auto &[dest, entry] : m_routes)
    {
        if (entry.expiry >= m_scheduler.now())
        {
            out.push_back(entry);
        }
    }
    return out;
}

std::set<NodeId> DymoRouter::precursors(NodeId dest) const
{
    const auto it = m_precursors.find(dest);
    return it == m_precursors.end() ? std::set<NodeId>{} : it->second;
}

std::set<NodeId> DymoRouter::neighbors() const
{
    std::set<NodeId> out;
    for (const auto &[n, heard] : m_neighbors)
    {
        out.insert(n);
    }
    return out;
}

std::size_t DymoRouter::buffered(NodeId dest) const
{
    const auto it = m_discoveries.find(dest);
    return it == m_discoveries.end() ? 0 : it->second.buffer.size();
}

void DymoRouter::dropPacket(const DataPacket &packet, DropCause cause)
{
    if (m_up.drop)
    {
        m_up.drop(packet, cause);
    }
}

SendResult DymoRouter::sendData(DataPacket packet)
{
    if (packet.destination == m_self)
    {
        if (m_up.deliver)
        {
            m_up.deliver(packet);
        }
        return SendResult::Delivered;
    }
    if (packet.hops >= m_params.hopLimit)
    {
        dropPacket(packet, DropCause::HopLimit);
        return SendResult::Queued;
    }
    if (const auto entry = route(packet.destination))
    {
        forward(std::move(packet), *entry);
        return SendResult::Routed;
    }
    const NodeId dest = packet.destination;
    const bool fresh = !m_discoveries.contains(dest);
    Discovery &discovery = m_discoveries[dest];
    if (discovery.buffer.size() >= m_params.discoveryBuffer)
    {
        DataPacket oldest = std::move(discovery.buffer.front());
        discovery.buffer.pop_front();
        dropPacket(oldest, DropCause::DiscoveryBufferFull);
    }
    discovery.buffer.push_back(std::move(packet));
    if (fresh)
    {
        startDiscovery(dest);
        return SendResult::DiscoveryStarted;
    }
    return SendResult::Queued;
}

void DymoRouter::forward(DataPacket packet, const RouteTableEntry &entry)
{
    m_routes[entry.dest].expiry = m_scheduler.now() + m_params.routeLifetime;
    if (packet.source != m_self)
    {
        ++m_counters.dataForwarded;
    }
    m_link.sendUnicast(entry.nextHop, std::move(packet));
}

void DymoRouter::startDiscovery(NodeId dest)
{
    ++m_counters.discoveriesStarted;
    sendRreq(dest);
}

void DymoRouter::sendRreq(NodeId dest)
{
    Discovery &discovery = m_discoveries[dest];
    ++discovery.attempts;
    ++m_seq;
    m_seenRreq.insert({m_self, m_seq});
    ++m_counters.rreqOriginated;
    m_link.sendBroadcast(Rreq{m_self, dest, m_seq, {m_self}, 0});
    discovery.timer = m_scheduler.scheduleIn(m_params.discoveryTimeout, m_self, sim::EventKind::Timer,
                                             [this, dest] { discoveryTimeout(dest); });
}

void DymoRouter::discoveryTimeout(NodeId dest)
{
    auto it = m_discoveries.find(dest);
    if (it == m_discoveries.end())
    {
        return;
    }
    it->second.timer.reset();
    if (route(dest))
    {
        completeDiscovery(dest);
        return;
    }
    if (it->second.attempts < m_params.discoveryAttempts)
    {
        sendRreq(dest);
        return;
    }
    ++m_counters.discoveriesFailed;
    std::deque<DataPacket> buffer = std::move(it->second.buffer);
    m_discoveries.erase(it);
    for (const auto &packet : buffer)
    {
        dropPacket(packet, DropCause::NoRoute);
    }
    if (m_up.discoveryDone)
    {
        m_up.discoveryDone(dest, false);
    }
}

void DymoRouter::completeDiscovery(NodeId dest)
{
    auto it = m_discoveries.find(dest);
    if (it == m_discoveries.end())
    {
        return;
    }
    if (it->second.timer)
    {
        m_scheduler.cancel(*it->second.timer);
    }
    std::deque<DataPacket> buffer = std::move(it->second.buffer);
    m_discoveries.erase(it);
    for (auto &packet : buffer)
    {
        sendData(std::move(packet));
    }
    if (m_up.discoveryDone)
    {
        m_up.discoveryDone(dest, true);
    }
}

bool DymoRouter::offerRoute(NodeId dest, NodeId nextHop, std::uint32_t hops, std::optional<std::uint16_t> seq)
{
    if (dest == m_self)
    {
        return false;
    }
    const double expiry = m_scheduler.now() + m_params.routeLifetime;
    const RouteTableEntry candidate{dest, nextHop, seq, hops, expiry};
    auto it = m_routes.find(dest);
    if (it == m_routes.end() || it->second.expiry < m_scheduler.now())
    {
        m_routes[dest] = candidate;
        return true;
    }
    RouteTableEntry &current = it->second;
    bool replace = false;
    if (seq && current.seqNo)
    {
        replace = seqNewer(*seq, *current.seqNo) || (*seq == *current.seqNo && hops < current.hopCount);
    }
    else
    {
        replace = hops < current.hopCount;
    }
    if (replace)
    {
        current = candidate;
        return true;
    }
    if (hops == current.hopCount && nextHop == current.nextHop)
    {
        current.expiry = expiry;
        if (seq && (!current.seqNo || seqNewer(*seq, *current.seqNo)))
        {
            current.seqNo = seq;
        }
    }
    return false;
}

void DymoRouter::receive(NodeId from, const NetMessage &msg)
{
    heardFrom(from);
    std::visit(
        [&](const auto &m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DataPacket>)
            {
                handleData(from, m);
            }
            else if constexpr (std::is_same_v<T, Rreq>)
            {
                handleRreq(from, m);
            }
            else if constexpr (std::is_same_v<T, Rrep>)
            {
                handleRrep(from, m);
            }
            else if constexpr (std::is_same_v<T, Rerr>)
            {
                handleRerr(from, m);
            }
        },
        msg);
}

void DymoRouter::handleData(NodeId from, DataPacket packet)
{
    ++packet.hops;
    packet.path.push_back(m_self);
    const NodeId dest = packet.destination;
    if (dest == m_self)
    {
        if (m_up.deliver)
        {
            m_up.deliver(packet);
        }
        return;
    }
    if (packet.hops >= m_params.hopLimit)
    {
        dropPacket(packet, DropCause::HopLimit);
        return;
    }
    if (const auto entry = route(dest))
    {
        m_precursors[dest].insert(from);
        forward(std::move(packet), *entry);
        return;
    }
    // No route at a relay: the upstream hop learns the destination is gone.
    dropPacket(packet, DropCause::NoRoute);
    ++m_counters.rerrSent;
    m_link.sendUnicast(from, Rerr{{dest}, m_self});
}

void DymoRouter::handleRreq(NodeId from, const Rreq &rreq)
{
    ++m_counters.rreqReceived;
    if (rreq.orig == m_self || rreq.path.empty())
    {
        return;
    }
    if (!m_seenRreq.insert({rreq.orig, rreq.origSeq}).second)
    {
        return;
    }
    if (std::find(rreq.path.begin(), rreq.path.end(), m_self) != rreq.path.end())
    {
        return;
    }
    const auto n = static_cast<std::uint32_t>(rreq.path.size());
    for (std::uint32_t i = 0; i < n; ++i)
    {
        const std::optional<std::uint16_t> seq = i == 0 ? std::optional<std::uint16_t>(rreq.origSeq) : std::nullopt;
        offerRoute(rreq.path[i], from, n - i, seq);
    }
    if (rreq.target == m_self)
    {
        ++m_seq;
        Rrep rrep{rreq.orig, m_self, m_seq, rreq.path};
        rrep.path.push_back(m_self);
        ++m_counters.rrepSent;
        m_link.sendUnicast(from, std::move(rrep));
        return;
    }
    if (!participates())
    {
        ++m_counters.rreqSuppressedLowEnergy;
        return;
    }
    if (rreq.hopCount + 1 >= m_params.hopLimit)
    {
        return;
    }
    Rreq next = rreq;
    next.path.push_back(m_self);
    ++next.hopCount;
    ++m_counters.rreqForwarded;
    m_link.sendBroadcast(std::move(next));
}

void DymoRouter::handleRrep(NodeId from, const Rrep &rrep)
{
    ++m_counters.rrepReceived;
    const auto pos = std::find(rrep.path.begin(), rrep.path.end(), m_self);
    if (pos == rrep.path.end())
    {
        return;
    }
    const auto i = static_cast<std::uint32_t>(pos - rrep.path.begin());
    const auto n = static_cast<std::uint32_t>(rrep.path.size());
    for (std::uint32_t j = i + 1; j < n; ++j)
    {
        const std::optional<std::uint16_t> seq = j == n - 1 ? std::optional<std::uint16_t>(rrep.targetSeq) : std::nullopt;
        offerRoute(rrep.path[j], from, j - i, seq);
    }
    if (i == 0)
    {
        if (m_discoveries.contains(rrep.target))
        {
            completeDiscovery(rrep.target);
        }
        return;
    }
    ++m_counters.rrepSent;
    m_link.sendUnicast(rrep.path[i - 1], rrep);
}

void DymoRouter::handleRerr(NodeId from, const Rerr &rerr)
{
    ++m_counters.rerrReceived;
    std::map<NodeId, std::vector<NodeId>> byPrecursor;
    for (NodeId dest : rerr.unreachable)
    {
        auto it = m_routes.find(dest);
        if (it == m_routes.end() || it->second.nextHop != from)
        {
            continue;
        }
        const bool wasValid = it->second.expiry >= m_scheduler.now();
        m_routes.erase(it);
        if (auto pre = m_precursors.find(dest); pre != m_precursors.end())
        {
            if (wasValid)
            {
                for (NodeId p : pre->second)
                {
                    byPrecursor[p].push_back(dest);
                }
            }
            m_precursors.erase(pre);
        }
    }
    sendRerr(byPrecursor);
}

void DymoRouter::handleLinkFailure(NodeId nextHop)
{
    std::map<NodeId, std::vector<NodeId>> byPrecursor;
    const double now = m_scheduler.now();
    for (auto it = m_routes.begin(); it != m_routes.end();)
    {
        if (it->second.nextHop != nextHop)
        {
            ++it;
            continue;
        }
        const NodeId dest = it->first;
        const bool wasValid = it->second.expiry >= now;
        it = m_routes.erase(it);
        if (auto pre = m_precursors.find(dest); pre != m_precursors.end())
        {
            if (wasValid)
            {
                for (NodeId p : pre->second)
                {
                    if (p != nextHop)
                    {
                        byPrecursor[p].push_back(dest);
                    }
                }
            }
            m_precursors.erase(pre);
        }
    }
    sendRerr(byPrecursor);
}

void DymoRouter::sendRerr(const std::map<NodeId, std::vector<NodeId>> &byPrecursor)
{
    for (const auto &[precursor, dests] : byPrecursor)
    {
        ++m_counters.rerrSent;
        m_link.sendUnicast(precursor, Rerr{dests, m_self});
    }
}

void DymoRouter::linkFailed(NodeId nextHop, const NetMessage &msg)
{
    if (const auto *packet = std::get_if<DataPacket>(&msg))
    {
        dropPacket(*packet, DropCause::MacRetryLimit);
    }
    if (nextHop != kBroadcast)
    {
        handleLinkFailure(nextHop);
    }
}

void DymoRouter::linkRejected(const NetMessage &msg)
{
    if (const auto *packet = std::get_if<DataPacket>(&msg))
    {
        dropPacket(*packet, DropCause::MacQueueFull);
    }
}

void DymoRouter::heardFrom(NodeId neighbor)
{
    if (!m_params.hellos)
    {
        return;
    }
    m_neighbors[neighbor] = m_scheduler.now();
    if (m_neighborTimers.insert(neighbor).second)
    {
        m_scheduler.scheduleIn(m_params.neighborTimeout, m_self, sim::EventKind::Timer,
                               [this, neighbor] { neighborCheck(neighbor); });
    }
}

void DymoRouter::neighborCheck(NodeId neighbor)
{
    const auto it = m_neighbors.find(neighbor);
    if (it == m_neighbors.end())
    {
        m_neighborTimers.erase(neighbor);
        return;
    }
    const double silentUntil = it->second + m_params.neighborTimeout;
    if (m_scheduler.now() + 1e-9 >= silentUntil)
    {
        m_neighbors.erase(it);
        m_neighborTimers.erase(neighbor);
        handleLinkFailure(neighbor);
        return;
    }
    m_scheduler.schedule(silentUntil, m_self, sim::EventKind::Timer, [this, neighbor] { neighborCheck(neighbor); });
}

} // namespace wbbn::routing
