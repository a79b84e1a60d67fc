#include "wbbn/dissemination/network.hpp"

#include "wbbn/phy/link_model.hpp"

#include <cmath>
#include <deque>
#include <iomanip>
#include <memory>
#include <ostream>

namespace wbbn::dissemination
{
namespace
{

class MacLink final : public routing::LinkLayer
{
public:
    explicit MacLink(mac::CsmaMac &mac) : m_mac(mac) {}

    void sendBroadcast(NetMessage msg) override { m_mac.enqueue(kBroadcast, std::move(msg)); }
    void sendUnicast(NodeId nextHop, NetMessage msg) override { m_mac.enqueue(nextHop, std::move(msg)); }

private:
    mac::CsmaMac &m_mac;
};

struct NodeRuntime
{
    NodeSpec spec;
    std::vector<std::unique_ptr<mac::CsmaMac>> macs; // parallel to spec.interfaces
    std::unique_ptr<MacLink> link;
    std::unique_ptr<routing::DymoRouter> router;
    std::deque<DataPacket> relay; // clustered coordinators: intra -> inter store-and-forward
    double trafficOffset = 0.0;
};

void accumulate(mac::MacCounters &sum, const mac::MacCounters &c)
{
    sum.txAttempts += c.txAttempts;
    sum.retransmissions += c.retransmissions;
    sum.dropsQueue += c.dropsQueue;
    sum.dropsRetry += c.dropsRetry;
    sum.acksSent += c.acksSent;
    sum.acksReceived += c.acksReceived;
    sum.deliveredUp += c.deliveredUp;
    sum.duplicates += c.duplicates;
}

void accumulate(routing::RoutingCounters &sum, const routing::RoutingCounters &c)
{
    sum.rreqOriginated += c.rreqOriginated;
    sum.rreqForwarded += c.rreqForwarded;
    sum.rreqReceived += c.rreqReceived;
    sum.rrepSent += c.rrepSent;
    sum.rrepReceived += c.rrepReceived;
    sum.rerrSent += c.rerrSent;
    sum.rerrReceived += c.rerrReceived;
    sum.hellosSent += c.hellosSent;
    sum.discoveriesStarted += c.discoveriesStarted;
    sum.discoveriesFailed += c.discoveriesFailed;
    sum.dataForwarded += c.dataForwarded;
    sum.rreqSuppressedLowEnergy += c.rreqSuppressedLowEnergy;
}

class Run
{
public:
    Run(const NetworkConfig &config, const TraceSinks &traces);
    RunResult execute();

private:
    void buildNode(const NodeSpec &spec);
    void scheduleGeneration(NodeId node, std::uint64_t index);
    void generate(NodeId node);
    void coordinatorIntake(NodeRuntime &node, DataPacket packet);
    void relay(NodeRuntime &node, DataPacket packet);
    void pumpRelay(NodeRuntime &node);
    void recordDelivery(const DataPacket &packet);
    void recordDrop(const NetMessage &msg, const char *cause);
    void recordDrop(const DataPacket &packet, const char *cause);
    void mobilityStep(std::uint64_t index);
    void routeSnapshot();
    double consumedJoules(const NodeRuntime &node) const;
    metrics::NodeEnergy finalEnergy(const NodeRuntime &node) const;

    const NetworkConfig &m_config;
    const TraceSinks &m_traces;
    std::uint64_t m_snapshots = 0; // trace-only events, left out of the event count
    NetworkPlan m_plan;
    sim::Scheduler m_scheduler;
    mobility::GroupMobility m_mobility;
    phy::LinkModel m_linkModel;
    phy::Medium m_medium;
    std::vector<std::unique_ptr<NodeRuntime>> m_nodes;
    std::vector<metrics::PacketRecord> m_packets;
    std::map<std::pair<NodeId, NodeId>, std::uint64_t> m_edgeUse;
    std::uint64_t m_trajectoryEvery = 0;
};

Run::Run(const NetworkConfig &config, const TraceSinks &traces)
    : m_config(config),
      m_traces(traces),
      m_plan(planNetwork(config.strategy, config.layout.groups * config.layout.membersPerGroup, config.leaderBody,
                         config.coordinatorSlot)),
      m_mobility(config.layout, config.seed),
      m_linkModel(config.onBody, config.bodyToBody, config.seed, config.shadowing),
      m_medium(m_scheduler, config.radio, config.frame,
               [this](NodeId from, NodeId to, double t) {
                   const bool sameBody = from / mobility::kSlotsPerBody == to / mobility::kSlotsPerBody;
                   const double d =
                       m_mobility.nodeDistance(static_cast<int>(from), static_cast<int>(to), t);
                   return m_linkModel.pathlossDb(sameBody ? phy::LinkKind::OnBody : phy::LinkKind::BodyToBody, d,
                                                 from, to, t);
               },
               config.seed)
{
    validate(config);
    for (const auto &spec : m_plan.nodes)
    {
        buildNode(spec);
    }
}

void Run::buildNode(const NodeSpec &spec)
{
    auto node = std::make_unique<NodeRuntime>();
    node->spec = spec;
    NodeRuntime &ref = *node;
    for (const auto &iface : spec.interfaces)
    {
        auto mac = std::make_unique<mac::CsmaMac>(m_scheduler, m_medium,
                                                  phy::RadioConfig{spec.id, iface.channel, m_config.phy},
                                                  m_config.mac, m_config.seed);
        mac::CsmaMac &macRef = *mac;
        if (iface.routed)
        {
            ref.link = std::make_unique<MacLink>(macRef);
            ref.router = std::make_unique<routing::DymoRouter>(spec.id, m_scheduler, *ref.link, m_config.routing,
                                                               m_config.seed);
            routing::DymoRouter &router = *ref.router;
            macRef.setUpcalls({
                [&router](const MacFrame &frame) { router.receive(frame.src, frame.payload); },
                [&router](NodeId dst, const NetMessage &msg) { router.linkFailed(dst, msg); },
                [&router](const NetMessage &msg) { router.linkRejected(msg); },
                [&router](NodeId dst, const NetMessage &) {
                    if (dst != kBroadcast)
                    {
                        router.linkConfirmed(dst);
                    }
                },
            });
            router.setUpcalls({
                [this](const DataPacket &packet) { recordDelivery(packet); },
                [this](const DataPacket &packet, routing::DropCause cause) {
                    recordDrop(packet, routing::toString(cause));
                },
                [this, &ref] {
                    return 1.0 - consumedJoules(ref) / m_config.energy.batteryJoules;
                },
                [this, &ref](NodeId, bool) { pumpRelay(ref); },
            });
        }
        else if (spec.role == NodeRole::Sensor)
        {
            macRef.setUpcalls({
                nullptr,
                [this](NodeId, const NetMessage &msg) { recordDrop(msg, "mac-retry"); },
                [this](const NetMessage &msg) { recordDrop(msg, "mac-queue"); },
                nullptr,
            });
        }
        else
        {
            macRef.setUpcalls({
                [this, &ref](const MacFrame &frame) {
                    if (const auto *packet = std::get_if<DataPacket>(&frame.payload))
                    {
                        coordinatorIntake(ref, *packet);
                    }
                },
                nullptr,
                nullptr,
                nullptr,
            });
        }
        node->macs.push_back(std::move(mac));
    }
    m_nodes.push_back(std::move(node));
}

void Run::coordinatorIntake(NodeRuntime &node, DataPacket packet)
{
    ++packet.hops;
    packet.path.push_back(node.spec.id);
    if (node.spec.id == m_plan.leader)
    {
        recordDelivery(packet);
        return;
    }
    relay(node, std::move(packet));
}

void Run::relay(NodeRuntime &node, DataPacket packet)
{
    if (node.relay.size() >= m_config.relayQueueCapacity)
    {
        recordDrop(packet, "relay-queue");
        return;
    }
    node.relay.push_back(std::move(packet));
    pumpRelay(node);
}

void Run::pumpRelay(NodeRuntime &node)
{
    routing::DymoRouter &router = *node.router;
    const NodeId sink = m_plan.leader;
    while (!node.relay.empty())
    {
        if (!router.route(sink) && router.buffered(sink) >= m_config.routing.discoveryBuffer)
        {
            return;
        }
        DataPacket packet = std::move(node.relay.front());
        node.relay.pop_front();
        router.sendData(std::move(packet));
    }
}

void Run::recordDelivery(const DataPacket &packet)
{
    auto &record = m_packets.at(packet.id);
    if (record.deliveredAt)
    {
        return;
    }
    record.deliveredAt = m_scheduler.now();
    record.hops = packet.hops;
    for (std::size_t i = 1; i < packet.path.size(); ++i)
    {
        ++m_edgeUse[{packet.path[i - 1], packet.path[i]}];
    }
}

void Run::recordDrop(const NetMessage &msg, const char *cause)
{
    if (const auto *packet = std::get_if<DataPacket>(&msg))
    {
        recordDrop(*packet, cause);
    }
}

void Run::recordDrop(const DataPacket &packet, const char *cause)
{
    auto &record = m_packets.at(packet.id);
    if (!record.dropCause)
    {
        record.dropCause = cause;
    }
}

void Run::scheduleGeneration(NodeId node, std::uint64_t index)
{
    const NodeRuntime &rt = *m_nodes[node];
    const double at = rt.trafficOffset + static_cast<double>(index) * m_config.traffic.interval;
    if (at >= m_config.duration)
    {
        return;
    }
    m_scheduler.schedule(at, node, sim::EventKind::AppGenerate, [this, node, index] {
        generate(node);
        scheduleGeneration(node, index + 1);
    });
}

void Run::generate(NodeId node)
{
    NodeRuntime &rt = *m_nodes[node];
    DataPacket packet;
    packet.id = m_packets.size();
    packet.source = node;
    packet.destination = m_plan.leader;
    packet.createdAt = m_scheduler.now();
    packet.payloadBytes = m_config.traffic.payloadBytes;
    packet.path = {node};

    metrics::PacketRecord record;
    record.id = packet.id;
    record.source = node;
    record.createdAt = packet.createdAt;
    record.payloadBytes = packet.payloadBytes;
    m_packets.push_back(record);

    if (rt.router && m_plan.strategy == Strategy::Clustered)
    {
        relay(rt, std::move(packet));
    }
    else if (rt.router)
    {
        rt.router->sendData(std::move(packet));
    }
    else
    {
        rt.macs.front()->enqueue(m_plan.coordinatorOf(rt.spec.body), std::move(packet));
    }
}

void Run::mobilityStep(std::uint64_t index)
{
    const double step = m_config.layout.stepInterval;
    m_mobility.advance(step);
    if (m_traces.trajectory && m_trajectoryEvery > 0 && index % m_trajectoryEvery == 0)
    {
        m_mobility.dumpTrajectory(*m_traces.trajectory, m_scheduler.now());
    }
    const double next = static_cast<double>(index + 1) * step;
    if (next <= m_config.duration)
    {
        m_scheduler.schedule(next, sim::kWorldTarget, sim::EventKind::MobilityStep,
                             [this, index] { mobilityStep(index + 1); });
    }
}

void Run::routeSnapshot()
{
    ++m_snapshots;
    std::ostream &out = *m_traces.routes;
    for (const auto &node : m_nodes)
    {
        if (!node->router)
        {
            continue;
        }
        for (const auto &entry : node->router->routes())
        {
            out << std::fixed << std::setprecision(3) << m_scheduler.now() << ',' << node->spec.id << ','
                << entry.dest << ',' << entry.nextHop << ',' << entry.hopCount << '\n';
        }
    }
    const double next = m_scheduler.now() + m_traces.routeInterval;
    if (next <= m_config.duration)
    {
        m_scheduler.schedule(next, sim::kWorldTarget, sim::EventKind::Timer, [this] { routeSnapshot(); });
    }
}

double Run::consumedJoules(const NodeRuntime &node) const
{
    return finalEnergy(node).totalJ();
}

metrics::NodeEnergy Run::finalEnergy(const NodeRuntime &node) const
{
    metrics::NodeEnergy e;
    e.node = node.spec.id;
    e.role = std::string(toString(node.spec.role));
    const double now = m_scheduler.now();
    for (const auto &mac : node.macs)
    {
        const double tx = m_medium.txSeconds(mac->radio());
        const double rx = m_medium.rxSeconds(mac->radio(), now);
        const double idle = std::max(0.0, now - tx - rx);
        e.txJ += phy::packetEnergy(tx, m_config.energy.txCurrentMa);
        e.rxJ += phy::packetEnergy(rx, m_config.energy.rxCurrentMa);
        e.idleJ += phy::packetEnergy(idle, m_config.energy.idleCurrentMa);
    }
    return e;
}

RunResult Run::execute()
{
    if (m_traces.events)
    {
        *m_traces.events << "t\tseq\ttarget\tkind\n";
        m_scheduler.setTrace(m_traces.events);
    }
    for (auto &node : m_nodes)
    {
        if (node->router)
        {
            node->router->start();
        }
    }
    for (auto &node : m_nodes)
    {
        if (node->spec.id == m_plan.leader)
        {
            continue;
        }
        sim::RandomStream rng(m_config.seed, {sim::StreamPurpose::Traffic, node->spec.id});
        node->trafficOffset = rng.uniform(0.0, m_config.traffic.interval);
        scheduleGeneration(node->spec.id, 0);
    }
    const double step = m_config.layout.stepInterval;
    if (m_traces.trajectory)
    {
        m_trajectoryEvery = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(m_traces.trajectoryInterval / step)));
        *m_traces.trajectory << "t,body_id,node_slot,x,y,z\n";
        m_mobility.dumpTrajectory(*m_traces.trajectory, 0.0);
    }
    if (step <= m_config.duration)
    {
        m_scheduler.schedule(step, sim::kWorldTarget, sim::EventKind::MobilityStep, [this] { mobilityStep(1); });
    }
    if (m_traces.routes)
    {
        *m_traces.routes << "t,node,dest,next_hop,hops\n";
        m_scheduler.schedule(0.0, sim::kWorldTarget, sim::EventKind::Timer, [this] { routeSnapshot(); });
    }

    RunResult result;
    result.events = m_scheduler.runUntil(m_config.duration) - m_snapshots;
    result.plan = m_plan;
    result.packets = std::move(m_packets);
    result.edgeUse = std::move(m_edgeUse);
    result.medium = m_medium.counters();
    for (const auto &node : m_nodes)
    {
        result.energy.push_back(finalEnergy(*node));
        for (const auto &mac : node->macs)
        {
            accumulate(result.mac, mac->counters());
        }
        if (node->router)
        {
            accumulate(result.routing, node->router->counters());
        }
    }
    return result;
}

} // namespace

void validate(const NetworkConfig &config)
{
    validate(config.traffic);
    mobility::validate(config.layout);
    phy::validate(config.onBody);
    phy::validate(config.bodyToBody);
    mac::validate(config.mac);
    routing::validate(config.routing);
    planNetwork(config.strategy, config.layout.groups * config.layout.membersPerGroup, config.leaderBody,
                config.coordinatorSlot);
    if (!(config.duration > 0.0))
    {
        throw PlanError("simulation duration must be positive");
    }
    if (config.relayQueueCapacity < 1)
    {
        throw PlanError("relay queue capacity must be >= 1");
    }
    if (!(config.radio.bandwidthHz > 0.0))
    {
        throw PlanError("receiver bandwidth must be positive");
    }
    const auto &e = config.energy;
    if (e.txCurrentMa < 0.0 || e.rxCurrentMa < 0.0 || e.idleCurrentMa < 0.0 || !(e.batteryJoules > 0.0))
    {
        throw PlanError("radio currents must be >= 0 and battery capacity positive");
    }
}

RunResult runNetwork(const NetworkConfig &config, const TraceSinks &traces)
{
    Run run(config, traces);
    return run.execute();
}

void writeTopologyDot(std::ostream &out, const RunResult &result)
{
    std::uint64_t delivered = 0;
    for (const auto &p : result.packets)
    {
        if (p.deliveredAt)
        {
            ++delivered;
        }
    }
    out << "digraph wbbn {\n";
    out << "  label=\"" << toString(result.plan.strategy) << ", " << delivered << " delivered\";\n";
    out << "  node [shape=circle, fontsize=10];\n";
    int body = -1;
    for (const auto &n : result.plan.nodes)
    {
        if (n.body != body)
        {
            if (body >= 0)
            {
                out << "  }\n";
            }
            body = n.body;
            out << "  subgraph cluster_body" << body << " {\n    label=\"body " << body << "\";\n";
        }
        out << "    n" << n.id << " [label=\"" << n.id << "\"";
        if (n.role == NodeRole::LeaderCoordinator)
        {
            out << ", shape=doublecircle";
        }
        else if (n.role == NodeRole::Coordinator)
        {
            out << ", shape=box";
        }
        out << "];\n";
    }
    if (body >= 0)
    {
        out << "  }\n";
    }
    for (const auto &[edge, count] : result.edgeUse)
    {
        const double share = delivered > 0 ? static_cast<double>(count) / static_cast<double>(delivered) : 0.0;
        out << "  n" << edge.first << " -> n" << edge.second << " [label=\"" << std::fixed << std::setprecision(3)
            << share << "\", penwidth=" << std::setprecision(2) << 1.0 + 4.0 * share << "];\n";
    }
    out << "}\n";
}

} // namespace wbbn::dissemination
