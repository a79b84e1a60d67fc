#pragma once

#include "wbbn/mac/csma_mac.hpp"
#include "wbbn/metrics/metrics.hpp"
#include "wbbn/mobility/mobility.hpp"
#include "wbbn/phy/medium.hpp"
#include "wbbn/phy/phy.hpp"
#include "wbbn/routing/dymo.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace wbbn::dissemination
{

enum class Strategy : std::uint8_t
{
    Clustered,
    Distributed,
};

std::string_view toString(Strategy strategy);
Strategy strategyFromString(std::string_view name);

enum class NodeRole : std::uint8_t
{
    Sensor,
    Coordinator,
    LeaderCoordinator,
};

std::string_view toString(NodeRole role);

class PlanError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct ChannelPlan
{
    std::vector<ChannelId> intraChannel; // per body, clustered only
    ChannelId interChannel = 0;
    ChannelId distributedChannel = 0;
};

/// Clustered: body i on channel i, coordinators meet on channel `bodies`.
/// Distributed: everyone on channel 0.
ChannelPlan defaultChannelPlan(Strategy strategy, int bodies);
void validate(const ChannelPlan &plan, Strategy strategy, int bodies);

struct Interface
{
    ChannelId channel = 0;
    bool routed = false; // runs DYMO on top
};

struct NodeSpec
{
    NodeId id = kNoNode;
    int body = 0;
    int slot = 0;
    NodeRole role = NodeRole::Sensor;
    std::vector<Interface> interfaces;
};

struct NetworkPlan
{
    Strategy strategy = Strategy::Clustered;
    NodeId leader = 0;
    ChannelPlan channels;
    std::vector<NodeSpec> nodes;

    std::size_t channelCount() const;
    std::size_t routingInstances() const;
    NodeId coordinatorOf(int body) const;
};

inline NodeId nodeId(int body, int slot)
{
    return static_cast<NodeId>(body * mobility::kSlotsPerBody + slot);
}

/// Node stacks for one strategy. Node id = body * 5 + slot.
NetworkPlan planNetwork(Strategy strategy, int bodies, int leaderBody = 0, int coordinatorSlot = 0);
NetworkPlan planNetwork(Strategy strategy, int bodies, const ChannelPlan &channels, int leaderBody,
                        int coordinatorSlot);

struct TrafficConfig
{
    std::uint32_t payloadBytes = 16;
    double interval = 1.0; // seconds
};

void validate(const TrafficConfig &traffic);

struct NetworkConfig
{
    Strategy strategy = Strategy::Clustered;
    phy::PhyConfig phy;
    TrafficConfig traffic;
    mobility::GroupLayout layout;
    phy::ChannelParams onBody = phy::defaultChannelParams(phy::LinkKind::OnBody, phy::Band::Mhz2450);
    phy::ChannelParams bodyToBody = phy::defaultChannelParams(phy::LinkKind::BodyToBody, phy::Band::Mhz2450);
    bool shadowing = true;
    phy::RadioEnvironment radio;
    phy::FrameFormat frame;
    mac::MacParams mac;
    routing::DymoParams routing;
    std::size_t relayQueueCapacity = 50; // clustered coordinators
    phy::EnergyModel energy;
    double duration = 60.0;
    std::uint64_t seed = 1;
    int leaderBody = 0;
    int coordinatorSlot = 0;
};

/// Checks every block of `config`; throws on the first violation.
void validate(const NetworkConfig &config);

/// Optional per-run trace outputs; null streams are skipped.
struct TraceSinks
{
    std::ostream *events = nullptr;     // time, seq, target, kind
    std::ostream *trajectory = nullptr; // t, body_id, node_slot, x, y, z
    std::ostream *routes = nullptr;     // t, node, dest, next_hop, hops
    double trajectoryInterval = 1.0;
    double routeInterval = 1.0;
};

struct RunResult
{
    NetworkPlan plan;
    std::vector<metrics::PacketRecord> packets;
    std::vector<metrics::NodeEnergy> energy;
    /// Directed link use by delivered packets.
    std::map<std::pair<NodeId, NodeId>, std::uint64_t> edgeUse;
    mac::MacCounters mac;
    routing::RoutingCounters routing;
    phy::MediumCounters medium;
    std::uint64_t events = 0;
};

/// Builds the stacks for `config`, runs the converge-cast for config.duration
/// seconds and returns the per-packet and per-node facts.
RunResult runNetwork(const NetworkConfig &config, const TraceSinks &traces = {});

/// Graphviz digraph of links that carried at least one delivered packet,
/// labelled with their share of delivered traffic.
void writeTopologyDot(std::ostream &out, const RunResult &result);

} // namespace wbbn::dissemination
