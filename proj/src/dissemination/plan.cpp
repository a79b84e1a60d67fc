#include "wbbn/dissemination/network.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace wbbn::dissemination
{

std::string_view toString(Strategy strategy)
{
    return strategy == Strategy::Clustered ? "clustered" : "distributed";
}

Strategy strategyFromString(std::string_view name)
{
    if (name == "clustered" || name == "cdd")
    {
        return Strategy::Clustered;
    }
    if (name == "distributed" || name == "ddd")
    {
        return Strategy::Distributed;
    }
    throw PlanError("unknown strategy '" + std::string(name) + "' (expected clustered or distributed)");
}

std::string_view toString(NodeRole role)
{
    switch (role)
    {
    case NodeRole::Sensor: return "sensor";
    case NodeRole::Coordinator: return "coordinator";
    case NodeRole::LeaderCoordinator: return "leader";
    }
    return "unknown";
}

ChannelPlan defaultChannelPlan(Strategy strategy, int bodies)
{
    ChannelPlan plan;
    if (strategy == Strategy::Clustered)
    {
        for (int b = 0; b < bodies; ++b)
        {
            plan.intraChannel.push_back(static_cast<ChannelId>(b));
        }
        plan.interChannel = static_cast<ChannelId>(bodies);
    }
    return plan;
}

void validate(const ChannelPlan &plan, Strategy strategy, int bodies)
{
    if (strategy == Strategy::Distributed)
    {
        return;
    }
    if (plan.intraChannel.size() != static_cast<std::size_t>(bodies))
    {
        throw PlanError("clustered plan needs one intra channel per body");
    }
    std::set<ChannelId> seen(plan.intraChannel.begin(), plan.intraChannel.end());
    if (seen.size() != plan.intraChannel.size())
    {
        throw PlanError("clustered intra channels must be pairwise distinct");
    }
    if (seen.contains(plan.interChannel))
    {
        throw PlanError("clustered inter channel must differ from every intra channel");
    }
}

std::size_t NetworkPlan::channelCount() const
{
    std::set<ChannelId> used;
    for (const auto &node : nodes)
    {
        for (const auto &iface : node.interfaces)
        {
            used.insert(iface.channel);
        }
    }
    return used.size();
}

std::size_t NetworkPlan::routingInstances() const
{
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const NodeSpec &n) {
        return std::any_of(n.interfaces.begin(), n.interfaces.end(), [](const Interface &i) { return i.routed; });
    }));
}

NodeId NetworkPlan::coordinatorOf(int body) const
{
    for (const auto &node : nodes)
    {
        if (node.body == body && node.role != NodeRole::Sensor)
        {
            return node.id;
        }
    }
    throw PlanError("body " + std::to_string(body) + " has no coordinator");
}

NetworkPlan planNetwork(Strategy strategy, int bodies, int leaderBody, int coordinatorSlot)
{
    return planNetwork(strategy, bodies, defaultChannelPlan(strategy, bodies), leaderBody, coordinatorSlot);
}

NetworkPlan planNetwork(Strategy strategy, int bodies, const ChannelPlan &channels, int leaderBody,
                        int coordinatorSlot)
{
    if (bodies < 1)
    {
        throw PlanError("a network needs at least one body");
    }
    if (leaderBody < 0 || leaderBody >= bodies)
    {
        throw PlanError("leader body out of range");
    }
    if (coordinatorSlot < 0 || coordinatorSlot >= mobility::kSlotsPerBody)
    {
        throw PlanError("coordinator slot out of range");
    }
    validate(channels, strategy, bodies);

    NetworkPlan plan;
    plan.strategy = strategy;
    plan.channels = channels;
    plan.leader = nodeId(leaderBody, coordinatorSlot);
    for (int b = 0; b < bodies; ++b)
    {
        for (int s = 0; s < mobility::kSlotsPerBody; ++s)
        {
            NodeSpec spec;
            spec.id = nodeId(b, s);
            spec.body = b;
            spec.slot = s;
            if (s == coordinatorSlot)
            {
                spec.role = b == leaderBody ? NodeRole::LeaderCoordinator : NodeRole::Coordinator;
            }
            if (strategy == Strategy::Distributed)
            {
                spec.interfaces.push_back({channels.distributedChannel, true});
            }
            else
            {
                const ChannelId intra = channels.intraChannel[static_cast<std::size_t>(b)];
                spec.interfaces.push_back({intra, false});
                if (spec.role != NodeRole::Sensor)
                {
                    spec.interfaces.push_back({channels.interChannel, true});
                }
            }
            plan.nodes.push_back(std::move(spec));
        }
    }
    return plan;
}

void validate(const TrafficConfig &traffic)
{
    if (traffic.payloadBytes < 16 || traffic.payloadBytes > 1024)
    {
        throw PlanError("payload must be within [16, 1024] bytes");
    }
    if (!(traffic.interval > 0.0))
    {
        throw PlanError("traffic interval must be positive");
    }
}

} // namespace wbbn::dissemination
