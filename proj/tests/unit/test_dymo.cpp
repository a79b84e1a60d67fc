#include "wbbn/routing/dymo.hpp"

#include "ideal_net.hpp"

#include <doctest.h>

#include <variant>

using namespace wbbn;
using namespace wbbn::routing;
using wbbn::testing::IdealNet;

namespace
{

constexpr std::size_t kRreq = 1;
constexpr std::size_t kRrep = 2;
constexpr std::size_t kRerr = 3;

DymoParams quiet()
{
    DymoParams p;
    p.hellos = false;
    return p;
}

DataPacket packet(PacketId id, NodeId src, NodeId dst)
{
    DataPacket p;
    p.id = id;
    p.source = src;
    p.destination = dst;
    p.payloadBytes = 16;
    p.path = {src};
    return p;
}

struct Spy : LinkLayer
{
    std::vector<NetMessage> broadcasts;
    std::vector<std::pair<NodeId, NetMessage>> unicasts;
    void sendBroadcast(NetMessage msg) override { broadcasts.push_back(std::move(msg)); }
    void sendUnicast(NodeId to, NetMessage msg) override { unicasts.emplace_back(to, std::move(msg)); }
};

void chain(IdealNet &net)
{
    for (NodeId i = 0; i + 1 < net.size(); ++i)
    {
        net.connect(i, i + 1);
    }
}

} // namespace

TEST_CASE("forwarder appends itself and learns reverse routes")
{
    sim::Scheduler s;
    Spy link;
    DymoRouter b(1, s, link, quiet(), 1);
    b.receive(0, Rreq{0, 2, 5, {0}, 0});
    REQUIRE(link.broadcasts.size() == 1);
    const auto &fwd = std::get<Rreq>(link.broadcasts[0]);
    CHECK(fwd.path == std::vector<NodeId>{0, 1});
    CHECK(fwd.hopCount == 1);
    const auto back = b.route(0);
    REQUIRE(back);
    CHECK(back->nextHop == 0);
    CHECK(back->hopCount == 1);
    CHECK(back->seqNo == std::optional<std::uint16_t>(5));

    b.receive(3, Rreq{0, 2, 5, {0, 3}, 1});
    CHECK(link.broadcasts.size() == 1);
    CHECK(b.counters().rreqForwarded == 1);
}

TEST_CASE("target answers along the reversed path without rebroadcasting")
{
    sim::Scheduler s;
    Spy link;
    DymoRouter c(2, s, link, quiet(), 1);
    const auto seqBefore = c.sequenceNumber();
    c.receive(1, Rreq{0, 2, 5, {0, 1}, 1});
    CHECK(link.broadcasts.empty());
    REQUIRE(link.unicasts.size() == 1);
    CHECK(link.unicasts[0].first == 1);
    const auto &rrep = std::get<Rrep>(link.unicasts[0].second);
    CHECK(rrep.path == std::vector<NodeId>{0, 1, 2});
    CHECK(rrep.targetSeq == static_cast<std::uint16_t>(seqBefore + 1));
    CHECK(c.route(0)->hopCount == 2);
    CHECK(c.route(1)->hopCount == 1);
}

TEST_CASE("a stale route reply still installs routes")
{
    sim::Scheduler s;
    Spy link;
    DymoRouter a(0, s, link, quiet(), 1);
    a.receive(1, Rrep{0, 2, 9, {0, 1, 2}});
    const auto r = a.route(2);
    REQUIRE(r);
    CHECK(r->nextHop == 1);
    CHECK(r->hopCount == 2);
    CHECK(link.unicasts.empty());
}

TEST_CASE("line discovery: intermediate learns a one-hop route to the target")
{
    IdealNet net(3, quiet());
    chain(net);
    CHECK(net.router(0).sendData(packet(1, 0, 2)) == SendResult::DiscoveryStarted);
    net.scheduler.runUntil(1.0);
    REQUIRE(net.delivered[2].size() == 1);
    CHECK(net.delivered[2][0].hops == 2);
    CHECK(net.delivered[2][0].path == std::vector<NodeId>{0, 1, 2});
    CHECK(net.router(1).route(2)->hopCount == 1);
    CHECK(net.router(0).route(2)->hopCount == 2);
    CHECK(net.sentByKind[kRreq] == 2);
    CHECK(net.router(0).counters().rreqOriginated == 1);
    CHECK(net.discoveryResults[0] == std::vector<std::pair<NodeId, bool>>{{2, true}});

    // Route in place: no more control traffic.
    const auto before = net.sentByKind;
    CHECK(net.router(0).sendData(packet(2, 0, 2)) == SendResult::Routed);
    net.scheduler.runUntil(2.0);
    CHECK(net.sentByKind[kRreq] == before.at(kRreq));
    CHECK(net.sentByKind[kRrep] == before.at(kRrep));
}

TEST_CASE("buffered packets flush in FIFO order")
{
    IdealNet net(4, quiet());
    chain(net);
    for (PacketId id = 0; id < 5; ++id)
    {
        net.router(0).sendData(packet(id, 0, 3));
    }
    CHECK(net.router(0).buffered(3) == 5);
    net.scheduler.runUntil(1.0);
    REQUIRE(net.delivered[3].size() == 5);
    for (PacketId id = 0; id < 5; ++id)
    {
        CHECK(net.delivered[3][id].id == id);
    }
}

TEST_CASE("failed discovery drops the buffer after every attempt")
{
    IdealNet net(3, quiet());
    net.connect(0, 1); // node 2 unreachable
    for (PacketId id = 0; id < 12; ++id)
    {
        net.router(0).sendData(packet(id, 0, 2));
    }
    // Buffer holds 10; the two oldest go first.
    REQUIRE(net.dropped[0].size() == 2);
    CHECK(net.dropped[0][0].first.id == 0);
    CHECK((net.dropped[0][0].second == DropCause::DiscoveryBufferFull));
    net.scheduler.runUntil(5.9);
    CHECK(net.router(0).discovering(2));
    CHECK(net.router(0).counters().rreqOriginated == 3);
    net.scheduler.runUntil(6.1);
    CHECK_FALSE(net.router(0).discovering(2));
    CHECK(net.router(0).counters().discoveriesFailed == 1);
    CHECK(net.dropped[0].size() == 12);
    CHECK((net.dropped[0].back().second == DropCause::NoRoute));
    CHECK(net.discoveryResults[0] == std::vector<std::pair<NodeId, bool>>{{2, false}});
}

TEST_CASE("low-energy nodes do not relay route requests but still send their own traffic")
{
    IdealNet net(3, quiet());
    chain(net);
    net.energy[1] = 0.04;
    CHECK_FALSE(net.router(1).participates());
    net.router(0).sendData(packet(1, 0, 2));
    net.scheduler.runUntil(10.0);
    CHECK(net.delivered[2].empty());
    CHECK(net.router(1).counters().rreqSuppressedLowEnergy == 3);
    CHECK(net.router(0).counters().discoveriesFailed == 1);

    net.router(1).sendData(packet(2, 1, 2));
    net.scheduler.runUntil(11.0);
    CHECK(net.delivered[2].size() == 1);

    net.energy[1] = 1.0;
    CHECK(net.router(1).participates());
}

TEST_CASE("link failure notifies each precursor once and nobody else")
{
    // 0 and 3 both reach 2 through 1; 4 hangs off 1 but never sends.
    IdealNet net(5, quiet());
    net.connect(0, 1);
    net.connect(3, 1);
    net.connect(4, 1);
    net.connect(1, 2);
    net.router(0).sendData(packet(1, 0, 2));
    net.scheduler.runUntil(1.0);
    net.router(3).sendData(packet(2, 3, 2));
    net.scheduler.runUntil(2.0);
    REQUIRE(net.delivered[2].size() == 2);
    CHECK(net.router(1).precursors(2) == std::set<NodeId>{0, 3});

    net.disconnect(1, 2);
    net.router(0).sendData(packet(3, 0, 2));
    net.scheduler.runUntil(3.0);
    CHECK(net.router(1).counters().rerrSent == 2);
    CHECK(net.router(0).counters().rerrReceived == 1);
    CHECK(net.router(3).counters().rerrReceived == 1);
    CHECK(net.router(4).counters().rerrReceived == 0);
    CHECK_FALSE(net.router(0).route(2));
    CHECK_FALSE(net.router(3).route(2));
    CHECK_FALSE(net.router(1).route(2));
    REQUIRE(net.dropped[1].size() == 1);
    CHECK((net.dropped[1][0].second == DropCause::MacRetryLimit));
}

TEST_CASE("a broken link with no upstream users raises no route error")
{
    IdealNet net(2, quiet());
    chain(net);
    net.router(0).sendData(packet(1, 0, 1));
    net.scheduler.runUntil(1.0);
    net.disconnect(0, 1);
    net.router(0).sendData(packet(2, 0, 1));
    net.scheduler.runUntil(2.0);
    CHECK(net.router(0).counters().rerrSent == 0);
    CHECK(net.sentByKind[kRerr] == 0);
    CHECK_FALSE(net.router(0).route(1));
}

TEST_CASE("relay without a route drops and tells the upstream hop")
{
    IdealNet net(3, quiet());
    chain(net);
    // Only the originator knows a route; the relay has never heard of node 2.
    net.router(0).receive(1, Rrep{0, 2, 1, {0, 1, 2}});
    REQUIRE(net.router(0).route(2));
    net.router(0).sendData(packet(2, 0, 2));
    net.scheduler.runUntil(3.0);
    REQUIRE(net.dropped[1].size() == 1);
    CHECK((net.dropped[1][0].second == DropCause::NoRoute));
    CHECK_FALSE(net.router(0).route(2));
}

TEST_CASE("hellos every interval; silent neighbours expire after the timeout")
{
    DymoParams p;
    IdealNet net(3, p);
    chain(net);
    for (NodeId n = 0; n < 3; ++n)
    {
        net.router(n).start();
    }
    net.router(0).sendData(packet(1, 0, 2));
    net.scheduler.runUntil(1.0);
    REQUIRE(net.router(0).route(2));

    net.scheduler.runUntil(60.0);
    CHECK(net.router(0).counters().hellosSent == 20);
    CHECK(net.router(1).neighbors() == std::set<NodeId>{0, 2});

    net.disconnect(0, 1);
    net.scheduler.runUntil(60.0 + p.neighborTimeout - 3.0 - 1e-3);
    CHECK(net.router(0).neighbors().contains(1));
    net.scheduler.runUntil(60.0 + p.neighborTimeout + 1e-3);
    CHECK_FALSE(net.router(0).neighbors().contains(1));
    CHECK_FALSE(net.router(0).route(1));
}

TEST_CASE("routes expire unless used")
{
    DymoParams p = quiet();
    p.routeLifetime = 5.0;
    IdealNet net(2, p);
    chain(net);
    net.router(0).sendData(packet(1, 0, 1));
    net.scheduler.runUntil(4.0);
    net.router(0).sendData(packet(2, 0, 1));
    net.scheduler.runUntil(8.0);
    CHECK(net.router(0).route(1));
    net.scheduler.runUntil(9.5);
    CHECK_FALSE(net.router(0).route(1));
}

TEST_CASE("hop limit")
{
    DymoParams p = quiet();
    p.hopLimit = 3;
    IdealNet net(6, p);
    chain(net);
    net.router(0).sendData(packet(1, 0, 5));
    net.scheduler.runUntil(10.0);
    CHECK(net.delivered[5].empty());
    CHECK(net.router(0).counters().discoveriesFailed == 1);
}

TEST_CASE("sequence number freshness wraps around")
{
    CHECK(seqNewer(2, 1));
    CHECK_FALSE(seqNewer(1, 2));
    CHECK_FALSE(seqNewer(7, 7));
    CHECK(seqNewer(3, 65530));
    CHECK_FALSE(seqNewer(65530, 3));
}

TEST_CASE("discovered routes are breadth-first shortest on static graphs")
{
    const auto report = wbbn::testing::routingOptimality(99, 60, 20);
    CHECK(report.graphs == 60);
    CHECK(report.found > 150);
    CHECK(report.mismatches == 0);
    CHECK(report.impossible == 0);
    CHECK(report.brokenChains == 0);
    CHECK(report.undelivered == 0);
}

TEST_CASE("parameter validation")
{
    DymoParams p;
    p.discoveryAttempts = 0;
    CHECK_THROWS(validate(p));
    p = DymoParams{};
    p.energyThreshold = 1.5;
    CHECK_THROWS(validate(p));
    CHECK_NOTHROW(validate(DymoParams{}));
}
