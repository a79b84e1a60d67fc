#pragma once

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

namespace wbbn
{

using NodeId = std::uint32_t;
using ChannelId = std::uint32_t;
using PacketId = std::uint64_t;

inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max() - 1;

/// Application payload travelling toward the sink.
struct DataPacket
{
    PacketId id = 0;
    NodeId source = kNoNode;
    NodeId destination = kNoNode;
    double createdAt = 0.0;
    std::uint32_t payloadBytes = 0;
    std::uint32_t hops = 0;     // successful link traversals so far
    std::vector<NodeId> path;   // nodes visited, source first
};

struct Rreq
{
    NodeId orig = kNoNode;
    NodeId target = kNoNode;
    std::uint16_t origSeq = 0;
    std::vector<NodeId> path; // orig first, then every forwarder
    std::uint32_t hopCount = 0;
};

struct Rrep
{
    NodeId orig = kNoNode;
    NodeId target = kNoNode;
    std::uint16_t targetSeq = 0;
    std::vector<NodeId> path; // orig ... target
};

struct Rerr
{
    std::vector<NodeId> unreachable;
    NodeId origin = kNoNode;
};

struct Hello
{
    NodeId sender = kNoNode;
};

using NetMessage = std::variant<DataPacket, Rreq, Rrep, Rerr, Hello>;

/// Bytes a network message occupies in the MAC payload.
std::uint32_t messageBytes(const NetMessage &msg);

enum class FrameType : std::uint8_t
{
    Data,
    Ack,
};

struct MacFrame
{
    FrameType type = FrameType::Data;
    NodeId src = kNoNode;
    NodeId dst = kBroadcast;
    std::uint8_t seq = 0;
    std::uint32_t payloadBytes = 0; // zero for ACK
    ChannelId channel = 0;
    NetMessage payload;

    bool isBroadcast() const { return dst == kBroadcast; }
};

} // namespace wbbn
