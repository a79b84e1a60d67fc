#include "wbbn/net/packets.hpp"

namespace wbbn
{

namespace
{

// Control message layouts: fixed header plus two bytes per carried address.
constexpr std::uint32_t kRreqHeader = 8;
constexpr std::uint32_t kRrepHeader = 8;
constexpr std::uint32_t kRerrHeader = 4;
constexpr std::uint32_t kHelloBytes = 4;
constexpr std::uint32_t kAddressBytes = 2;

struct SizeOf
{
    std::uint32_t operator()(const DataPacket &p) const { return p.payloadBytes; }
    std::uint32_t operator()(const Rreq &m) const
    {
        return kRreqHeader + kAddressBytes * static_cast<std::uint32_t>(m.path.size());
    }
    std::uint32_t operator()(const Rrep &m) const
    {
        return kRrepHeader + kAddressBytes * static_cast<std::uint32_t>(m.path.size());
    }
    std::uint32_t operator()(const Rerr &m) const
    {
        return kRerrHeader + kAddressBytes * static_cast<std::uint32_t>(m.unreachable.size());
    }
    std::uint32_t operator()(const Hello &) const { return kHelloBytes; }
};

} // namespace

std::uint32_t messageBytes(const NetMessage &msg)
{
    return std::visit(SizeOf{}, msg);
}

} // namespace wbbn
