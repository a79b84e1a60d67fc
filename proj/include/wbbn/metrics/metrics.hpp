#pragma once

#include "wbbn/net/packets.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wbbn::metrics
{

enum class PacketFate : std::uint8_t
{
    Delivered,
    Dropped,
    InFlight,
};

const char *toString(PacketFate fate);

/// What happened to one application packet. A delivery recorded after a drop
/// (ACK lost on the last retry while the relay kept the frame) wins.
struct PacketRecord
{
    PacketId id = 0;
    NodeId source = kNoNode;
    double createdAt = 0.0;
    std::optional<double> deliveredAt;
    std::optional<std::uint32_t> hops;
    std::uint32_t payloadBytes = 0;
    std::optional<std::string> dropCause;

    PacketFate fate() const;
};

struct HopStats
{
    std::uint32_t min = 0;
    double avg = 0.0;
    std::uint32_t max = 0;
    std::uint64_t count = 0;
};

/// Pools hop counts across runs (Table-I style: all payloads, all iterations).
class HopAccumulator
{
public:
    void add(std::uint32_t hops);
    void merge(const HopAccumulator &other);
    std::optional<HopStats> stats() const;
    std::uint64_t count() const { return m_count; }

private:
    std::uint64_t m_count = 0;
    std::uint64_t m_sum = 0;
    std::uint32_t m_min = 0;
    std::uint32_t m_max = 0;
};

struct SummaryStat
{
    double mean = 0.0;
    std::optional<double> ci95; // absent when n < 2
    std::size_t n = 0;
};

class MetricsError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Delivered / generated. Throws MetricsError when nothing was generated.
double prr(std::span<const PacketRecord> records);

/// Mean creation-to-delivery time over delivered packets; empty if none.
std::optional<double> meanDelay(std::span<const PacketRecord> records);

std::optional<HopStats> hopStats(std::span<const PacketRecord> records);

/// Mean and Student-t 95% half-width. Throws on an empty sample.
SummaryStat ci95(std::span<const double> samples);

struct NodeEnergy
{
    NodeId node = kNoNode;
    std::string role;
    double txJ = 0.0;
    double rxJ = 0.0;
    double idleJ = 0.0;

    double totalJ() const { return txJ + rxJ + idleJ; }
};

struct RunSummary
{
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t inFlight = 0;
    double prr = 0.0;
    std::optional<double> meanDelay;
    std::optional<HopStats> hops;
    double energyPerNodeJ = 0.0;
    double totalEnergyJ = 0.0;
    std::optional<double> energyPerDeliveredJ;
    std::map<std::string, double> energyPerRoleJ; // mean over nodes of the role
    std::map<std::string, std::uint64_t> dropsByCause;
};

RunSummary summarize(std::span<const PacketRecord> records, std::span<const NodeEnergy> energy);

} // namespace wbbn::metrics
