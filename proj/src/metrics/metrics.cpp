#include "wbbn/metrics/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>

namespace wbbn::metrics
{

const char *toString(PacketFate fate)
{
    switch (fate)
    {
    case PacketFate::Delivered: return "delivered";
    case PacketFate::Dropped: return "dropped";
    case PacketFate::InFlight: return "in-flight";
    }
    return "unknown";
}

PacketFate PacketRecord::fate() const
{
    if (deliveredAt)
    {
        return PacketFate::Delivered;
    }
    return dropCause ? PacketFate::Dropped : PacketFate::InFlight;
}

void HopAccumulator::add(std::uint32_t hops)
{
    if (m_count == 0)
    {
        m_min = m_max = hops;
    }
    else
    {
        m_min = std::min(m_min, hops);
        m_max = std::max(m_max, hops);
    }
    ++m_count;
    m_sum += hops;
}

void HopAccumulator::merge(const HopAccumulator &other)
{
    if (other.m_count == 0)
    {
        return;
    }
    if (m_count == 0)
    {
        *this = other;
        return;
    }
    m_min = std::min(m_min, other.m_min);
    m_max = std::max(m_max, other.m_max);
    m_count += other.m_count;
    m_sum += other.m_sum;
}

std::optional<HopStats> HopAccumulator::stats() const
{
    if (m_count == 0)
    {
        return std::nullopt;
    }
    return HopStats{m_min, static_cast<double>(m_sum) / static_cast<double>(m_count), m_max, m_count};
}

double prr(std::span<const PacketRecord> records)
{
    if (records.empty())
    {
        throw MetricsError("PRR is undefined when no packet was generated");
    }
    const auto delivered = std::count_if(records.begin(), records.end(),
                                         [](const PacketRecord &r) { return r.fate() == PacketFate::Delivered; });
    return static_cast<double>(delivered) / static_cast<double>(records.size());
}

std::optional<double> meanDelay(std::span<const PacketRecord> records)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto &r : records)
    {
        if (r.deliveredAt)
        {
            sum += *r.deliveredAt - r.createdAt;
            ++n;
        }
    }
    if (n == 0)
    {
        return std::nullopt;
    }
    return sum / static_cast<double>(n);
}

std::optional<HopStats> hopStats(std::span<const PacketRecord> records)
{
    HopAccumulator acc;
    for (const auto &r : records)
    {
        if (r.deliveredAt && r.hops)
        {
            acc.add(*r.hops);
        }
    }
    return acc.stats();
}

SummaryStat ci95(std::span<const double> samples)
{
    if (samples.empty())
    {
        throw MetricsError("confidence interval of an empty sample");
    }
    SummaryStat out;
    out.n = samples.size();
    double sum = 0.0;
    for (double x : samples)
    {
        sum += x;
    }
    out.mean = sum / static_cast<double>(out.n);
    if (out.n < 2)
    {
        return out;
    }
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi)
    {
        out.mean = *lo;
        out.ci95 = 0.0;
        return out;
    }
    double ss = 0.0;
    for (double x : samples)
    {
        ss += (x - out.mean) * (x - out.mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
    const boost::math::students_t dist(static_cast<double>(out.n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    out.ci95 = t * sd / std::sqrt(static_cast<double>(out.n));
    return out;
}

RunSummary summarize(std::span<const PacketRecord> records, std::span<const NodeEnergy> energy)
{
    RunSummary s;
    for (const auto &r : records)
    {
        ++s.generated;
        switch (r.fate())
        {
        case PacketFate::Delivered: ++s.delivered; break;
        case PacketFate::Dropped:
            ++s.dropped;
            ++s.dropsByCause[*r.dropCause];
            break;
        case PacketFate::InFlight: ++s.inFlight; break;
        }
    }
    s.prr = records.empty() ? 0.0 : prr(records);
    s.meanDelay = meanDelay(records);
    s.hops = hopStats(records);

    std::map<std::string, std::pair<double, std::size_t>> roles;
    for (const auto &e : energy)
    {
        s.totalEnergyJ += e.totalJ();
        auto &[sum, n] = roles[e.role];
        sum += e.totalJ();
        ++n;
    }
    if (!energy.empty())
    {
        s.energyPerNodeJ = s.totalEnergyJ / static_cast<double>(energy.size());
    }
    for (const auto &[role, acc] : roles)
    {
        s.energyPerRoleJ[role] = acc.first / static_cast<double>(acc.second);
    }
    if (s.delivered > 0)
    {
        s.energyPerDeliveredJ = s.totalEnergyJ / static_cast<double>(s.delivered);
    }
    return s;
}

} // namespace wbbn::metrics
