#include "wbbn/metrics/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace wbbn;
using namespace wbbn::metrics;

namespace
{

PacketRecord delivered(PacketId id, double created, double at, std::uint32_t hops)
{
    PacketRecord r;
    r.id = id;
    r.createdAt = created;
    r.deliveredAt = at;
    r.hops = hops;
    r.payloadBytes = 16;
    return r;
}

PacketRecord dropped(PacketId id, const char *cause)
{
    PacketRecord r;
    r.id = id;
    r.dropCause = cause;
    return r;
}

PacketRecord pending(PacketId id)
{
    PacketRecord r;
    r.id = id;
    return r;
}

} // namespace

TEST_CASE("packet reception ratio")
{
    std::vector<PacketRecord> records;
    for (PacketId i = 0; i < 97; ++i)
    {
        records.push_back(delivered(i, 0.0, 0.01, 1));
    }
    for (PacketId i = 97; i < 100; ++i)
    {
        records.push_back(dropped(i, "mac-retry"));
    }
    CHECK(prr(records) == doctest::Approx(0.97));

    std::vector<PacketRecord> none{dropped(0, "no-route"), pending(1)};
    CHECK(prr(none) == 0.0);
    CHECK(prr(std::vector<PacketRecord>{delivered(0, 0, 1, 1)}) == 1.0);
    CHECK_THROWS_AS(prr(std::vector<PacketRecord>{}), MetricsError);
}

TEST_CASE("a late delivery wins over an earlier drop")
{
    PacketRecord r = dropped(1, "mac-retry");
    CHECK((r.fate() == PacketFate::Dropped));
    r.deliveredAt = 2.0;
    r.hops = 2;
    CHECK((r.fate() == PacketFate::Delivered));
    CHECK((pending(2).fate() == PacketFate::InFlight));
}

TEST_CASE("mean delay over deliveries only, independent of order")
{
    std::vector<PacketRecord> records{delivered(0, 1.0, 1.002, 1), delivered(1, 2.0, 2.004, 2), dropped(2, "x")};
    CHECK(*meanDelay(records) == doctest::Approx(0.003));
    std::reverse(records.begin(), records.end());
    CHECK(*meanDelay(records) == doctest::Approx(0.003));
    CHECK(*meanDelay(std::vector<PacketRecord>{delivered(0, 0.0, 0.007, 1)}) == doctest::Approx(0.007));
    CHECK_FALSE(meanDelay(std::vector<PacketRecord>{dropped(0, "x"), pending(1)}));
}

TEST_CASE("hop statistics")
{
    std::vector<PacketRecord> records{delivered(0, 0, 1, 1), delivered(1, 0, 1, 3), delivered(2, 0, 1, 2),
                                      dropped(3, "x")};
    const auto h = hopStats(records);
    REQUIRE(h);
    CHECK(h->min == 1);
    CHECK(h->max == 3);
    CHECK(h->avg == doctest::Approx(2.0));
    CHECK(h->count == 3);
    CHECK_FALSE(hopStats(std::vector<PacketRecord>{dropped(0, "x")}));

    const auto single = hopStats(std::vector<PacketRecord>{delivered(0, 0, 1, 1)});
    CHECK(single->min == 1);
    CHECK(single->avg == 1.0);
    CHECK(single->max == 1);
}

TEST_CASE("hop accumulator pools across runs")
{
    HopAccumulator a;
    HopAccumulator b;
    a.add(1);
    a.add(2);
    b.add(6);
    a.merge(b);
    const auto s = a.stats();
    REQUIRE(s);
    CHECK(s->min == 1);
    CHECK(s->max == 6);
    CHECK(s->avg == doctest::Approx(3.0));
    CHECK(a.count() == 3);
    CHECK_FALSE(HopAccumulator{}.stats());
}

TEST_CASE("Student-t confidence half-width")
{
    std::vector<double> ramp;
    for (int i = 1; i <= 10; ++i)
    {
        ramp.push_back(i);
    }
    const auto s = ci95(ramp);
    CHECK(s.mean == 5.5);
    CHECK(s.n == 10);
    REQUIRE(s.ci95);
    CHECK(std::abs(*s.ci95 - 2.166) <= 0.001);

    const std::vector<double> flat(10, 0.42);
    CHECK(*ci95(flat).ci95 == 0.0);

    const auto one = ci95(std::vector<double>{3.0});
    CHECK(one.mean == 3.0);
    CHECK_FALSE(one.ci95);
    CHECK_THROWS_AS(ci95(std::vector<double>{}), MetricsError);
}

TEST_CASE("half-width shrinks like one over root n")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> dist(0.0, 1.0);
    auto meanWidth = [&](int n) {
        double total = 0.0;
        for (int rep = 0; rep < 400; ++rep)
        {
            std::vector<double> xs(static_cast<std::size_t>(n));
            for (auto &x : xs)
            {
                x = dist(rng);
            }
            total += *ci95(xs).ci95;
        }
        return total / 400.0;
    };
    const double w10 = meanWidth(10);
    const double w40 = meanWidth(40);
    // t quantiles differ between 9 and 39 degrees of freedom; compare after removing them.
    const double ratio = (w10 / 2.262) / (w40 / 2.023);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("run summary accounts for every packet")
{
    std::vector<PacketRecord> records{delivered(0, 0, 0.01, 2), delivered(1, 1, 1.03, 3), dropped(2, "mac-retry"),
                                      dropped(3, "no-route"), dropped(4, "mac-retry"), pending(5)};
    std::vector<NodeEnergy> energy{{0, "leader", 0.1, 0.2, 0.3}, {1, "sensor", 0.2, 0.2, 0.2},
                                   {2, "sensor", 0.0, 0.0, 0.4}};
    const RunSummary s = summarize(records, energy);
    CHECK(s.generated == 6);
    CHECK(s.delivered == 2);
    CHECK(s.dropped == 3);
    CHECK(s.inFlight == 1);
    CHECK(s.generated == s.delivered + s.dropped + s.inFlight);
    const double g = static_cast<double>(s.generated);
    CHECK(s.delivered / g + s.dropped / g + s.inFlight / g == doctest::Approx(1.0));
    CHECK(s.prr == doctest::Approx(2.0 / 6.0));
    CHECK(*s.meanDelay == doctest::Approx(0.02));
    CHECK(s.hops->max == 3);
    CHECK(s.totalEnergyJ == doctest::Approx(1.6));
    CHECK(s.energyPerNodeJ == doctest::Approx(1.6 / 3.0));
    CHECK(*s.energyPerDeliveredJ == doctest::Approx(0.8));
    CHECK(s.energyPerRoleJ.at("sensor") == doctest::Approx(0.5));
    CHECK(s.energyPerRoleJ.at("leader") == doctest::Approx(0.6));
    CHECK(s.dropsByCause.at("mac-retry") == 2);
    CHECK(s.dropsByCause.at("no-route") == 1);
}
