#include "wbbn/sim/random.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace wbbn::sim;

TEST_CASE("same seed and stream id replay the same sequence")
{
    RandomStream a(42, {StreamPurpose::MacBackoff, 3});
    RandomStream b(42, {StreamPurpose::MacBackoff, 3});
    for (int i = 0; i < 1000; ++i)
    {
        REQUIRE(a.nextBits() == b.nextBits());
    }
}

TEST_CASE("purpose and node select independent streams")
{
    RandomStream base(42, {StreamPurpose::MacBackoff, 3});
    RandomStream otherPurpose(42, {StreamPurpose::Routing, 3});
    RandomStream otherNode(42, {StreamPurpose::MacBackoff, 4});
    RandomStream otherSeed(43, {StreamPurpose::MacBackoff, 3});
    const auto first = base.nextBits();
    CHECK(first != otherPurpose.nextBits());
    CHECK(first != otherNode.nextBits());
    CHECK(first != otherSeed.nextBits());
}

TEST_CASE("uniform stays in range with the expected mean")
{
    RandomStream r(1, {StreamPurpose::Test, 0});
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double u = r.uniform(2.0, 5.0);
        REQUIRE(u >= 2.0);
        REQUIRE(u < 5.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(3.5).epsilon(0.005));
    CHECK(r.uniform(1.5, 1.5) == 1.5);
}

TEST_CASE("uniformInt covers both bounds")
{
    RandomStream r(9, {StreamPurpose::Test, 1});
    std::vector<int> hits(4, 0);
    for (int i = 0; i < 4000; ++i)
    {
        const auto v = r.uniformInt(3, 6);
        REQUIRE(v >= 3);
        REQUIRE(v <= 6);
        ++hits[v - 3];
    }
    for (int h : hits)
    {
        CHECK(h > 800);
    }
}

TEST_CASE("normal draws match the requested moments")
{
    RandomStream r(5, {StreamPurpose::Test, 2});
    const int n = 200000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double x = r.normal(1.0, 6.1);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
    CHECK(sd == doctest::Approx(6.1).epsilon(0.01));
}

TEST_CASE("unitFromBits maps to [0, 1)")
{
    CHECK(unitFromBits(0) == 0.0);
    CHECK(unitFromBits(~0ULL) < 1.0);
    CHECK(unitFromBits(1ULL << 63) == 0.5);
}
