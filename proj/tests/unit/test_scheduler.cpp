#include "wbbn/sim/scheduler.hpp"

#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

using namespace wbbn::sim;

TEST_CASE("events run in time order, equal times in scheduling order")
{
    Scheduler s;
    std::vector<int> order;
    s.schedule(2.0, 0, EventKind::Timer, [&] { order.push_back(3); });
    s.schedule(1.0, 0, EventKind::Timer, [&] { order.push_back(1); });
    s.schedule(1.0, 0, EventKind::Timer, [&] { order.push_back(2); });
    s.runUntil(10.0);
    CHECK(order == std::vector<int>{1, 2, 3});
    CHECK(s.now() == 10.0);
    CHECK(s.processed() == 3);
}

TEST_CASE("events scheduled from inside an action at the same time run after it")
{
    Scheduler s;
    std::vector<std::string> order;
    s.schedule(1.0, 0, EventKind::Timer, [&] {
        order.push_back("a");
        s.scheduleIn(0.0, 0, EventKind::Timer, [&] { order.push_back("c"); });
    });
    s.schedule(1.0, 0, EventKind::Timer, [&] { order.push_back("b"); });
    s.runUntil(1.0);
    CHECK(order == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("cancelled events are skipped and not counted")
{
    Scheduler s;
    int fired = 0;
    const EventId keep = s.schedule(1.0, 0, EventKind::Timer, [&] { ++fired; });
    const EventId drop = s.schedule(0.5, 0, EventKind::Timer, [&] { fired += 100; });
    (void)keep;
    s.cancel(drop);
    CHECK(s.pending() == 1);
    s.runUntil(2.0);
    CHECK(fired == 1);
    CHECK(s.processed() == 1);
}

TEST_CASE("runUntil leaves later events pending and advances the clock")
{
    Scheduler s;
    int fired = 0;
    s.schedule(1.0, 0, EventKind::Timer, [&] { ++fired; });
    s.schedule(5.0, 0, EventKind::Timer, [&] { ++fired; });
    s.runUntil(2.0);
    CHECK(fired == 1);
    CHECK(s.now() == 2.0);
    CHECK(s.pending() == 1);
    s.runUntil(5.0);
    CHECK(fired == 2);
}

TEST_CASE("scheduling into the past throws")
{
    Scheduler s;
    s.runUntil(3.0);
    CHECK_THROWS_AS(s.schedule(2.9, 0, EventKind::Timer, [] {}), SchedulingError);
    CHECK_NOTHROW(s.schedule(3.0, 0, EventKind::Timer, [] {}));
}

TEST_CASE("trace lines carry time, seq, target and kind")
{
    Scheduler s;
    std::ostringstream trace;
    s.setTrace(&trace);
    s.schedule(0.25, 7, EventKind::AppGenerate, [] {});
    s.runUntil(1.0);
    const std::string line = trace.str();
    CHECK(line.find('\t') != std::string::npos);
    CHECK(line.find("7") != std::string::npos);
    CHECK(line.find(std::string(toString(EventKind::AppGenerate))) != std::string::npos);
}
