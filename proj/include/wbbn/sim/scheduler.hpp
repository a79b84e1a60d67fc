#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace wbbn::sim
{

using Time = double; // seconds

enum class EventKind : std::uint8_t
{
    FrameStart,
    FrameEnd,
    Timer,
    AppGenerate,
    MobilityStep,
};

std::string_view toString(EventKind kind);

/// Identifies what an event acts on: a node id, a radio, or the world.
using TargetId = std::uint32_t;
inline constexpr TargetId kWorldTarget = std::numeric_limits<TargetId>::max();

using EventId = std::uint64_t;

struct Event
{
    Time time = 0.0;
    std::uint64_t seq = 0;
    TargetId target = kWorldTarget;
    EventKind kind = EventKind::Timer;
    std::function<void()> action;
};

/// Raised when a model tries to schedule into the past.
class SchedulingError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// Single-threaded discrete-event engine. Events are totally ordered by
/// (time, seq); seq is issued at scheduling so equal-time events run in the
/// order they were scheduled.
class Scheduler
{
public:
    Scheduler() = default;
    Scheduler(const Scheduler &) = delete;
    Scheduler &operator=(const Scheduler &) = delete;

    Time now() const { return m_now; }

    /// Schedules at absolute time `at`. Throws SchedulingError if at < now().
    EventId schedule(Time at, TargetId target, EventKind kind, std::function<void()> action);

    EventId scheduleIn(Time delay, TargetId target, EventKind kind, std::function<void()> action)
    {
        return schedule(m_now + delay, target, kind, std::move(action));
    }

    /// Cancelled events are skipped when dequeued and not counted.
    void cancel(EventId id);

    /// Processes every event with time <= tEnd, then sets the clock to tEnd.
    std::uint64_t runUntil(Time tEnd);

    std::size_t pending() const { return m_queue.size() - m_cancelled.size(); }
    std::uint64_t processed() const { return m_processed; }

    /// Tab-separated trace: time, seq, target, kind. nullptr disables.
    void setTrace(std::ostream *out) { m_trace = out; }

private:
    struct Later
    {
        bool operator()(const Event &a, const Event &b) const
        {
            if (a.time != b.time)
            {
                return a.time > b.time;
            }
            return a.seq > b.seq;
        }
    };

    Time m_now = 0.0;
    std::uint64_t m_nextSeq = 0;
    std::uint64_t m_processed = 0;
    std::vector<Event> m_queue; // binary heap under Later
    std::unordered_set<EventId> m_cancelled;
    std::ostream *m_trace = nullptr;
};

} // namespace wbbn::sim
