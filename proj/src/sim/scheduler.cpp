#include "wbbn/sim/scheduler.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

namespace wbbn::sim
{

std::string_view toString(EventKind kind)
{
    switch (kind)
    {
    case EventKind::FrameStart: return "frame-start";
    case EventKind::FrameEnd: return "frame-end";
    case EventKind::Timer: return "timer";
    case EventKind::AppGenerate: return "app-generate";
    case EventKind::MobilityStep: return "mobility-step";
    }
    return "unknown";
}

EventId Scheduler::schedule(Time at, TargetId target, EventKind kind, std::function<void()> action)
{
    if (!(at >= m_now))
    {
        throw SchedulingError("cannot schedule event at t=" + std::to_string(at) +
                              " before current time " + std::to_string(m_now));
    }
    const EventId seq = m_nextSeq++;
    m_queue.push_back(Event{at, seq, target, kind, std::move(action)});
    std::push_heap(m_queue.begin(), m_queue.end(), Later{});
    return seq;
}

void Scheduler::cancel(EventId id)
{
    if (id < m_nextSeq)
    {
        m_cancelled.insert(id);
    }
}

std::uint64_t Scheduler::runUntil(Time tEnd)
{
    std::uint64_t count = 0;
    while (!m_queue.empty() && m_queue.front().time <= tEnd)
    {
        std::pop_heap(m_queue.begin(), m_queue.end(), Later{});
        Event ev = std::move(m_queue.back());
        m_queue.pop_back();
        if (!m_cancelled.empty())
        {
            if (auto it = m_cancelled.find(ev.seq); it != m_cancelled.end())
            {
                m_cancelled.erase(it);
                continue;
            }
        }
        m_now = ev.time;
        if (m_trace != nullptr)
        {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.9f", ev.time);
            *m_trace << buf << '\t' << ev.seq << '\t';
            if (ev.target == kWorldTarget)
            {
                *m_trace << "world";
            }
            else
            {
                *m_trace << ev.target;
            }
            *m_trace << '\t' << toString(ev.kind) << '\n';
        }
        ++count;
        ++m_processed;
        if (ev.action)
        {
            ev.action();
        }
    }
    if (tEnd > m_now)
    {
        m_now = tEnd;
    }
    return count;
}

} // namespace wbbn::sim
