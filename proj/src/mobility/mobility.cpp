#include "wbbn/mobility/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace wbbn::mobility
{

namespace
{

constexpr double kWristSwing = 0.30;
constexpr double kAnkleSwing = 0.35;
constexpr std::uint32_t kWaypointStreamNode = 0xffff0000u;

Vec3 rotateZ(const Vec3 &v, double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

// Moves `from` toward `to` by at most `step` metres; returns distance covered.
double stepToward(Vec3 &from, const Vec3 &to, double step)
{
    const Vec3 delta = to - from;
    const double dist = norm(delta);
    if (dist <= step)
    {
        from = to;
        return dist;
    }
    from = from + delta * (step / dist);
    return step;
}

} // namespace

double norm(const Vec3 &v)
{
    return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
}

double distance(const Vec3 &a, const Vec3 &b)
{
    return norm(a - b);
}

double postureSpeed(Posture posture)
{
    switch (posture)
    {
    case Posture::Sitting:
    case Posture::Standing: return 0.0;
    case Posture::Walking: return 0.5;
    case Posture::Running: return 3.0;
    }
    return 0.0;
}

double gaitPeriod(Posture posture)
{
    switch (posture)
    {
    case Posture::Walking: return 1.2;
    case Posture::Running: return 0.6;
    default: return 0.0;
    }
}

std::string_view toString(Posture posture)
{
    switch (posture)
    {
    case Posture::Sitting: return "sitting";
    case Posture::Standing: return "standing";
    case Posture::Walking: return "walking";
    case Posture::Running: return "running";
    }
    return "unknown";
}

Posture postureFromString(std::string_view name)
{
    for (Posture p : {Posture::Sitting, Posture::Standing, Posture::Walking, Posture::Running})
    {
        if (toString(p) == name)
        {
            return p;
        }
    }
    throw LayoutError("unknown posture '" + std::string(name) + "'");
}

std::array<Vec3, kSlotsPerBody> defaultNodeOffsets()
{
    return {{
        {0.0, 0.0, 1.10},   // stomach
        {0.0, 0.0, 1.70},   // head
        {0.0, -0.20, 1.45}, // right shoulder
        {0.0, -0.25, 0.90}, // right wrist
        {0.0, -0.10, 0.10}, // right ankle
    }};
}

void validate(const GroupLayout &layout)
{
    if (layout.groups < 1 || layout.membersPerGroup < 1)
    {
        throw LayoutError("group and member counts must be >= 1");
    }
    if (!(layout.intraSpacing > 0.0) || !(layout.interSpacing > 0.0))
    {
        throw LayoutError("spacings must be positive");
    }
    if (!(layout.stepInterval > 0.0) || layout.jitter < 0.0 || !(layout.fieldSize > 0.0))
    {
        throw LayoutError("step interval and field size must be positive, jitter non-negative");
    }
    if (layout.postureSchedule.empty())
    {
        throw LayoutError("posture schedule must not be empty");
    }
    for (const auto &step : layout.postureSchedule)
    {
        if (!(step.duration > 0.0))
        {
            throw LayoutError("posture schedule durations must be positive");
        }
    }
    const auto formation = memberFormation(layout);
    for (const auto &offset : formation)
    {
        if (norm(offset) + std::sqrt(2.0) * layout.jitter > layout.maxBodyOffset + 1e-9)
        {
            throw LayoutError("formation radius plus jitter exceeds the body offset bound");
        }
    }
}

std::vector<Vec3> memberFormation(const GroupLayout &layout)
{
    const int m = layout.membersPerGroup;
    std::vector<Vec3> offsets;
    offsets.reserve(static_cast<std::size_t>(m));
    if (m == 1)
    {
        offsets.push_back({});
        return offsets;
    }
    if (m == 2)
    {
        offsets.push_back({0.0, layout.intraSpacing / 2.0, 0.0});
        offsets.push_back({0.0, -layout.intraSpacing / 2.0, 0.0});
        return offsets;
    }
    const double radius = layout.intraSpacing / (2.0 * std::sin(std::numbers::pi / m));
    for (int k = 0; k < m; ++k)
    {
        const double angle = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / m;
        offsets.push_back({radius * std::cos(angle), radius * std::sin(angle), 0.0});
    }
    return offsets;
}

std::vector<Vec3> groupFormation(const GroupLayout &layout)
{
    std::vector<Vec3> centers;
    centers.reserve(static_cast<std::size_t>(layout.groups));
    for (int g = 0; g < layout.groups; ++g)
    {
        centers.push_back({g * layout.interSpacing, 0.0, 0.0});
    }
    return centers;
}

std::vector<BodyPose> initialLayout(const GroupLayout &layout)
{
    validate(layout);
    const auto centers = groupFormation(layout);
    const auto members = memberFormation(layout);
    const auto offsets = defaultNodeOffsets();
    std::vector<BodyPose> bodies;
    bodies.reserve(static_cast<std::size_t>(layout.groups * layout.membersPerGroup));
    for (int g = 0; g < layout.groups; ++g)
    {
        for (int m = 0; m < layout.membersPerGroup; ++m)
        {
            BodyPose pose;
            pose.bodyId = g * layout.membersPerGroup + m;
            pose.groupId = g;
            pose.referencePoint = centers[static_cast<std::size_t>(g)] + members[static_cast<std::size_t>(m)];
            pose.posture = postureAt(layout, 0.0);
            pose.nodeOffsets = offsets;
            bodies.push_back(pose);
        }
    }
    return bodies;
}

Posture postureAt(const GroupLayout &layout, double t)
{
    double cycle = 0.0;
    for (const auto &step : layout.postureSchedule)
    {
        cycle += step.duration;
    }
    double phase = std::fmod(std::max(t, 0.0), cycle);
    for (const auto &step : layout.postureSchedule)
    {
        if (phase < step.duration)
        {
            return step.posture;
        }
        phase -= step.duration;
    }
    return layout.postureSchedule.back().posture;
}

Vec3 nodePosition(const BodyPose &pose, int slot, double t)
{
    if (slot < 0 || slot >= kSlotsPerBody)
    {
        throw std::out_of_range("node slot " + std::to_string(slot) + " outside 0..4");
    }
    Vec3 local = pose.nodeOffsets[static_cast<std::size_t>(slot)];
    const double period = gaitPeriod(pose.posture);
    if (period > 0.0)
    {
        const double phase = 2.0 * std::numbers::pi * std::fmod(t, period) / period;
        if (slot == static_cast<int>(NodeSlot::RightWrist))
        {
            local.x += kWristSwing * std::sin(phase);
        }
        else if (slot == static_cast<int>(NodeSlot::RightAnkle))
        {
            local.x += kAnkleSwing * std::sin(phase + std::numbers::pi);
        }
    }
    return pose.referencePoint + rotateZ(local, pose.heading);
}

GroupMobility::GroupMobility(GroupLayout layout, std::uint64_t seed)
    : m_layout(std::move(layout)),
      m_waypointRng(seed, {sim::StreamPurpose::Mobility, kWaypointStreamNode})
{
    m_bodies = initialLayout(m_layout);
    m_memberOffsets = memberFormation(m_layout);
    m_jitter.assign(m_bodies.size(), Vec3{});
    for (const auto &body : m_bodies)
    {
        m_bodyRng.emplace_back(seed, sim::StreamId{sim::StreamPurpose::Mobility, static_cast<std::uint32_t>(body.bodyId)});
    }

    const auto centers = groupFormation(m_layout);
    Vec3 lo = centers.front();
    Vec3 hi = centers.front();
    for (std::size_t g = 0; g < centers.size(); ++g)
    {
        GroupState state;
        state.center = centers[g];
        state.formationOffset = centers[g] - centers.front();
        state.waypoint = centers[g];
        m_groups.push_back(state);
        lo.x = std::min(lo.x, centers[g].x);
        lo.y = std::min(lo.y, centers[g].y);
        hi.x = std::max(hi.x, centers[g].x);
        hi.y = std::max(hi.y, centers[g].y);
    }
    const Vec3 mid{(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0, 0.0};
    const double half = m_layout.fieldSize / 2.0;
    m_fieldMin = {mid.x - half, mid.y - half, 0.0};
    m_fieldMax = {mid.x + half, mid.y + half, 0.0};
    pickLeaderWaypoint();
}

void GroupMobility::pickLeaderWaypoint()
{
    // Keep every group's formation slot inside the field.
    double minX = 0.0, maxX = 0.0, minY = 0.0, maxY = 0.0;
    for (const auto &g : m_groups)
    {
        minX = std::min(minX, g.formationOffset.x);
        maxX = std::max(maxX, g.formationOffset.x);
        minY = std::min(minY, g.formationOffset.y);
        maxY = std::max(maxY, g.formationOffset.y);
    }
    auto draw = [this](double lo, double hi) {
        return lo <= hi ? m_waypointRng.uniform(lo, hi) : (lo + hi) / 2.0;
    };
    m_groups.front().waypoint = {draw(m_fieldMin.x - minX, m_fieldMax.x - maxX),
                                 draw(m_fieldMin.y - minY, m_fieldMax.y - maxY), 0.0};
}

void GroupMobility::advance(double dt)
{
    if (!(dt > 0.0))
    {
        throw std::invalid_argument("GroupMobility::advance: dt must be positive");
    }
    const Posture posture = postureAt(m_layout, m_now);
    const double speed = postureSpeed(posture);
    const double step = speed * dt;

    if (step > 0.0)
    {
        GroupState &leader = m_groups.front();
        double remaining = step;
        // A bounded number of waypoint hops per step; waypoints are metres apart.
        for (int hop = 0; hop < 16 && remaining > 0.0; ++hop)
        {
            const Vec3 before = leader.center;
            const Vec3 delta = leader.waypoint - before;
            if (norm(delta) > 0.0)
            {
                leader.heading = std::atan2(delta.y, delta.x);
            }
            remaining -= stepToward(leader.center, leader.waypoint, remaining);
            if (leader.center == leader.waypoint)
            {
                pickLeaderWaypoint();
            }
        }
        for (std::size_t g = 1; g < m_groups.size(); ++g)
        {
            GroupState &group = m_groups[g];
            group.waypoint = leader.center + group.formationOffset;
            const Vec3 delta = group.waypoint - group.center;
            if (norm(delta) > 0.0)
            {
                group.heading = std::atan2(delta.y, delta.x);
            }
            stepToward(group.center, group.waypoint, step);
        }
    }

    for (std::size_t i = 0; i < m_bodies.size(); ++i)
    {
        BodyPose &body = m_bodies[i];
        const GroupState &group = m_groups[static_cast<std::size_t>(body.groupId)];
        if (step > 0.0 && m_layout.jitter > 0.0)
        {
            const double jx = m_bodyRng[i].uniform(-m_layout.jitter, m_layout.jitter);
            const double jy = m_bodyRng[i].uniform(-m_layout.jitter, m_layout.jitter);
            m_jitter[i] = {jx, jy, 0.0};
        }
        Vec3 offset = m_memberOffsets[static_cast<std::size_t>(body.bodyId % m_layout.membersPerGroup)] + m_jitter[i];
        const double r = norm(offset);
        if (r > m_layout.maxBodyOffset)
        {
            offset = offset * (m_layout.maxBodyOffset / r);
        }
        body.referencePoint = group.center + offset;
        body.heading = group.heading;
    }

    m_now += dt;
    const Posture next = postureAt(m_layout, m_now);
    for (auto &body : m_bodies)
    {
        body.posture = next;
    }
}

Vec3 GroupMobility::nodePosition(int node, double t) const
{
    const int bodyId = node / kSlotsPerBody;
    if (node < 0 || bodyId >= static_cast<int>(m_bodies.size()))
    {
        throw std::out_of_range("node " + std::to_string(node) + " outside the layout");
    }
    return mobility::nodePosition(m_bodies[static_cast<std::size_t>(bodyId)], node % kSlotsPerBody, t);
}

double GroupMobility::nodeDistance(int a, int b, double t) const
{
    if (a == b)
    {
        return 0.0;
    }
    return distance(nodePosition(a, t), nodePosition(b, t));
}

void GroupMobility::dumpTrajectory(std::ostream &out, double t) const
{
    char buf[160];
    for (const auto &body : m_bodies)
    {
        for (int slot = 0; slot < kSlotsPerBody; ++slot)
        {
            const Vec3 p = mobility::nodePosition(body, slot, t);
            std::snprintf(buf, sizeof buf, "%.3f,%d,%d,%.4f,%.4f,%.4f\n", t, body.bodyId, slot, p.x, p.y, p.z);
            out << buf;
        }
    }
}

} // namespace wbbn::mobility
