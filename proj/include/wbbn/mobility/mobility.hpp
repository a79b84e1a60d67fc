#pragma once

#include "wbbn/sim/random.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace wbbn::mobility
{

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3 &) const = default;
};

double norm(const Vec3 &v);
double distance(const Vec3 &a, const Vec3 &b);

enum class Posture : std::uint8_t
{
    Sitting,
    Standing,
    Walking,
    Running,
};

/// Sitting/Standing 0, Walking 0.5 m/s, Running 3 m/s.
double postureSpeed(Posture posture);
/// Limb swing period; zero for static postures.
double gaitPeriod(Posture posture);
std::string_view toString(Posture posture);
Posture postureFromString(std::string_view name);

inline constexpr int kSlotsPerBody = 5;

/// On-body placement. Slot numbers match the node numbering of the scenario.
enum class NodeSlot : std::uint8_t
{
    Stomach = 0,
    Head = 1,
    RightShoulder = 2,
    RightWrist = 3,
    RightAnkle = 4,
};

struct BodyPose
{
    int bodyId = 0;
    int groupId = 0;
    Vec3 referencePoint; // ground point below the body
    double heading = 0.0; // radians, 0 = +x
    Posture posture = Posture::Standing;
    std::array<Vec3, kSlotsPerBody> nodeOffsets{}; // body frame: x forward, y left, z up
};

/// Static on-body template for the five node slots.
std::array<Vec3, kSlotsPerBody> defaultNodeOffsets();

struct PostureStep
{
    Posture posture;
    double duration; // seconds
};

struct GroupLayout
{
    int groups = 4;
    int membersPerGroup = 3;
    double intraSpacing = 8.0;  // nearest-neighbour body spacing inside a group
    double interSpacing = 20.0; // adjacent group-centre spacing
    double fieldSize = 100.0;   // square field side for group waypoints
    double stepInterval = 0.1;  // mobility step
    double jitter = 0.5;        // uniform +/- per horizontal axis while moving
    double maxBodyOffset = 6.0; // bound on body-to-group-centre distance
    std::vector<PostureStep> postureSchedule{
        {Posture::Standing, 10.0},
        {Posture::Walking, 20.0},
        {Posture::Running, 10.0},
        {Posture::Sitting, 10.0},
    };
};

class LayoutError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

void validate(const GroupLayout &layout);

/// Formation offsets of each member around its group centre; an equilateral
/// polygon whose nearest-neighbour side equals intraSpacing.
std::vector<Vec3> memberFormation(const GroupLayout &layout);

/// Group centres along a column, spaced interSpacing apart, leader group first.
std::vector<Vec3> groupFormation(const GroupLayout &layout);

/// Bodies at t = 0; body i belongs to group i / membersPerGroup.
std::vector<BodyPose> initialLayout(const GroupLayout &layout);

/// Posture active at time t under the cyclic schedule.
Posture postureAt(const GroupLayout &layout, double t);

/// Node position at time t: reference + rotated template offset + limb swing
/// for the wrist and ankle when walking or running.
Vec3 nodePosition(const BodyPose &pose, int slot, double t);

/// Reference-point group mobility for the whole formation.
///
/// Group 0 runs a random waypoint walk inside the field; every other group
/// steers toward the leader's position plus its own formation offset, so the
/// column keeps its shape when all groups share a posture. Bodies track their
/// formation slot with a fresh uniform jitter each step while moving.
class GroupMobility
{
public:
    GroupMobility(GroupLayout layout, std::uint64_t seed);

    /// Advances the formation by dt (dt > 0) ending at time now() + dt.
    void advance(double dt);

    double now() const { return m_now; }
    std::span<const BodyPose> bodies() const { return m_bodies; }
    const BodyPose &body(int bodyId) const { return m_bodies.at(static_cast<std::size_t>(bodyId)); }
    Vec3 groupCenter(int group) const { return m_groups.at(static_cast<std::size_t>(group)).center; }
    const GroupLayout &layout() const { return m_layout; }

    int nodeCount() const { return static_cast<int>(m_bodies.size()) * kSlotsPerBody; }
    Vec3 nodePosition(int node, double t) const;
    double nodeDistance(int a, int b, double t) const;

    /// Writes rows "t,body_id,node_slot,x,y,z" for time t.
    void dumpTrajectory(std::ostream &out, double t) const;

private:
    struct GroupState
    {
        Vec3 center;
        Vec3 formationOffset; // relative to the leader group at t=0
        Vec3 waypoint;
        double heading = 0.0;
    };

    void pickLeaderWaypoint();

    GroupLayout m_layout;
    std::vector<GroupState> m_groups;
    std::vector<BodyPose> m_bodies;
    std::vector<Vec3> m_memberOffsets;
    std::vector<Vec3> m_jitter;
    sim::RandomStream m_waypointRng;
    std::vector<sim::RandomStream> m_bodyRng;
    Vec3 m_fieldMin;
    Vec3 m_fieldMax;
    double m_now = 0.0;
};

} // namespace wbbn::mobility
