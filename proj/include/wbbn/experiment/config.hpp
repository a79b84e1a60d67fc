#pragma once

#include "wbbn/dissemination/network.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wbbn::experiment
{

/// Invalid scenario document. `line()` is 0 when no single line is to blame.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string &message, int line) : std::runtime_error(message), m_line(line) {}
    int line() const { return m_line; }

private:
    int m_line;
};

struct ChannelBlock
{
    bool shadowing = true;
    double shadowCoherence = 1.0;
    std::map<int, phy::ChannelParams> onBody;     // keyed by MHz
    std::map<int, phy::ChannelParams> bodyToBody; // keyed by MHz
    phy::RadioEnvironment radio;
};

struct OutputOptions
{
    std::string directory = "wbbn-out";
    bool events = false;
    bool trajectory = false;
    bool routes = false;
    bool topology = true;
};

struct SweepAxes
{
    std::vector<dissemination::Strategy> strategies{dissemination::Strategy::Clustered,
                                                    dissemination::Strategy::Distributed};
    std::vector<int> frequenciesMhz{900, 2450};
    std::vector<phy::Modulation> modulations{phy::Modulation::Dbpsk, phy::Modulation::Dqpsk};
    std::vector<std::uint32_t> payloads{16, 32, 64, 128, 256, 512, 1024};
    std::vector<double> intervals; // empty: the scenario's interval
};

struct ScenarioConfig
{
    dissemination::Strategy strategy = dissemination::Strategy::Clustered;
    int frequencyMhz = 2450;
    phy::Modulation modulation = phy::Modulation::Dqpsk;
    std::uint32_t payloadBytes = 16;
    double intervalS = 1.0;
    double durationS = 60.0;
    int iterations = 10;
    std::uint64_t seed = 1;
    int leaderBody = 0;
    int coordinatorSlot = 0;
    double txPowerDbm = 0.0;
    mobility::GroupLayout layout;
    ChannelBlock channel;
    mac::MacParams mac; // slot and sifs come from the microsecond fields below
    double macSlotUs = 145.0;
    double macSifsUs = 75.0;
    routing::DymoParams routing;
    std::size_t relayQueue = 50;
    phy::EnergyModel energy;
    OutputOptions output;
    SweepAxes sweep;

    ScenarioConfig();
};

/// One (strategy, band, modulation, payload, interval) combination.
struct RunPoint
{
    dissemination::Strategy strategy = dissemination::Strategy::Clustered;
    int frequencyMhz = 2450;
    phy::Modulation modulation = phy::Modulation::Dqpsk;
    std::uint32_t payloadBytes = 16;
    double intervalS = 1.0;

    /// e.g. "clustered_2450_dqpsk_16B_1s"
    std::string label() const;
    /// e.g. "clustered_2450_dqpsk"
    std::string series() const;
};

/// Parses a JSON scenario. Unknown keys, wrong types and out-of-range values
/// raise ConfigError with "<source>:<line>: <key path>: <reason>".
ScenarioConfig parseConfig(const std::string &text, const std::string &source = "<config>");
ScenarioConfig loadConfig(const std::filesystem::path &path);

/// Effective configuration (every default filled in) as pretty JSON;
/// parseConfig of this text yields an identical configuration.
std::string toJsonText(const ScenarioConfig &config);

RunPoint scenarioPoint(const ScenarioConfig &config);
std::vector<RunPoint> sweepPoints(const ScenarioConfig &config);

/// Network configuration for one run of `point`.
dissemination::NetworkConfig networkConfig(const ScenarioConfig &config, const RunPoint &point, std::uint64_t seed);

/// Validates every point before anything runs.
void validatePoints(const ScenarioConfig &config, const std::vector<RunPoint> &points);

} // namespace wbbn::experiment
