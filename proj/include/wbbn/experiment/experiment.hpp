#pragma once

#include "wbbn/experiment/config.hpp"
#include "wbbn/metrics/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wbbn::experiment
{

struct Job
{
    RunPoint point;
    int iteration = 0;
    std::uint64_t seed = 0; // base seed + iteration
};

/// Iterations of every point, point-major.
std::vector<Job> makeJobs(const ScenarioConfig &config, const std::vector<RunPoint> &points);

struct RunRecord
{
    Job job;
    metrics::RunSummary summary;
    mac::MacCounters mac;
    routing::RoutingCounters routing;
    phy::MediumCounters medium;
    std::uint64_t events = 0;
    std::string topologyDot; // iteration 0 only, when requested
};

/// Executes one job. Trace files requested by config.output land in
/// `traceDir` (skipped when empty).
RunRecord runJob(const ScenarioConfig &config, const Job &job, const std::filesystem::path &traceDir = {});

/// Reference implementation: jobs one after another.
std::vector<RunRecord> runBatchSerial(const ScenarioConfig &config, const std::vector<Job> &jobs,
                                      const std::filesystem::path &traceDir = {});

/// Same results as runBatchSerial, jobs spread over OpenMP threads
/// (threads <= 0: runtime default).
std::vector<RunRecord> runBatchParallel(const ScenarioConfig &config, const std::vector<Job> &jobs,
                                        const std::filesystem::path &traceDir = {}, int threads = 0);

struct PointAggregate
{
    RunPoint point;
    std::size_t runs = 0;
    metrics::SummaryStat prr;
    std::optional<metrics::SummaryStat> delayMs;              // over runs with deliveries
    metrics::SummaryStat energyMjPerNode;
    std::optional<metrics::SummaryStat> energyMjPerDelivered; // over runs with deliveries
    std::optional<metrics::HopStats> hops;                   // pooled over iterations
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
};

std::vector<PointAggregate> aggregate(const std::vector<RunRecord> &records);

/// Hop statistics pooled over payloads and iterations, one row per
/// (strategy, frequency, modulation, interval).
struct HopRow
{
    RunPoint series; // payload ignored
    std::optional<metrics::HopStats> hops;
};

std::vector<HopRow> hopTable(const std::vector<RunRecord> &records);

void writeRunsCsv(std::ostream &out, const std::vector<RunRecord> &records);
void writeAggregateCsv(std::ostream &out, const std::vector<PointAggregate> &rows);
void writeHopsCsv(std::ostream &out, const std::vector<HopRow> &rows);

enum class Figure
{
    Prr,
    DelayMs,
    EnergyPerNode,
    EnergyPerDelivered,
};

/// Gnuplot block layout: payload rows, one mean/ci95 column pair per series;
/// one block per interval separated by two blank lines.
void writeFigureDat(std::ostream &out, const std::vector<PointAggregate> &rows, Figure figure);

/// Writes `content` to a sibling temporary file and renames it into place.
void writeFileAtomic(const std::filesystem::path &path, const std::string &content);

/// All result files for a finished batch; returns the paths written.
std::vector<std::filesystem::path> writeOutputs(const ScenarioConfig &config, const std::vector<RunRecord> &records,
                                                const std::filesystem::path &dir);

} // namespace wbbn::experiment
