#include "wbbn/experiment/config.hpp"
#include "wbbn/experiment/experiment.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace wbbn;

namespace
{

struct Options
{
    std::string configPath;
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations;
    std::optional<std::string> output;
    bool traceEvents = false;
    bool traceTrajectory = false;
    bool traceRoutes = false;
    bool noTopology = false;
    int threads = 0;
    bool serial = false;
    bool quiet = false;

    std::vector<std::string> strategies;
    std::vector<int> frequencies;
    std::vector<std::string> modulations;
    std::vector<std::uint32_t> payloads;
    std::vector<double> intervals;
};

void addCommon(CLI::App *cmd, Options &o)
{
    cmd->add_option("config", o.configPath, "scenario file (JSON)")->required();
    cmd->add_option("--seed", o.seed, "base seed; iteration k uses seed + k");
    cmd->add_option("--iterations", o.iterations, "iterations per point")->check(CLI::PositiveNumber);
    cmd->add_option("-o,--output", o.output, "output directory (overrides $WBBN_OUTPUT_DIR and the config)");
    cmd->add_flag("--trace-events", o.traceEvents, "write per-run event logs");
    cmd->add_flag("--trace-trajectory", o.traceTrajectory, "write per-run node trajectories");
    cmd->add_flag("--trace-routes", o.traceRoutes, "write per-run route table snapshots");
    cmd->add_flag("--no-topology", o.noTopology, "skip DOT topology export");
    cmd->add_option("-j,--threads", o.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--serial", o.serial, "run jobs one after another on the calling thread");
    cmd->add_flag("-q,--quiet", o.quiet, "no per-point summary");
}

void applyOverrides(experiment::ScenarioConfig &cfg, const Options &o)
{
    if (o.seed)
    {
        cfg.seed = *o.seed;
    }
    if (o.iterations)
    {
        cfg.iterations = *o.iterations;
    }
    if (o.output)
    {
        cfg.output.directory = *o.output;
    }
    else if (const char *env = std::getenv("WBBN_OUTPUT_DIR"); env && *env)
    {
        cfg.output.directory = env;
    }
    cfg.output.events = cfg.output.events || o.traceEvents;
    cfg.output.trajectory = cfg.output.trajectory || o.traceTrajectory;
    cfg.output.routes = cfg.output.routes || o.traceRoutes;
    if (o.noTopology)
    {
        cfg.output.topology = false;
    }

    if (!o.strategies.empty())
    {
        cfg.sweep.strategies.clear();
        for (const auto &s : o.strategies)
        {
            cfg.sweep.strategies.push_back(dissemination::strategyFromString(s));
        }
    }
    if (!o.frequencies.empty())
    {
        cfg.sweep.frequenciesMhz = o.frequencies;
    }
    if (!o.modulations.empty())
    {
        cfg.sweep.modulations.clear();
        for (const auto &m : o.modulations)
        {
            cfg.sweep.modulations.push_back(phy::modulationFromString(m));
        }
    }
    if (!o.payloads.empty())
    {
        cfg.sweep.payloads = o.payloads;
    }
    if (!o.intervals.empty())
    {
        cfg.sweep.intervals = o.intervals;
    }
}

void printSummary(const std::vector<experiment::PointAggregate> &rows)
{
    for (const auto &r : rows)
    {
        std::printf("%-36s runs=%zu prr=%.4f", r.point.label().c_str(), r.runs, r.prr.mean);
        if (r.prr.ci95)
        {
            std::printf("±%.4f", *r.prr.ci95);
        }
        if (r.delayMs)
        {
            std::printf(" delay=%.2fms", r.delayMs->mean);
        }
        else
        {
            std::printf(" delay=undefined");
        }
        std::printf(" energy/node=%.3fmJ", r.energyMjPerNode.mean);
        if (r.hops)
        {
            std::printf(" hops=%u/%.2f/%u", r.hops->min, r.hops->avg, r.hops->max);
        }
        std::printf("\n");
    }
}

int execute(const Options &o, bool sweep)
{
    experiment::ScenarioConfig cfg;
    std::vector<experiment::RunPoint> points;
    try
    {
        cfg = experiment::loadConfig(o.configPath);
        applyOverrides(cfg, o);
        // Reparse the echo so overrides pass through the same validation.
        cfg = experiment::parseConfig(experiment::toJsonText(cfg), o.configPath + " (with overrides)");
        points = sweep ? experiment::sweepPoints(cfg) : std::vector{experiment::scenarioPoint(cfg)};
        experiment::validatePoints(cfg, points);
    }
    catch (const std::exception &e)
    {
        std::cerr << "wbbn: " << e.what() << '\n';
        return 1;
    }

    try
    {
        const std::filesystem::path dir = cfg.output.directory;
        std::filesystem::create_directories(dir);
        const bool tracing = cfg.output.events || cfg.output.trajectory || cfg.output.routes;
        const std::filesystem::path traceDir = tracing ? dir / "traces" : std::filesystem::path{};
        if (tracing)
        {
            std::filesystem::create_directories(traceDir);
        }

        const auto jobs = experiment::makeJobs(cfg, points);
        const auto started = std::chrono::steady_clock::now();
        const auto records = o.serial ? experiment::runBatchSerial(cfg, jobs, traceDir)
                                      : experiment::runBatchParallel(cfg, jobs, traceDir, o.threads);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        const auto written = experiment::writeOutputs(cfg, records, dir);
        if (!o.quiet)
        {
            printSummary(experiment::aggregate(records));
            std::printf("%zu runs in %.1f s; %zu files in %s\n", records.size(), seconds, written.size(),
                        dir.string().c_str());
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "wbbn: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Body-to-body network simulator: clustered vs distributed dissemination"};
    app.require_subcommand(1);

    Options runOpts;
    auto *run = app.add_subcommand("run", "run the scenario point of a config for every iteration");
    addCommon(run, runOpts);

    Options sweepOpts;
    auto *sweep = app.add_subcommand("sweep", "run the Cartesian product of the sweep axes");
    addCommon(sweep, sweepOpts);
    sweep->add_option("--strategies", sweepOpts.strategies, "clustered,distributed")->delimiter(',');
    sweep->add_option("--frequencies", sweepOpts.frequencies, "900,2450")->delimiter(',');
    sweep->add_option("--modulations", sweepOpts.modulations, "dbpsk,dqpsk")->delimiter(',');
    sweep->add_option("--payloads", sweepOpts.payloads, "payload bytes, e.g. 16,64,256")->delimiter(',');
    sweep->add_option("--intervals", sweepOpts.intervals, "CBR intervals in seconds")->delimiter(',');

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (run->parsed())
    {
        return execute(runOpts, false);
    }
    return execute(sweepOpts, true);
}
