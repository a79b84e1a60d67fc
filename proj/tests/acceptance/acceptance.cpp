// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
//
//   wbbn_acceptance [output-dir]
//
// When an output directory is given the shared sweep is written there in the
// usual result layout.

#include "wbbn/experiment/experiment.hpp"
#include "wbbn/metrics/metrics.hpp"
#include "wbbn/phy/phy.hpp"

#include "ber_oracle.hpp"
#include "ideal_net.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wbbn;
using experiment::PointAggregate;
using experiment::RunPoint;
using experiment::RunRecord;
using dissemination::Strategy;
using phy::Modulation;

namespace
{

int failures = 0;

void verdict(int criterion, bool pass, const std::string &summary)
{
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", summary.c_str());
    std::fflush(stdout);
    if (!pass)
    {
        ++failures;
    }
}

void detail(const std::string &line)
{
    std::printf("    %s\n", line.c_str());
}

std::string fmt(const char *f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// ---------------------------------------------------------------------------

void energyExactness()
{
    const double e = phy::packetEnergy(1e-3, 17.4);
    const double want = 52.2e-6;
    const double ulps = std::abs(e - want) / (std::numeric_limits<double>::epsilon() * want);
    verdict(1, ulps <= 2.0, "packet energy 1 ms @ 17.4 mA = " + fmt("%.17g", e) + " J (" + fmt("%.1f", ulps) +
                                " ulp from 52.2 uJ)");
}

void berOracles()
{
    bool dbpsk = true;
    double worstDqpsk = 0.0;
    for (double g : {0.1, 1.0, 5.0, 10.0, 20.0})
    {
        dbpsk = dbpsk && phy::berDbpsk(g) == 0.5 * std::exp(-g);
        worstDqpsk = std::max(worstDqpsk, std::abs(phy::berDqpsk(g) - testing::dqpskBerOracle(g)));
    }
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> logBer(-9.0, -0.3);
    std::uniform_int_distribution<std::uint64_t> bits(1, 20000);
    long double worstPer = 0.0L;
    for (int i = 0; i < 100; ++i)
    {
        const double b = std::pow(10.0, logBer(rng));
        const std::uint64_t n = bits(rng);
        const long double oracle = 1.0L - std::pow(1.0L - static_cast<long double>(b), static_cast<long double>(n));
        worstPer = std::max(worstPer, std::abs(static_cast<long double>(phy::per(b, n)) - oracle));
    }
    const bool pass = dbpsk && worstDqpsk <= 1e-9 && worstPer <= 1e-12L;
    verdict(2, pass, std::string("DBPSK exact: ") + (dbpsk ? "yes" : "no") + ", DQPSK max |diff| " +
                         fmt("%.2e", worstDqpsk) + ", PER max |diff| " + fmt("%.2e", static_cast<double>(worstPer)));
}

void routingOptimality()
{
    const auto started = std::chrono::steady_clock::now();
    const auto r = testing::routingOptimality(2024, 60, 20);
    const bool pass = r.graphs >= 50 && r.found > 0 && r.mismatches == 0 && r.impossible == 0 &&
                      r.brokenChains == 0 && r.undelivered == 0;
    verdict(3, pass,
            std::to_string(r.graphs) + " graphs, " + std::to_string(r.found) + " discoveries, " +
                std::to_string(r.mismatches) + " not shortest (" + fmt("%.1f s", seconds(started)) + ")");
    detail(std::to_string(r.routesChecked) + " installed routes checked: " + std::to_string(r.impossible) +
           " shorter than possible, " + std::to_string(r.brokenChains) + " broken next-hop chains, " +
           std::to_string(r.undelivered) + " undelivered");
}

// ---------------------------------------------------------------------------

struct Config
{
    Strategy strategy;
    int mhz;
    Modulation modulation;

    std::string name() const
    {
        RunPoint p;
        p.strategy = strategy;
        p.frequencyMhz = mhz;
        p.modulation = modulation;
        return p.series();
    }
};

const std::vector<std::uint32_t> kPayloads{16, 32, 64, 128, 256, 512, 1024};

const std::vector<Config> kTrendConfigs{
    {Strategy::Clustered, 900, Modulation::Dqpsk},   {Strategy::Clustered, 2450, Modulation::Dqpsk},
    {Strategy::Distributed, 900, Modulation::Dqpsk}, {Strategy::Distributed, 2450, Modulation::Dqpsk},
    {Strategy::Clustered, 900, Modulation::Dbpsk},   {Strategy::Clustered, 2450, Modulation::Dbpsk},
};

struct Sweep
{
    std::vector<RunRecord> records;
    std::vector<PointAggregate> rows;
    std::map<std::string, const PointAggregate *> byLabel;
    std::map<std::string, metrics::HopStats> hops; // per series, all payloads and iterations

    const PointAggregate &at(const Config &c, std::uint32_t payload) const
    {
        RunPoint p;
        p.strategy = c.strategy;
        p.frequencyMhz = c.mhz;
        p.modulation = c.modulation;
        p.payloadBytes = payload;
        return *byLabel.at(p.label());
    }
};

Sweep runSweep(const experiment::ScenarioConfig &cfg)
{
    std::vector<RunPoint> points;
    for (const auto &c : kTrendConfigs)
    {
        for (auto payload : kPayloads)
        {
            RunPoint p = experiment::scenarioPoint(cfg);
            p.strategy = c.strategy;
            p.frequencyMhz = c.mhz;
            p.modulation = c.modulation;
            p.payloadBytes = payload;
            points.push_back(p);
        }
    }
    experiment::validatePoints(cfg, points);
    Sweep s;
    s.records = experiment::runBatchParallel(cfg, experiment::makeJobs(cfg, points));
    s.rows = experiment::aggregate(s.records);
    for (const auto &row : s.rows)
    {
        s.byLabel[row.point.label()] = &row;
    }
    for (const auto &h : experiment::hopTable(s.records))
    {
        if (h.hops)
        {
            s.hops[h.series.series()] = *h.hops;
        }
    }
    return s;
}

void determinism(const experiment::ScenarioConfig &cfg, const Sweep &sweep)
{
    const auto started = std::chrono::steady_clock::now();
    const RunPoint point = experiment::scenarioPoint(cfg);
    std::vector<RunRecord> first;
    for (const auto &r : sweep.records)
    {
        if (r.job.point.label() == point.label())
        {
            first.push_back(r);
        }
    }
    const auto second = experiment::runBatchSerial(cfg, experiment::makeJobs(cfg, {point}));
    std::ostringstream a;
    std::ostringstream b;
    experiment::writeRunsCsv(a, first);
    experiment::writeRunsCsv(b, second);
    const bool pass = first.size() == static_cast<std::size_t>(cfg.iterations) && a.str() == b.str();
    verdict(4, pass,
            point.label() + " x" + std::to_string(cfg.iterations) + ": parallel and serial runs.csv " +
                (a.str() == b.str() ? "byte-identical" : "DIFFER") + " (" + std::to_string(a.str().size()) +
                " bytes, rerun " + fmt("%.1f s", seconds(started)) + ")");
}

void prrTrend(const Sweep &sweep, double elapsed)
{
    bool pass = true;
    std::vector<std::string> lines;
    for (const auto &c : kTrendConfigs)
    {
        int inversions = 0;
        double worst = 0.0;
        std::string series;
        for (std::size_t i = 0; i < kPayloads.size(); ++i)
        {
            const double prr = sweep.at(c, kPayloads[i]).prr.mean;
            series += fmt(i == 0 ? "%.3f" : " %.3f", prr);
            if (i > 0)
            {
                const double rise = prr - sweep.at(c, kPayloads[i - 1]).prr.mean;
                if (rise > 0.0)
                {
                    ++inversions;
                    worst = std::max(worst, rise);
                }
            }
        }
        const bool ok = inversions == 0 || (inversions == 1 && worst <= 0.02);
        pass = pass && ok;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-22s %s  inversions=%d max_rise=%.3f %s", c.name().c_str(), series.c_str(),
                      inversions, worst, ok ? "ok" : "VIOLATION");
        lines.push_back(buf);
    }
    verdict(5, pass,
            std::to_string(kTrendConfigs.size()) + " configs x " + std::to_string(kPayloads.size()) +
                " payloads, PRR non-increasing in payload (sweep " + fmt("%.0f s", elapsed) + ")");
    detail("mean PRR at 16 32 64 128 256 512 1024 B:");
    for (const auto &l : lines)
    {
        detail(l);
    }
}

std::vector<RunRecord> saturation(const experiment::ScenarioConfig &base)
{
    experiment::ScenarioConfig cfg = base;
    cfg.strategy = Strategy::Distributed;
    cfg.frequencyMhz = 900;
    cfg.modulation = Modulation::Dbpsk;
    cfg.payloadBytes = 256;
    cfg.intervalS = 1.0;
    const auto records = experiment::runBatchParallel(cfg, experiment::makeJobs(cfg, {experiment::scenarioPoint(cfg)}));
    const auto rows = experiment::aggregate(records);
    const auto &row = rows.at(0);

    // Every run (and the aggregate) without deliveries must carry the undefined delay marker.
    std::ostringstream runsCsv;
    experiment::writeRunsCsv(runsCsv, records);
    std::istringstream lines(runsCsv.str());
    std::string line;
    std::getline(lines, line);
    std::size_t zeroRuns = 0;
    bool markers = true;
    for (const auto &r : records)
    {
        std::getline(lines, line);
        if (r.summary.delivered == 0)
        {
            ++zeroRuns;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            for (std::string cell; std::getline(ss, cell, ',');)
            {
                cells.push_back(cell);
            }
            markers = markers && cells.size() > 12 && cells[12] == "undefined";
        }
    }
    std::ostringstream aggCsv;
    experiment::writeAggregateCsv(aggCsv, rows);
    if (row.delivered == 0)
    {
        markers = markers && aggCsv.str().find(",undefined,") != std::string::npos;
    }
    const bool pass = row.prr.mean < 0.20 && markers;
    verdict(6, pass,
            "distributed_900_dbpsk 256 B @ 1 s: mean PRR " + fmt("%.4f", row.prr.mean) + " (< 0.20), " +
                std::to_string(zeroRuns) + "/" + std::to_string(records.size()) +
                " runs without deliveries, undefined delay marker " + (markers ? "present" : "MISSING"));
    if (row.delayMs)
    {
        detail("mean delay over runs with deliveries: " + fmt("%.1f ms", row.delayMs->mean));
    }
    return records;
}

void clusteredQuality(const Sweep &sweep)
{
    const auto &row = sweep.at({Strategy::Clustered, 2450, Modulation::Dqpsk}, 16);
    const double ci = row.prr.ci95.value_or(0.0);
    verdict(7, row.prr.mean >= 0.85,
            "clustered_2450_dqpsk 16 B @ 1 s: mean PRR " + fmt("%.4f", row.prr.mean) + " +/- " + fmt("%.4f", ci) +
                " (>= 0.85)");
}

void hopOrdering(const Sweep &sweep)
{
    bool pass = true;
    std::vector<std::string> notes;
    auto stats = [&](const Config &c) { return sweep.hops.at(c.name()); };
    for (const auto &c : kTrendConfigs)
    {
        const auto h = stats(c);
        const bool ok = h.min == 1 && h.max <= 8;
        pass = pass && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-22s min %u avg %.3f max %u over %llu deliveries%s", c.name().c_str(), h.min,
                      h.avg, h.max, static_cast<unsigned long long>(h.count), ok ? "" : "  BOUNDS VIOLATED");
        notes.push_back(buf);
    }
    std::string orderings;
    for (int mhz : {900, 2450})
    {
        const double c = stats({Strategy::Clustered, mhz, Modulation::Dqpsk}).avg;
        const double d = stats({Strategy::Distributed, mhz, Modulation::Dqpsk}).avg;
        const bool ok = c < d;
        pass = pass && ok;
        orderings += " [" + std::to_string(mhz) + " DQPSK clustered " + fmt("%.2f", c) +
                     (ok ? " < " : " >= ") + "distributed " + fmt("%.2f", d) + "]";
    }
    for (int mhz : {900, 2450})
    {
        const double b = stats({Strategy::Clustered, mhz, Modulation::Dbpsk}).avg;
        const double q = stats({Strategy::Clustered, mhz, Modulation::Dqpsk}).avg;
        const bool ok = b < q;
        pass = pass && ok;
        orderings += " [" + std::to_string(mhz) + " clustered DBPSK " + fmt("%.2f", b) + (ok ? " < " : " >= ") +
                     "DQPSK " + fmt("%.2f", q) + "]";
    }
    verdict(8, pass, "hop ordering:" + orderings);
    for (const auto &n : notes)
    {
        detail(n);
    }
}

void delayOrdering(const Sweep &sweep)
{
    bool pass = true;
    std::vector<std::string> notes;
    for (int mhz : {900, 2450})
    {
        for (std::uint32_t payload : {16u, 32u, 64u})
        {
            const auto &c = sweep.at({Strategy::Clustered, mhz, Modulation::Dqpsk}, payload);
            const auto &d = sweep.at({Strategy::Distributed, mhz, Modulation::Dqpsk}, payload);
            const double cd = c.delayMs ? c.delayMs->mean : std::numeric_limits<double>::infinity();
            const double dd = d.delayMs ? d.delayMs->mean : std::numeric_limits<double>::infinity();
            const bool ordered = dd <= cd;
            const bool bounded = cd < 50.0 && dd < 50.0;
            pass = pass && ordered && bounded;
            char buf[200];
            std::snprintf(buf, sizeof buf, "%4d MHz %4u B: distributed %8.2f ms %s clustered %8.2f ms%s", mhz, payload,
                          dd, ordered ? "<=" : "> ", cd, bounded ? "" : "  (above 50 ms)");
            notes.push_back(buf);
        }
    }
    verdict(9, pass, "DQPSK 16-64 B: distributed delay <= clustered delay, both < 50 ms");
    for (const auto &n : notes)
    {
        detail(n);
    }
}

void metricsAlgebra(const Sweep &sweep, const std::vector<RunRecord> &extra)
{
    std::size_t runs = 0;
    std::size_t broken = 0;
    auto check = [&](const RunRecord &r) {
        ++runs;
        const auto &s = r.summary;
        if (s.generated != s.delivered + s.dropped + s.inFlight)
        {
            ++broken;
        }
    };
    for (const auto &r : sweep.records)
    {
        check(r);
    }
    for (const auto &r : extra)
    {
        check(r);
    }
    const std::vector<double> flat(10, 0.3);
    const auto constant = metrics::ci95(flat);
    std::vector<double> ramp;
    for (int i = 1; i <= 10; ++i)
    {
        ramp.push_back(i);
    }
    const auto r = metrics::ci95(ramp);
    const bool pass = broken == 0 && constant.ci95 && *constant.ci95 == 0.0 && r.ci95 &&
                      std::abs(*r.ci95 - 2.166) <= 0.001;
    verdict(10, pass,
            "conservation held in " + std::to_string(runs - broken) + "/" + std::to_string(runs) +
                " runs; ci95(constant) = " + fmt("%g", constant.ci95.value_or(-1.0)) + "; ci95(1..10) = " +
                fmt("%.4f", r.ci95.value_or(-1.0)));
}

} // namespace

int main(int argc, char **argv)
{
    const auto started = std::chrono::steady_clock::now();
    energyExactness();
    berOracles();
    routingOptimality();

    // The default scenario: clustered, 2450 MHz, DQPSK, 16 B every 1 s, 60 s, 10 iterations.
    const experiment::ScenarioConfig cfg = experiment::parseConfig("{}", "<defaults>");

    const auto sweepStarted = std::chrono::steady_clock::now();
    const Sweep sweep = runSweep(cfg);
    const double sweepSeconds = seconds(sweepStarted);

    determinism(cfg, sweep);
    prrTrend(sweep, sweepSeconds);

    const auto satRecords = saturation(cfg);

    clusteredQuality(sweep);
    hopOrdering(sweep);
    delayOrdering(sweep);
    metricsAlgebra(sweep, satRecords);

    if (argc > 1)
    {
        experiment::writeOutputs(cfg, sweep.records, argv[1]);
        detail(std::string("sweep results written to ") + argv[1]);
    }
    std::printf("%d of 10 criteria passed (%.0f s)\n", 10 - failures, seconds(started));
    return failures == 0 ? 0 : 1;
}
