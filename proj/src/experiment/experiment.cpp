#include "wbbn/experiment/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wbbn::experiment
{
namespace
{

constexpr const char *kUndefined = "undefined";
constexpr const char *kDropCauses[] = {"mac-queue", "mac-retry", "no-route", "discovery-buffer", "relay-queue",
                                       "hop-limit"};

std::string fixed(double v, int precision = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string optionalFixed(const std::optional<double> &v, const char *missing, int precision = 6)
{
    return v ? fixed(*v, precision) : std::string(missing);
}

std::string intervalText(double v)
{
    std::ostringstream out;
    out << v;
    return out.str();
}

std::string pointColumns(const RunPoint &p)
{
    return std::string(dissemination::toString(p.strategy)) + "," + std::to_string(p.frequencyMhz) + "," +
           std::string(phy::toString(p.modulation)) + "," + std::to_string(p.payloadBytes) + "," +
           intervalText(p.intervalS);
}

auto seriesKey(const RunPoint &p)
{
    return std::make_tuple(p.strategy, p.frequencyMhz, p.modulation, p.intervalS);
}

std::optional<metrics::HopStats> poolHops(const std::vector<metrics::HopStats> &parts)
{
    std::optional<metrics::HopStats> pooled;
    double sum = 0.0;
    for (const auto &h : parts)
    {
        if (h.count == 0)
        {
            continue;
        }
        if (!pooled)
        {
            pooled = h;
            pooled->count = 0;
        }
        pooled->min = std::min(pooled->min, h.min);
        pooled->max = std::max(pooled->max, h.max);
        pooled->count += h.count;
        sum += h.avg * static_cast<double>(h.count);
    }
    if (pooled)
    {
        pooled->avg = sum / static_cast<double>(pooled->count);
    }
    return pooled;
}

void writeTrace(const std::filesystem::path &path, const std::string &content)
{
    writeFileAtomic(path, content);
}

} // namespace

std::vector<Job> makeJobs(const ScenarioConfig &config, const std::vector<RunPoint> &points)
{
    std::vector<Job> jobs;
    for (const auto &point : points)
    {
        for (int i = 0; i < config.iterations; ++i)
        {
            jobs.push_back({point, i, config.seed + static_cast<std::uint64_t>(i)});
        }
    }
    return jobs;
}

RunRecord runJob(const ScenarioConfig &config, const Job &job, const std::filesystem::path &traceDir)
{
    const dissemination::NetworkConfig net = networkConfig(config, job.point, job.seed);
    const bool tracing = !traceDir.empty();
    std::ostringstream events;
    std::ostringstream trajectory;
    std::ostringstream routes;
    dissemination::TraceSinks sinks;
    if (tracing && config.output.events)
    {
        sinks.events = &events;
    }
    if (tracing && config.output.trajectory)
    {
        sinks.trajectory = &trajectory;
    }
    if (tracing && config.output.routes)
    {
        sinks.routes = &routes;
    }

    const dissemination::RunResult result = dissemination::runNetwork(net, sinks);

    RunRecord record;
    record.job = job;
    record.summary = metrics::summarize(result.packets, result.energy);
    record.mac = result.mac;
    record.routing = result.routing;
    record.medium = result.medium;
    record.events = result.events;
    if (config.output.topology && job.iteration == 0)
    {
        std::ostringstream dot;
        dissemination::writeTopologyDot(dot, result);
        record.topologyDot = dot.str();
    }
    if (tracing)
    {
        std::error_code ignore;
        std::filesystem::create_directories(traceDir, ignore);
        const std::string stem = job.point.label() + "_it" + std::to_string(job.iteration);
        if (sinks.events)
        {
            writeTrace(traceDir / (stem + ".events.tsv"), events.str());
        }
        if (sinks.trajectory)
        {
            writeTrace(traceDir / (stem + ".trajectory.csv"), trajectory.str());
        }
        if (sinks.routes)
        {
            writeTrace(traceDir / (stem + ".routes.csv"), routes.str());
        }
    }
    return record;
}

std::vector<RunRecord> runBatchSerial(const ScenarioConfig &config, const std::vector<Job> &jobs,
                                      const std::filesystem::path &traceDir)
{
    std::vector<RunRecord> out;
    out.reserve(jobs.size());
    for (const auto &job : jobs)
    {
        out.push_back(runJob(config, job, traceDir));
    }
    return out;
}

std::vector<RunRecord> runBatchParallel(const ScenarioConfig &config, const std::vector<Job> &jobs,
                                        const std::filesystem::path &traceDir, int threads)
{
    std::vector<RunRecord> out(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#ifdef _OPENMP
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
#else
    (void)threads;
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i)
    {
        try
        {
            out[static_cast<std::size_t>(i)] = runJob(config, jobs[static_cast<std::size_t>(i)], traceDir);
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto &e : errors)
    {
        if (e)
        {
            std::rethrow_exception(e);
        }
    }
    return out;
}

std::vector<PointAggregate> aggregate(const std::vector<RunRecord> &records)
{
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunRecord *>> groups;
    for (const auto &r : records)
    {
        const std::string label = r.job.point.label();
        auto [it, inserted] = groups.try_emplace(label);
        if (inserted)
        {
            order.push_back(label);
        }
        it->second.push_back(&r);
    }

    std::vector<PointAggregate> rows;
    for (const auto &label : order)
    {
        const auto &runs = groups.at(label);
        PointAggregate row;
        row.point = runs.front()->job.point;
        row.runs = runs.size();
        std::vector<double> prr;
        std::vector<double> delay;
        std::vector<double> energyNode;
        std::vector<double> energyDelivered;
        std::vector<metrics::HopStats> hops;
        for (const RunRecord *r : runs)
        {
            const auto &s = r->summary;
            prr.push_back(s.prr);
            if (s.meanDelay)
            {
                delay.push_back(*s.meanDelay * 1e3);
            }
            energyNode.push_back(s.energyPerNodeJ * 1e3);
            if (s.energyPerDeliveredJ)
            {
                energyDelivered.push_back(*s.energyPerDeliveredJ * 1e3);
            }
            if (s.hops)
            {
                hops.push_back(*s.hops);
            }
            row.generated += s.generated;
            row.delivered += s.delivered;
        }
        row.prr = metrics::ci95(prr);
        if (!delay.empty())
        {
            row.delayMs = metrics::ci95(delay);
        }
        row.energyMjPerNode = metrics::ci95(energyNode);
        if (!energyDelivered.empty())
        {
            row.energyMjPerDelivered = metrics::ci95(energyDelivered);
        }
        row.hops = poolHops(hops);
        rows.push_back(row);
    }
    return rows;
}

std::vector<HopRow> hopTable(const std::vector<RunRecord> &records)
{
    using Key = decltype(seriesKey(RunPoint{}));
    std::vector<Key> order;
    std::map<Key, std::pair<RunPoint, std::vector<metrics::HopStats>>> pooled;
    for (const auto &r : records)
    {
        const Key key = seriesKey(r.job.point);
        auto [it, inserted] = pooled.try_emplace(key, r.job.point, std::vector<metrics::HopStats>{});
        if (inserted)
        {
            order.push_back(key);
        }
        if (r.summary.hops)
        {
            it->second.second.push_back(*r.summary.hops);
        }
    }
    std::vector<HopRow> rows;
    for (const auto &key : order)
    {
        const auto &[point, parts] = pooled.at(key);
        rows.push_back({point, poolHops(parts)});
    }
    return rows;
}

void writeRunsCsv(std::ostream &out, const std::vector<RunRecord> &records)
{
    out << "strategy,frequency_mhz,modulation,payload_bytes,interval_s,iteration,seed,generated,delivered,dropped,"
           "in_flight,prr,mean_delay_ms,energy_mj_per_node,energy_mj_sensor,energy_mj_coordinator,energy_mj_leader,"
           "energy_mj_per_delivered,hop_min,hop_avg,hop_max,mac_tx_attempts,mac_retransmissions,mac_drops_queue,"
           "mac_drops_retry,mac_acks_received,rreq_originated,rreq_forwarded,rrep_sent,rerr_sent,hellos_sent,"
           "discoveries_started,discoveries_failed";
    for (const char *cause : kDropCauses)
    {
        std::string column = cause;
        std::replace(column.begin(), column.end(), '-', '_');
        out << ",drops_" << column;
    }
    out << ",events\n";

    for (const auto &r : records)
    {
        const auto &s = r.summary;
        const auto role = [&](const char *name) -> std::string {
            const auto it = s.energyPerRoleJ.find(name);
            return it == s.energyPerRoleJ.end() ? std::string(kUndefined) : fixed(it->second * 1e3);
        };
        out << pointColumns(r.job.point) << ',' << r.job.iteration << ',' << r.job.seed << ',' << s.generated << ','
            << s.delivered << ',' << s.dropped << ',' << s.inFlight << ',' << fixed(s.prr) << ','
            << optionalFixed(s.meanDelay ? std::optional<double>(*s.meanDelay * 1e3) : std::nullopt, kUndefined, 3)
            << ',' << fixed(s.energyPerNodeJ * 1e3) << ',' << role("sensor") << ',' << role("coordinator") << ','
            << role("leader") << ','
            << optionalFixed(s.energyPerDeliveredJ ? std::optional<double>(*s.energyPerDeliveredJ * 1e3)
                                                   : std::nullopt,
                             kUndefined);
        if (s.hops)
        {
            out << ',' << s.hops->min << ',' << fixed(s.hops->avg, 4) << ',' << s.hops->max;
        }
        else
        {
            out << ',' << kUndefined << ',' << kUndefined << ',' << kUndefined;
        }
        out << ',' << r.mac.txAttempts << ',' << r.mac.retransmissions << ',' << r.mac.dropsQueue << ','
            << r.mac.dropsRetry << ',' << r.mac.acksReceived << ',' << r.routing.rreqOriginated << ','
            << r.routing.rreqForwarded << ',' << r.routing.rrepSent << ',' << r.routing.rerrSent << ','
            << r.routing.hellosSent << ',' << r.routing.discoveriesStarted << ',' << r.routing.discoveriesFailed;
        for (const char *cause : kDropCauses)
        {
            const auto it = s.dropsByCause.find(cause);
            out << ',' << (it == s.dropsByCause.end() ? 0 : it->second);
        }
        out << ',' << r.events << '\n';
    }
}

void writeAggregateCsv(std::ostream &out, const std::vector<PointAggregate> &rows)
{
    out << "strategy,frequency_mhz,modulation,payload_bytes,interval_s,runs,generated,delivered,prr_mean,prr_ci95,"
           "delay_ms_mean,delay_ms_ci95,delay_runs,energy_mj_per_node_mean,energy_mj_per_node_ci95,"
           "energy_mj_per_delivered_mean,energy_mj_per_delivered_ci95,hop_min,hop_avg,hop_max\n";
    const auto ci = [](const std::optional<double> &v) { return v ? fixed(*v) : std::string(); };
    for (const auto &r : rows)
    {
        out << pointColumns(r.point) << ',' << r.runs << ',' << r.generated << ',' << r.delivered << ','
            << fixed(r.prr.mean) << ',' << ci(r.prr.ci95) << ',';
        if (r.delayMs)
        {
            out << fixed(r.delayMs->mean, 3) << ',' << ci(r.delayMs->ci95) << ',' << r.delayMs->n;
        }
        else
        {
            out << kUndefined << ",,0";
        }
        out << ',' << fixed(r.energyMjPerNode.mean) << ',' << ci(r.energyMjPerNode.ci95) << ',';
        if (r.energyMjPerDelivered)
        {
            out << fixed(r.energyMjPerDelivered->mean) << ',' << ci(r.energyMjPerDelivered->ci95);
        }
        else
        {
            out << kUndefined << ',';
        }
        if (r.hops)
        {
            out << ',' << r.hops->min << ',' << fixed(r.hops->avg, 4) << ',' << r.hops->max;
        }
        else
        {
            out << ',' << kUndefined << ',' << kUndefined << ',' << kUndefined;
        }
        out << '\n';
    }
}

void writeHopsCsv(std::ostream &out, const std::vector<HopRow> &rows)
{
    out << "strategy,frequency_mhz,modulation,interval_s,delivered,hop_min,hop_avg,hop_max\n";
    for (const auto &r : rows)
    {
        out << dissemination::toString(r.series.strategy) << ',' << r.series.frequencyMhz << ','
            << phy::toString(r.series.modulation) << ',' << intervalText(r.series.intervalS) << ',';
        if (r.hops)
        {
            out << r.hops->count << ',' << r.hops->min << ',' << fixed(r.hops->avg, 4) << ',' << r.hops->max << '\n';
        }
        else
        {
            out << "0," << kUndefined << ',' << kUndefined << ',' << kUndefined << '\n';
        }
    }
}

void writeFigureDat(std::ostream &out, const std::vector<PointAggregate> &rows, Figure figure)
{
    const char *title = "";
    switch (figure)
    {
    case Figure::Prr: title = "average packet reception ratio"; break;
    case Figure::DelayMs: title = "average packet delay [ms]"; break;
    case Figure::EnergyPerNode: title = "energy per node [mJ]"; break;
    case Figure::EnergyPerDelivered: title = "energy per delivered packet [mJ]"; break;
    }
    const auto value = [&](const PointAggregate &r) -> std::optional<metrics::SummaryStat> {
        switch (figure)
        {
        case Figure::Prr: return r.prr;
        case Figure::DelayMs: return r.delayMs;
        case Figure::EnergyPerNode: return r.energyMjPerNode;
        case Figure::EnergyPerDelivered: return r.energyMjPerDelivered;
        }
        return std::nullopt;
    };

    std::vector<double> intervals;
    std::vector<std::string> series;
    std::vector<std::uint32_t> payloads;
    std::map<std::tuple<double, std::string, std::uint32_t>, const PointAggregate *> cells;
    for (const auto &r : rows)
    {
        if (std::find(intervals.begin(), intervals.end(), r.point.intervalS) == intervals.end())
        {
            intervals.push_back(r.point.intervalS);
        }
        if (std::find(series.begin(), series.end(), r.point.series()) == series.end())
        {
            series.push_back(r.point.series());
        }
        if (std::find(payloads.begin(), payloads.end(), r.point.payloadBytes) == payloads.end())
        {
            payloads.push_back(r.point.payloadBytes);
        }
        cells[{r.point.intervalS, r.point.series(), r.point.payloadBytes}] = &r;
    }
    std::sort(payloads.begin(), payloads.end());

    out << "# " << title << "\n";
    for (std::size_t b = 0; b < intervals.size(); ++b)
    {
        if (b > 0)
        {
            out << "\n\n";
        }
        out << "# interval_s=" << intervalText(intervals[b]) << "\n# payload_bytes";
        for (const auto &s : series)
        {
            out << ' ' << s << ' ' << s << "_ci95";
        }
        out << '\n';
        for (auto payload : payloads)
        {
            out << payload;
            for (const auto &s : series)
            {
                const auto it = cells.find({intervals[b], s, payload});
                const auto stat = it == cells.end() ? std::nullopt : value(*it->second);
                if (stat)
                {
                    out << ' ' << fixed(stat->mean) << ' ' << (stat->ci95 ? fixed(*stat->ci95) : "NaN");
                }
                else
                {
                    out << " NaN NaN";
                }
            }
            out << '\n';
        }
    }
}

void writeFileAtomic(const std::filesystem::path &path, const std::string &content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out)
        {
            std::error_code ignore;
            std::filesystem::remove(tmp, ignore);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
    {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot rename into " + path.string());
    }
}

std::vector<std::filesystem::path> writeOutputs(const ScenarioConfig &config, const std::vector<RunRecord> &records,
                                                const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const auto emit = [&](const std::string &name, const std::string &content) {
        writeFileAtomic(dir / name, content);
        written.push_back(dir / name);
    };

    const auto rows = aggregate(records);
    std::ostringstream runs;
    writeRunsCsv(runs, records);
    emit("runs.csv", runs.str());
    std::ostringstream agg;
    writeAggregateCsv(agg, rows);
    emit("aggregate.csv", agg.str());
    std::ostringstream hops;
    writeHopsCsv(hops, hopTable(records));
    emit("hops.csv", hops.str());

    const std::pair<Figure, const char *> figures[] = {
        {Figure::Prr, "fig_prr.dat"},
        {Figure::DelayMs, "fig_delay.dat"},
        {Figure::EnergyPerNode, "fig_energy_per_node.dat"},
        {Figure::EnergyPerDelivered, "fig_energy_per_delivered.dat"},
    };
    for (const auto &[figure, name] : figures)
    {
        std::ostringstream dat;
        writeFigureDat(dat, rows, figure);
        emit(name, dat.str());
    }

    const bool single = rows.size() == 1;
    for (const auto &r : records)
    {
        if (!r.topologyDot.empty())
        {
            emit(single ? "topology.dot" : "topology_" + r.job.point.label() + ".dot", r.topologyDot);
        }
    }
    emit("effective_config.json", toJsonText(config));
    return written;
}

} // namespace wbbn::experiment
