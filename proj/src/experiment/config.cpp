#include "wbbn/experiment/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace wbbn::experiment
{
namespace
{

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using Path = std::vector<std::string>;

std::string dotted(const Path &path)
{
    std::string out;
    for (const auto &seg : path)
    {
        if (!out.empty() && seg.front() != '[')
        {
            out += '.';
        }
        out += seg;
    }
    return out.empty() ? "(root)" : out;
}

int lineAt(const std::string &text, std::size_t pos)
{
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(std::min(pos, text.size())), '\n'));
}

/// Line of the deepest key of `path` found in the raw text; array index
/// segments are skipped, so the answer is the enclosing key's line.
int locate(const std::string &text, const Path &path)
{
    std::size_t pos = 0;
    bool found = false;
    for (const auto &seg : path)
    {
        if (seg.empty() || seg.front() == '[')
        {
            continue;
        }
        const std::string quoted = '"' + seg + '"';
        std::size_t at = pos;
        while ((at = text.find(quoted, at)) != std::string::npos)
        {
            std::size_t after = at + quoted.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after])))
            {
                ++after;
            }
            if (after < text.size() && text[after] == ':')
            {
                break;
            }
            at += quoted.size();
        }
        if (at == std::string::npos)
        {
            break;
        }
        pos = at;
        found = true;
    }
    return found ? lineAt(text, pos) : 0;
}

class Context
{
public:
    Context(const std::string &text, std::string source) : m_text(text), m_source(std::move(source)) {}

    [[noreturn]] void fail(const Path &path, const std::string &reason) const
    {
        const int line = locate(m_text, path);
        std::ostringstream msg;
        msg << m_source;
        if (line > 0)
        {
            msg << ':' << line;
        }
        msg << ": " << dotted(path) << ": " << reason;
        throw ConfigError(msg.str(), line);
    }

private:
    const std::string &m_text;
    std::string m_source;
};

/// Reads the keys of one JSON object and rejects whatever it did not read.
class Object
{
public:
    Object(const Context &ctx, const json &value, Path path) : m_ctx(ctx), m_value(value), m_path(std::move(path))
    {
        if (!m_value.is_object())
        {
            m_ctx.fail(m_path, "expected an object");
        }
    }

    Path at(const std::string &key) const
    {
        Path p = m_path;
        p.push_back(key);
        return p;
    }

    const json *find(const std::string &key)
    {
        m_known.insert(key);
        const auto it = m_value.find(key);
        return it == m_value.end() ? nullptr : &*it;
    }

    void number(const std::string &key, double &out)
    {
        if (const json *v = find(key))
        {
            if (!v->is_number())
            {
                m_ctx.fail(at(key), "expected a number");
            }
            out = v->get<double>();
        }
    }

    template <typename Int>
    void integer(const std::string &key, Int &out)
    {
        if (const json *v = find(key))
        {
            if (!v->is_number_integer())
            {
                m_ctx.fail(at(key), "expected an integer");
            }
            if constexpr (std::is_unsigned_v<Int>)
            {
                if (v->is_number_unsigned() || v->get<std::int64_t>() >= 0)
                {
                    out = static_cast<Int>(v->get<std::uint64_t>());
                    return;
                }
                m_ctx.fail(at(key), "must be non-negative");
            }
            else
            {
                out = static_cast<Int>(v->get<std::int64_t>());
            }
        }
    }

    void boolean(const std::string &key, bool &out)
    {
        if (const json *v = find(key))
        {
            if (!v->is_boolean())
            {
                m_ctx.fail(at(key), "expected true or false");
            }
            out = v->get<bool>();
        }
    }

    bool string(const std::string &key, std::string &out)
    {
        if (const json *v = find(key))
        {
            if (!v->is_string())
            {
                m_ctx.fail(at(key), "expected a string");
            }
            out = v->get<std::string>();
            return true;
        }
        return false;
    }

    void require(bool ok, const std::string &key, const std::string &reason) const
    {
        if (!ok)
        {
            m_ctx.fail(at(key), reason);
        }
    }

    void finish() const
    {
        for (const auto &[key, value] : m_value.items())
        {
            if (!m_known.contains(key))
            {
                m_ctx.fail(at(key), "unknown key");
            }
        }
    }

    const Context &context() const { return m_ctx; }

private:
    const Context &m_ctx;
    const json &m_value;
    Path m_path;
    std::set<std::string> m_known;
};

template <typename Fn>
void withObject(Object &parent, const std::string &key, Fn &&fn)
{
    if (const json *v = parent.find(key))
    {
        Object child(parent.context(), *v, parent.at(key));
        fn(child);
        child.finish();
    }
}

template <typename T, typename Fn>
void readList(Object &parent, const std::string &key, std::vector<T> &out, Fn &&convert)
{
    const json *v = parent.find(key);
    if (v == nullptr)
    {
        return;
    }
    const Path path = parent.at(key);
    if (!v->is_array() || v->empty())
    {
        parent.context().fail(path, "expected a non-empty array");
    }
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
    {
        Path item = path;
        item.push_back("[" + std::to_string(i) + "]");
        out.push_back(convert((*v)[i], item));
    }
}

void readChannelParams(Object &obj, phy::ChannelParams &p)
{
    obj.number("pl0_db", p.pl0Db);
    obj.number("d0_m", p.d0);
    obj.require(p.d0 > 0.0, "d0_m", "must be positive");
    obj.number("exponent", p.exponent);
    obj.require(p.exponent > 0.0, "exponent", "must be positive");
    obj.number("shadow_sigma_db", p.shadowSigmaDb);
    obj.require(p.shadowSigmaDb >= 0.0, "shadow_sigma_db", "must be >= 0");
}

void readBandMap(Object &obj, const std::string &key, std::map<int, phy::ChannelParams> &out)
{
    withObject(obj, key, [&](Object &bands) {
        for (const char *band : {"900", "2450"})
        {
            withObject(bands, band, [&](Object &params) { readChannelParams(params, out[std::stoi(band)]); });
        }
    });
}

dissemination::Strategy parseStrategy(const Context &ctx, const json &v, const Path &path)
{
    if (!v.is_string())
    {
        ctx.fail(path, "expected \"clustered\" or \"distributed\"");
    }
    try
    {
        return dissemination::strategyFromString(v.get<std::string>());
    }
    catch (const std::exception &e)
    {
        ctx.fail(path, e.what());
    }
}

phy::Modulation parseModulation(const Context &ctx, const json &v, const Path &path)
{
    if (!v.is_string())
    {
        ctx.fail(path, "expected \"dbpsk\" or \"dqpsk\"");
    }
    try
    {
        return phy::modulationFromString(v.get<std::string>());
    }
    catch (const std::exception &e)
    {
        ctx.fail(path, e.what());
    }
}

int parseFrequency(const Context &ctx, const json &v, const Path &path)
{
    if (!v.is_number_integer() || (v.get<int>() != 900 && v.get<int>() != 2450))
    {
        ctx.fail(path, "frequency must be 900 or 2450");
    }
    return v.get<int>();
}

std::uint32_t parsePayload(const Context &ctx, const json &v, const Path &path)
{
    if (!v.is_number_integer() || v.get<std::int64_t>() < 16 || v.get<std::int64_t>() > 1024)
    {
        ctx.fail(path, "payload must be an integer within [16, 1024] bytes");
    }
    return v.get<std::uint32_t>();
}

double parseInterval(const Context &ctx, const json &v, const Path &path)
{
    if (!v.is_number() || !(v.get<double>() > 0.0))
    {
        ctx.fail(path, "interval must be a positive number of seconds");
    }
    return v.get<double>();
}

void readTopology(Object &obj, mobility::GroupLayout &layout)
{
    obj.integer("groups", layout.groups);
    obj.require(layout.groups >= 1, "groups", "must be >= 1");
    obj.integer("members_per_group", layout.membersPerGroup);
    obj.require(layout.membersPerGroup >= 1, "members_per_group", "must be >= 1");
    obj.number("intra_spacing_m", layout.intraSpacing);
    obj.require(layout.intraSpacing > 0.0, "intra_spacing_m", "must be positive");
    obj.number("inter_spacing_m", layout.interSpacing);
    obj.require(layout.interSpacing > 0.0, "inter_spacing_m", "must be positive");
    obj.number("field_size_m", layout.fieldSize);
    obj.require(layout.fieldSize > 0.0, "field_size_m", "must be positive");
    obj.number("mobility_step_s", layout.stepInterval);
    obj.require(layout.stepInterval > 0.0, "mobility_step_s", "must be positive");
    obj.number("jitter_m", layout.jitter);
    obj.require(layout.jitter >= 0.0, "jitter_m", "must be >= 0");
    obj.number("max_body_offset_m", layout.maxBodyOffset);
    obj.require(layout.maxBodyOffset > 0.0, "max_body_offset_m", "must be positive");

    const json *schedule = obj.find("posture_schedule");
    if (schedule == nullptr)
    {
        return;
    }
    const Path path = obj.at("posture_schedule");
    if (!schedule->is_array() || schedule->empty())
    {
        obj.context().fail(path, "expected a non-empty array of {posture, duration_s}");
    }
    layout.postureSchedule.clear();
    for (std::size_t i = 0; i < schedule->size(); ++i)
    {
        Path item = path;
        item.push_back("[" + std::to_string(i) + "]");
        Object step(obj.context(), (*schedule)[i], item);
        std::string name;
        mobility::PostureStep ps{mobility::Posture::Standing, 0.0};
        if (!step.string("posture", name))
        {
            obj.context().fail(item, "missing posture");
        }
        try
        {
            ps.posture = mobility::postureFromString(name);
        }
        catch (const std::exception &e)
        {
            step.require(false, "posture", e.what());
        }
        step.number("duration_s", ps.duration);
        step.require(ps.duration > 0.0, "duration_s", "must be positive");
        step.finish();
        layout.postureSchedule.push_back(ps);
    }
}

void readChannel(Object &obj, ChannelBlock &ch)
{
    obj.boolean("shadowing", ch.shadowing);
    obj.number("shadow_coherence_s", ch.shadowCoherence);
    obj.require(ch.shadowCoherence > 0.0, "shadow_coherence_s", "must be positive");
    obj.number("bandwidth_hz", ch.radio.bandwidthHz);
    obj.require(ch.radio.bandwidthHz > 0.0, "bandwidth_hz", "must be positive");
    obj.number("noise_figure_db", ch.radio.noiseFigureDb);
    obj.number("cca_threshold_dbm", ch.radio.ccaThresholdDbm);
    obj.number("sensitivity_dbm", ch.radio.sensitivityDbm);
    readBandMap(obj, "on_body", ch.onBody);
    readBandMap(obj, "body_to_body", ch.bodyToBody);
}

void readMac(Object &obj, ScenarioConfig &cfg)
{
    mac::MacParams &m = cfg.mac;
    obj.integer("cw_min", m.cwMin);
    obj.require(m.cwMin >= 1, "cw_min", "must be >= 1");
    obj.integer("cw_max", m.cwMax);
    obj.require(m.cwMax >= m.cwMin, "cw_max", "must be >= cw_min");
    obj.number("slot_us", cfg.macSlotUs);
    obj.require(cfg.macSlotUs > 0.0, "slot_us", "must be positive");
    obj.number("sifs_us", cfg.macSifsUs);
    obj.require(cfg.macSifsUs > 0.0, "sifs_us", "must be positive");
    obj.integer("max_retries", m.maxRetries);
    obj.require(m.maxRetries >= 0, "max_retries", "must be >= 0");
    obj.integer("queue_capacity", m.queueCapacity);
    obj.require(m.queueCapacity >= 1, "queue_capacity", "must be >= 1");
    obj.integer("duplicate_window", m.duplicateWindow);
    obj.require(m.duplicateWindow >= 1, "duplicate_window", "must be >= 1");
}

void readRouting(Object &obj, routing::DymoParams &r)
{
    obj.number("route_lifetime_s", r.routeLifetime);
    obj.require(r.routeLifetime > 0.0, "route_lifetime_s", "must be positive");
    obj.integer("discovery_attempts", r.discoveryAttempts);
    obj.require(r.discoveryAttempts >= 1, "discovery_attempts", "must be >= 1");
    obj.number("discovery_timeout_s", r.discoveryTimeout);
    obj.require(r.discoveryTimeout > 0.0, "discovery_timeout_s", "must be positive");
    obj.integer("discovery_buffer", r.discoveryBuffer);
    obj.require(r.discoveryBuffer >= 1, "discovery_buffer", "must be >= 1");
    obj.number("hello_interval_s", r.helloInterval);
    obj.require(r.helloInterval > 0.0, "hello_interval_s", "must be positive");
    obj.number("neighbor_timeout_s", r.neighborTimeout);
    obj.require(r.neighborTimeout > 0.0, "neighbor_timeout_s", "must be positive");
    obj.boolean("hellos", r.hellos);
    obj.number("energy_threshold", r.energyThreshold);
    obj.require(r.energyThreshold >= 0.0 && r.energyThreshold <= 1.0, "energy_threshold", "must be within [0, 1]");
    obj.integer("hop_limit", r.hopLimit);
    obj.require(r.hopLimit >= 1, "hop_limit", "must be >= 1");
}

void readEnergy(Object &obj, phy::EnergyModel &e)
{
    obj.number("tx_current_ma", e.txCurrentMa);
    obj.require(e.txCurrentMa >= 0.0, "tx_current_ma", "must be >= 0");
    obj.number("rx_current_ma", e.rxCurrentMa);
    obj.require(e.rxCurrentMa >= 0.0, "rx_current_ma", "must be >= 0");
    obj.number("idle_current_ma", e.idleCurrentMa);
    obj.require(e.idleCurrentMa >= 0.0, "idle_current_ma", "must be >= 0");
    obj.number("battery_j", e.batteryJoules);
    obj.require(e.batteryJoules > 0.0, "battery_j", "must be positive");
}

void readOutput(Object &obj, OutputOptions &o)
{
    obj.string("directory", o.directory);
    obj.require(!o.directory.empty(), "directory", "must not be empty");
    obj.boolean("events", o.events);
    obj.boolean("trajectory", o.trajectory);
    obj.boolean("routes", o.routes);
    obj.boolean("topology", o.topology);
}

void readSweep(Object &obj, SweepAxes &s)
{
    const Context &ctx = obj.context();
    readList(obj, "strategies", s.strategies, [&](const json &v, const Path &p) { return parseStrategy(ctx, v, p); });
    readList(obj, "frequencies_mhz", s.frequenciesMhz, [&](const json &v, const Path &p) { return parseFrequency(ctx, v, p); });
    readList(obj, "modulations", s.modulations, [&](const json &v, const Path &p) { return parseModulation(ctx, v, p); });
    readList(obj, "payload_bytes", s.payloads, [&](const json &v, const Path &p) { return parsePayload(ctx, v, p); });
    readList(obj, "intervals_s", s.intervals, [&](const json &v, const Path &p) { return parseInterval(ctx, v, p); });
}

ojson channelJson(const phy::ChannelParams &p)
{
    ojson j;
    j["pl0_db"] = p.pl0Db;
    j["d0_m"] = p.d0;
    j["exponent"] = p.exponent;
    j["shadow_sigma_db"] = p.shadowSigmaDb;
    return j;
}

ojson bandMapJson(const std::map<int, phy::ChannelParams> &m)
{
    ojson j = ojson::object();
    for (const auto &[mhz, p] : m)
    {
        j[std::to_string(mhz)] = channelJson(p);
    }
    return j;
}

std::string lower(std::string_view text)
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string trimNumber(double v)
{
    std::ostringstream out;
    out << v;
    return out.str();
}

} // namespace

ScenarioConfig::ScenarioConfig()
{
    for (phy::Band band : {phy::Band::Mhz900, phy::Band::Mhz2450})
    {
        channel.onBody[phy::bandMhz(band)] = phy::defaultChannelParams(phy::LinkKind::OnBody, band);
        channel.bodyToBody[phy::bandMhz(band)] = phy::defaultChannelParams(phy::LinkKind::BodyToBody, band);
    }
}

std::string RunPoint::series() const
{
    return std::string(dissemination::toString(strategy)) + "_" + std::to_string(frequencyMhz) + "_" +
           lower(phy::toString(modulation));
}

std::string RunPoint::label() const
{
    return series() + "_" + std::to_string(payloadBytes) + "B_" + trimNumber(intervalS) + "s";
}

ScenarioConfig parseConfig(const std::string &text, const std::string &source)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        const int line = lineAt(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(source + ":" + std::to_string(line) + ": malformed JSON: " + e.what(), line);
    }
    const Context ctx(text, source);
    ScenarioConfig cfg;
    Object root(ctx, doc, {});

    std::string name;
    if (const json *v = root.find("strategy"))
    {
        cfg.strategy = parseStrategy(ctx, *v, root.at("strategy"));
    }
    if (const json *v = root.find("frequency_mhz"))
    {
        cfg.frequencyMhz = parseFrequency(ctx, *v, root.at("frequency_mhz"));
    }
    if (const json *v = root.find("modulation"))
    {
        cfg.modulation = parseModulation(ctx, *v, root.at("modulation"));
    }
    if (const json *v = root.find("payload_bytes"))
    {
        cfg.payloadBytes = parsePayload(ctx, *v, root.at("payload_bytes"));
    }
    if (const json *v = root.find("interval_s"))
    {
        cfg.intervalS = parseInterval(ctx, *v, root.at("interval_s"));
    }
    root.number("sim_duration_s", cfg.durationS);
    root.require(cfg.durationS > 0.0, "sim_duration_s", "must be positive");
    root.integer("iterations", cfg.iterations);
    root.require(cfg.iterations >= 1, "iterations", "must be >= 1");
    root.integer("seed", cfg.seed);
    root.integer("leader_body", cfg.leaderBody);
    root.integer("coordinator_slot", cfg.coordinatorSlot);
    root.require(cfg.coordinatorSlot >= 0 && cfg.coordinatorSlot < mobility::kSlotsPerBody, "coordinator_slot",
                 "must be a node slot in [0, 4]");
    root.number("tx_power_dbm", cfg.txPowerDbm);
    root.integer("relay_queue", cfg.relayQueue);
    root.require(cfg.relayQueue >= 1, "relay_queue", "must be >= 1");

    withObject(root, "topology", [&](Object &o) { readTopology(o, cfg.layout); });
    root.require(cfg.leaderBody >= 0 && cfg.leaderBody < cfg.layout.groups * cfg.layout.membersPerGroup,
                 "leader_body", "must name an existing body");
    withObject(root, "channel", [&](Object &o) { readChannel(o, cfg.channel); });
    withObject(root, "mac", [&](Object &o) { readMac(o, cfg); });
    withObject(root, "routing", [&](Object &o) { readRouting(o, cfg.routing); });
    withObject(root, "energy", [&](Object &o) { readEnergy(o, cfg.energy); });
    withObject(root, "output", [&](Object &o) { readOutput(o, cfg.output); });
    withObject(root, "sweep", [&](Object &o) { readSweep(o, cfg.sweep); });
    root.finish();
    return cfg;
}

ScenarioConfig loadConfig(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ConfigError(path.string() + ": cannot open configuration file", 0);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parseConfig(text.str(), path.string());
}

std::string toJsonText(const ScenarioConfig &c)
{
    ojson j;
    j["strategy"] = std::string(dissemination::toString(c.strategy));
    j["frequency_mhz"] = c.frequencyMhz;
    j["modulation"] = std::string(phy::toString(c.modulation));
    j["payload_bytes"] = c.payloadBytes;
    j["interval_s"] = c.intervalS;
    j["sim_duration_s"] = c.durationS;
    j["iterations"] = c.iterations;
    j["seed"] = c.seed;
    j["leader_body"] = c.leaderBody;
    j["coordinator_slot"] = c.coordinatorSlot;
    j["tx_power_dbm"] = c.txPowerDbm;
    j["relay_queue"] = c.relayQueue;

    ojson topo;
    topo["groups"] = c.layout.groups;
    topo["members_per_group"] = c.layout.membersPerGroup;
    topo["intra_spacing_m"] = c.layout.intraSpacing;
    topo["inter_spacing_m"] = c.layout.interSpacing;
    topo["field_size_m"] = c.layout.fieldSize;
    topo["mobility_step_s"] = c.layout.stepInterval;
    topo["jitter_m"] = c.layout.jitter;
    topo["max_body_offset_m"] = c.layout.maxBodyOffset;
    ojson schedule = ojson::array();
    for (const auto &step : c.layout.postureSchedule)
    {
        ojson s;
        s["posture"] = std::string(mobility::toString(step.posture));
        s["duration_s"] = step.duration;
        schedule.push_back(s);
    }
    topo["posture_schedule"] = schedule;
    j["topology"] = topo;

    ojson ch;
    ch["shadowing"] = c.channel.shadowing;
    ch["shadow_coherence_s"] = c.channel.shadowCoherence;
    ch["bandwidth_hz"] = c.channel.radio.bandwidthHz;
    ch["noise_figure_db"] = c.channel.radio.noiseFigureDb;
    ch["cca_threshold_dbm"] = c.channel.radio.ccaThresholdDbm;
    ch["sensitivity_dbm"] = c.channel.radio.sensitivityDbm;
    ch["on_body"] = bandMapJson(c.channel.onBody);
    ch["body_to_body"] = bandMapJson(c.channel.bodyToBody);
    j["channel"] = ch;

    ojson m;
    m["cw_min"] = c.mac.cwMin;
    m["cw_max"] = c.mac.cwMax;
    m["slot_us"] = c.macSlotUs;
    m["sifs_us"] = c.macSifsUs;
    m["max_retries"] = c.mac.maxRetries;
    m["queue_capacity"] = c.mac.queueCapacity;
    m["duplicate_window"] = c.mac.duplicateWindow;
    j["mac"] = m;

    ojson r;
    r["route_lifetime_s"] = c.routing.routeLifetime;
    r["discovery_attempts"] = c.routing.discoveryAttempts;
    r["discovery_timeout_s"] = c.routing.discoveryTimeout;
    r["discovery_buffer"] = c.routing.discoveryBuffer;
    r["hello_interval_s"] = c.routing.helloInterval;
    r["neighbor_timeout_s"] = c.routing.neighborTimeout;
    r["hellos"] = c.routing.hellos;
    r["energy_threshold"] = c.routing.energyThreshold;
    r["hop_limit"] = c.routing.hopLimit;
    j["routing"] = r;

    ojson e;
    e["tx_current_ma"] = c.energy.txCurrentMa;
    e["rx_current_ma"] = c.energy.rxCurrentMa;
    e["idle_current_ma"] = c.energy.idleCurrentMa;
    e["battery_j"] = c.energy.batteryJoules;
    j["energy"] = e;

    ojson o;
    o["directory"] = c.output.directory;
    o["events"] = c.output.events;
    o["trajectory"] = c.output.trajectory;
    o["routes"] = c.output.routes;
    o["topology"] = c.output.topology;
    j["output"] = o;

    ojson s;
    s["strategies"] = ojson::array();
    for (auto v : c.sweep.strategies)
    {
        s["strategies"].push_back(std::string(dissemination::toString(v)));
    }
    s["frequencies_mhz"] = c.sweep.frequenciesMhz;
    s["modulations"] = ojson::array();
    for (auto v : c.sweep.modulations)
    {
        s["modulations"].push_back(std::string(phy::toString(v)));
    }
    s["payload_bytes"] = c.sweep.payloads;
    s["intervals_s"] = c.sweep.intervals.empty() ? std::vector<double>{c.intervalS} : c.sweep.intervals;
    j["sweep"] = s;
    return j.dump(2) + "\n";
}

RunPoint scenarioPoint(const ScenarioConfig &c)
{
    return {c.strategy, c.frequencyMhz, c.modulation, c.payloadBytes, c.intervalS};
}

std::vector<RunPoint> sweepPoints(const ScenarioConfig &c)
{
    const std::vector<double> intervals = c.sweep.intervals.empty() ? std::vector<double>{c.intervalS} : c.sweep.intervals;
    std::vector<RunPoint> points;
    for (auto strategy : c.sweep.strategies)
    {
        for (int mhz : c.sweep.frequenciesMhz)
        {
            for (auto modulation : c.sweep.modulations)
            {
                for (double interval : intervals)
                {
                    for (auto payload : c.sweep.payloads)
                    {
                        points.push_back({strategy, mhz, modulation, payload, interval});
                    }
                }
            }
        }
    }
    return points;
}

dissemination::NetworkConfig networkConfig(const ScenarioConfig &c, const RunPoint &point, std::uint64_t seed)
{
    dissemination::NetworkConfig n;
    n.strategy = point.strategy;
    n.phy.band = phy::bandFromMhz(point.frequencyMhz);
    n.phy.modulation = point.modulation;
    n.phy.txPowerDbm = c.txPowerDbm;
    n.traffic = {point.payloadBytes, point.intervalS};
    n.layout = c.layout;
    n.onBody = c.channel.onBody.at(point.frequencyMhz);
    n.bodyToBody = c.channel.bodyToBody.at(point.frequencyMhz);
    n.onBody.kind = phy::LinkKind::OnBody;
    n.bodyToBody.kind = phy::LinkKind::BodyToBody;
    n.onBody.shadowCoherence = c.channel.shadowCoherence;
    n.bodyToBody.shadowCoherence = c.channel.shadowCoherence;
    n.shadowing = c.channel.shadowing;
    n.radio = c.channel.radio;
    n.mac = c.mac;
    n.mac.slot = c.macSlotUs * 1e-6;
    n.mac.sifs = c.macSifsUs * 1e-6;
    n.routing = c.routing;
    n.relayQueueCapacity = c.relayQueue;
    n.energy = c.energy;
    n.duration = c.durationS;
    n.seed = seed;
    n.leaderBody = c.leaderBody;
    n.coordinatorSlot = c.coordinatorSlot;
    return n;
}

void validatePoints(const ScenarioConfig &config, const std::vector<RunPoint> &points)
{
    if (points.empty())
    {
        throw ConfigError("sweep grid is empty", 0);
    }
    for (const auto &point : points)
    {
        try
        {
            dissemination::validate(networkConfig(config, point, config.seed));
        }
        catch (const std::exception &e)
        {
            throw ConfigError("point " + point.label() + ": " + e.what(), 0);
        }
    }
}

} // namespace wbbn::experiment
