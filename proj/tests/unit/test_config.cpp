#include "wbbn/experiment/config.hpp"

#include <doctest.h>

#include <string>

using namespace wbbn;
using namespace wbbn::experiment;

namespace
{

std::string errorOf(const std::string &text)
{
    try
    {
        parseConfig(text, "scenario.json");
    }
    catch (const ConfigError &e)
    {
        return e.what();
    }
    return {};
}

int lineOf(const std::string &text)
{
    try
    {
        parseConfig(text, "scenario.json");
    }
    catch (const ConfigError &e)
    {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("an empty document yields the defaults")
{
    const ScenarioConfig c = parseConfig("{}");
    CHECK((c.strategy == dissemination::Strategy::Clustered));
    CHECK(c.frequencyMhz == 2450);
    CHECK((c.modulation == phy::Modulation::Dqpsk));
    CHECK(c.payloadBytes == 16);
    CHECK(c.intervalS == 1.0);
    CHECK(c.durationS == 60.0);
    CHECK(c.iterations == 10);
    CHECK(c.layout.groups * c.layout.membersPerGroup == 12);
    CHECK(c.routing.helloInterval == 3.0);
    CHECK(c.routing.neighborTimeout == 9.0);
    CHECK(c.channel.onBody.size() == 2);
    CHECK(c.channel.bodyToBody.at(2450).shadowSigmaDb == 6.1);
    CHECK(c.channel.bodyToBody.at(900).exponent == 2.8);
    CHECK(c.channel.radio.noiseDbm() == doctest::Approx(-104.0));
    CHECK(c.energy.txCurrentMa == 17.4);
}

TEST_CASE("values are read from every block")
{
    const std::string text = R"({
  "strategy": "distributed",
  "frequency_mhz": 900,
  "modulation": "dbpsk",
  "payload_bytes": 256,
  "interval_s": 0.5,
  "iterations": 3,
  "seed": 77,
  "topology": {"groups": 2, "members_per_group": 2,
               "posture_schedule": [{"posture": "walking", "duration_s": 5}]},
  "channel": {"shadowing": false, "body_to_body": {"900": {"exponent": 3.0}}},
  "mac": {"cw_min": 8, "slot_us": 320},
  "routing": {"hellos": false, "discovery_attempts": 5},
  "energy": {"idle_current_ma": 0.5},
  "output": {"directory": "out", "routes": true},
  "sweep": {"payload_bytes": [16, 64], "intervals_s": [0.25, 1]}
})";
    const ScenarioConfig c = parseConfig(text);
    CHECK((c.strategy == dissemination::Strategy::Distributed));
    CHECK(c.frequencyMhz == 900);
    CHECK((c.modulation == phy::Modulation::Dbpsk));
    CHECK(c.payloadBytes == 256);
    CHECK(c.intervalS == 0.5);
    CHECK(c.iterations == 3);
    CHECK(c.seed == 77);
    CHECK(c.layout.groups == 2);
    CHECK(c.layout.postureSchedule.size() == 1);
    CHECK((c.layout.postureSchedule[0].posture == mobility::Posture::Walking));
    CHECK_FALSE(c.channel.shadowing);
    CHECK(c.channel.bodyToBody.at(900).exponent == 3.0);
    CHECK(c.channel.bodyToBody.at(900).pl0Db == 38.2);
    CHECK(c.mac.cwMin == 8);
    CHECK(c.macSlotUs == 320.0);
    CHECK_FALSE(c.routing.hellos);
    CHECK(c.routing.discoveryAttempts == 5);
    CHECK(c.energy.idleCurrentMa == 0.5);
    CHECK(c.output.directory == "out");
    CHECK(c.output.routes);
    CHECK(c.sweep.payloads == std::vector<std::uint32_t>{16, 64});
    CHECK(c.sweep.intervals == std::vector<double>{0.25, 1.0});

    const auto n = networkConfig(c, scenarioPoint(c), 5);
    CHECK(n.mac.slot == doctest::Approx(320e-6));
    CHECK(n.bodyToBody.exponent == 3.0);
    CHECK((n.phy.band == phy::Band::Mhz900));
    CHECK(n.seed == 5);
    CHECK_FALSE(n.shadowing);
}

TEST_CASE("unknown keys are rejected with their line")
{
    const std::string text = "{\n  \"strategy\": \"clustered\",\n  \"mac\": {\n    \"cw_minimum\": 8\n  }\n}\n";
    CHECK(errorOf(text) == "scenario.json:4: mac.cw_minimum: unknown key");
    CHECK(lineOf(text) == 4);
}

TEST_CASE("type and range errors name the key path and line")
{
    CHECK(errorOf("{\n\"payload_bytes\": 2048\n}").rfind("scenario.json:2: payload_bytes:", 0) == 0);
    CHECK(errorOf("{\n\n\"frequency_mhz\": 868}").rfind("scenario.json:3: frequency_mhz:", 0) == 0);
    CHECK(errorOf("{\"iterations\": 0}").find("iterations: must be >= 1") != std::string::npos);
    CHECK(errorOf("{\"modulation\": \"qpsk\"}").find("modulation:") != std::string::npos);
    CHECK(errorOf("{\"routing\": {\"hellos\": 1}}").find("routing.hellos: expected true or false") != std::string::npos);
    CHECK(errorOf("{\"sim_duration_s\": \"long\"}").find("sim_duration_s: expected a number") != std::string::npos);
    CHECK(errorOf("{\"channel\": {\"body_to_body\": {\"5000\": {}}}}").find("channel.body_to_body") !=
          std::string::npos);
    CHECK(errorOf("{\n  \"strategy\": \"clustered\",\n  oops\n}").rfind("scenario.json:3: malformed JSON", 0) == 0);
    CHECK(errorOf("[]").find("expected an object") != std::string::npos);
}

TEST_CASE("the effective configuration round-trips")
{
    ScenarioConfig c = parseConfig(R"({"strategy": "ddd", "interval_s": 0.25, "mac": {"slot_us": 145.5},
                                       "channel": {"shadow_coherence_s": 0.7}})");
    const std::string echo = toJsonText(c);
    const ScenarioConfig again = parseConfig(echo);
    CHECK(toJsonText(again) == echo);
    CHECK((again.strategy == dissemination::Strategy::Distributed));
    CHECK(again.macSlotUs == 145.5);
    CHECK(again.channel.shadowCoherence == 0.7);
    CHECK(toJsonText(parseConfig("{}")) == toJsonText(ScenarioConfig{}));
}

TEST_CASE("sweep points cover the Cartesian product")
{
    const ScenarioConfig c = parseConfig("{}");
    const auto points = sweepPoints(c);
    CHECK(points.size() == 56);
    CHECK(points.front().label() == "clustered_900_dbpsk_16B_1s");
    CHECK(points.back().label() == "distributed_2450_dqpsk_1024B_1s");
    CHECK(points.front().series() == "clustered_900_dbpsk");
    CHECK_NOTHROW(validatePoints(c, points));
    CHECK_THROWS_AS(validatePoints(c, {}), ConfigError);

    ScenarioConfig single = parseConfig(R"({"sweep": {"strategies": ["clustered"], "frequencies_mhz": [2450],
        "modulations": ["dqpsk"], "payload_bytes": [16]}})");
    const auto one = sweepPoints(single);
    REQUIRE(one.size() == 1);
    CHECK(one[0].label() == scenarioPoint(single).label());
}

TEST_CASE("missing files are configuration errors")
{
    CHECK_THROWS_AS(loadConfig("/nonexistent/scenario.json"), ConfigError);
}
