#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "aerogsm/errors.hpp"
#include "aerogsm/scenario.hpp"

using namespace aerogsm;

namespace {

const std::filesystem::path kScenarios = AEROGSM_SCENARIO_DIR;
const std::filesystem::path kTestData = AEROGSM_TEST_DATA_DIR;

const char* const kMinimal = R"(
stations:
  - id: ms
    distances_m: { rx: 2.5 }
triggers:
  - { time_ms: 0, station: ms, trigger: CALL }
victims:
  - id: rx
    band_mhz: [1700, 1800]
    sensitivity_dbm: -100
    blocking_threshold_dbm: -30
)";

std::string with_layout(const std::string& layout) {
    return std::string(kMinimal) + "sim:\n  layout: \"" + layout + "\"\n";
}

}  // namespace

TEST_CASE("smoke scenario loads with defaults") {
    const auto loaded = load_scenario(kScenarios / "smoke.yaml");
    CHECK(loaded.warnings.empty());
    const auto& s = loaded.scenario;
    CHECK(s.name == "smoke");
    CHECK(s.horizon == Nanos(1'000'000'000));
    REQUIRE(s.sim.stations.size() == 1);
    CHECK(s.sim.stations[0].traffic_slot == 2);
    CHECK(s.sim.stations[0].rach_power == PowerLevel(0));
    CHECK(s.sim.stations[0].connected_power == PowerLevel(15));
    CHECK(s.sim.seed == 1);
    CHECK(s.sim.max_attempts == 4);
    CHECK(s.sim.backoff_window == 8);
    CHECK(s.sim.layout == MultiframeLayout::standard());
    CHECK(s.band_plan_defaulted);
    CHECK(s.band_plan == default_band_plan());
    CHECK(s.harmonics == HarmonicProfile::placeholder());
    CHECK(s.distances.at("pax-1").at("wx-radar") == 3.0);
    REQUIRE(s.victims.size() == 1);
    CHECK(s.victims[0].band == FrequencyBand(4000.0, 8000.0));
    CHECK_FALSE(s.ncu.has_value());
}

TEST_CASE("all shipped scenarios load") {
    for (const auto* name : {"smoke.yaml", "blocked.yaml", "contention10.yaml", "reference.yaml"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_scenario(kScenarios / name));
    }
    const auto ref = load_scenario(kScenarios / "reference.yaml").scenario;
    CHECK(ref.ncu.has_value());
    CHECK_FALSE(ref.band_plan_defaulted);
}

TEST_CASE("undeclared victim is named") {
    try {
        load_scenario(kTestData / "undeclared_victim.yaml");
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("'radar'") != std::string::npos);
    }
}

TEST_CASE("layout override") {
    const std::string standard = MultiframeLayout::standard().to_string();
    const auto ok = parse_scenario(with_layout(std::string(47, 'D') + "RRRR")).scenario;
    CHECK(ok.sim.layout.count(ChannelTag::Rach) == 4);
    CHECK_THROWS_AS(parse_scenario(with_layout(standard.substr(1))), ConfigError);
    CHECK_THROWS_AS(parse_scenario(with_layout(standard + "D")), ConfigError);
    CHECK_THROWS_AS(parse_scenario(with_layout(std::string(50, 'D') + "X")), ConfigError);
    CHECK_THROWS_AS(parse_scenario(with_layout(std::string(51, 'H'))), ConfigError);
}

TEST_CASE("missing victim specification fails loudly") {
    std::string text = kMinimal;
    text.erase(text.find("    sensitivity_dbm: -100\n"), std::string("    sensitivity_dbm: -100\n").size());
    try {
        parse_scenario(text);
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("sensitivity_dbm") != std::string::npos);
        CHECK(msg.find("'rx'") != std::string::npos);
    }
}

TEST_CASE("parse errors carry a position") {
    try {
        load_scenario(kTestData / "broken.yaml");
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(e.line() >= 0);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    try {
        parse_scenario(std::string(kMinimal) + "horizon_ms: soon\n");
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(e.line() >= 0);
    }
}

TEST_CASE("unknown keys: error by default, warning when lax") {
    CHECK_THROWS_AS(load_scenario(kTestData / "unknown_key.yaml"), ConfigError);
    const auto lax = load_scenario(kTestData / "unknown_key.yaml", {.lax = true});
    REQUIRE(lax.warnings.size() == 1);
    CHECK(lax.warnings[0].find("colour") != std::string::npos);
}

TEST_CASE("field validation") {
    CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "horizon_ms: -5\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "sim: { max_attempts: 0 }\n"), ConfigError);
    std::string wrong_trigger = kMinimal;
    wrong_trigger.replace(wrong_trigger.find("CALL"), 4, "HANGUP");
    CHECK_THROWS_AS(parse_scenario(wrong_trigger), ConfigError);
    std::string no_distance = kMinimal;
    no_distance.replace(no_distance.find("{ rx: 2.5 }"), 11, "{}");
    CHECK_THROWS_AS(parse_scenario(no_distance), ConfigError);
}

TEST_CASE("canonical text round-trips") {
    for (const auto* name : {"smoke.yaml", "blocked.yaml", "contention10.yaml", "reference.yaml"}) {
        CAPTURE(name);
        const auto s = load_scenario(kScenarios / name).scenario;
        const auto text = to_canonical_text(s);
        const auto again = parse_scenario(text).scenario;
        CHECK(again == s);
        CHECK(to_canonical_text(again) == text);
    }
}

TEST_CASE("default band plan round-trips byte for byte") {
    auto s = parse_scenario(kMinimal).scenario;
    s.band_plan_defaulted = false;
    const auto text = to_canonical_text(s);
    CHECK(text.find("Radio Altimeter") != std::string::npos);
    const auto back = parse_scenario(text).scenario;
    CHECK(back.band_plan == default_band_plan());
    CHECK(to_canonical_text(back) == text);
}

TEST_CASE("number formatting reads back exactly") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-30.0) == "-30");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-.inf");
    for (double v : {1710.4, 1e-9, 13.265, 576.923, 1.0 / 3.0}) {
        CHECK(std::stod(format_number(v)) == v);
    }
}
