#include "aerogsm/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "aerogsm/errors.hpp"
#include "aerogsm/tdma_noise.hpp"

namespace aerogsm {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
    const auto mark = node.Mark();
    if (mark.is_null()) {
        throw ConfigError(what);
    }
    throw ConfigError(what, mark.line, mark.column);
}

class Reader {
public:
    Reader(const LoadOptions& options, std::vector<std::string>& warnings)
        : options_(options), warnings_(warnings) {}

    void expect_map(const YAML::Node& node, const std::string& ctx) const {
        if (!node.IsMap()) {
            fail(node, ctx + ": expected a mapping");
        }
    }

    void check_keys(const YAML::Node& node, const std::string& ctx,
                    std::initializer_list<std::string_view> allowed) const {
        expect_map(node, ctx);
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) {
                continue;
            }
            const std::string msg = ctx + ": unknown key '" + key + "'";
            if (!options_.lax) {
                fail(kv.first, msg);
            }
            warnings_.push_back(msg);
        }
    }

    template <typename T>
    T get(const YAML::Node& parent, const std::string& key, const std::string& ctx) const {
        const auto node = parent[key];
        if (!node) {
            fail(parent, ctx + " is missing mandatory field '" + key + "'");
        }
        return as<T>(node, ctx + "." + key);
    }

    template <typename T>
    T get_or(const YAML::Node& parent, const std::string& key, const std::string& ctx, T fallback) const {
        const auto node = parent[key];
        if (!node || node.IsNull()) {
            return fallback;
        }
        return as<T>(node, ctx + "." + key);
    }

    template <typename T>
    T as(const YAML::Node& node, const std::string& field) const {
        if (!node.IsScalar()) {
            fail(node, field + ": expected a scalar value");
        }
        try {
            return node.as<T>();
        } catch (const YAML::BadConversion&) {
            fail(node, field + ": cannot read '" + node.Scalar() + "' as " + type_name<T>());
        }
    }

private:
    template <typename T>
    static const char* type_name() {
        if constexpr (std::is_same_v<T, bool>) {
            return "a boolean";
        } else if constexpr (std::is_integral_v<T>) {
            return "an integer";
        } else if constexpr (std::is_floating_point_v<T>) {
            return "a number";
        } else {
            return "a string";
        }
    }

    const LoadOptions& options_;
    std::vector<std::string>& warnings_;
};

// Wraps domain-type construction so validation failures carry file positions.
template <typename F>
auto build(const YAML::Node& node, const std::string& ctx, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        fail(node, ctx + ": " + e.what());
    }
}

Nanos ms_to_ns(double ms) {
    return Nanos(static_cast<Nanos::rep>(std::llround(ms * 1e6)));
}

double ns_to_ms(Nanos t) {
    return static_cast<double>(t.count()) / 1e6;
}

FrequencyBand read_band(const Reader& r, const YAML::Node& parent, const std::string& ctx) {
    const auto node = parent["band_mhz"];
    if (!node) {
        fail(parent, ctx + " is missing mandatory field 'band_mhz'");
    }
    if (!node.IsSequence() || node.size() != 2) {
        fail(node, ctx + ".band_mhz: expected [low, high]");
    }
    const double lo = r.as<double>(node[0], ctx + ".band_mhz[0]");
    const double hi = r.as<double>(node[1], ctx + ".band_mhz[1]");
    return build(node, ctx + ".band_mhz", [&] { return FrequencyBand(lo, hi); });
}

DbmPower read_dbm(const Reader& r, const YAML::Node& parent, const std::string& key, const std::string& ctx) {
    const double v = r.get<double>(parent, key, ctx);
    return build(parent[key], ctx + "." + key, [&] { return DbmPower(v); });
}

void read_sim(const Reader& r, const YAML::Node& node, SimConfig& sim) {
    const std::string ctx = "sim";
    r.check_keys(node, ctx,
                 {"seed", "max_attempts", "backoff_window", "capture", "connection_delay_frames",
                  "rach_burst_fraction", "slot_us", "layout"});
    sim.seed = r.get_or<std::uint64_t>(node, "seed", ctx, sim.seed);
    sim.max_attempts = r.get_or<int>(node, "max_attempts", ctx, sim.max_attempts);
    sim.backoff_window = r.get_or<int>(node, "backoff_window", ctx, sim.backoff_window);
    sim.capture = r.get_or<bool>(node, "capture", ctx, sim.capture);
    sim.connection_delay_frames =
        r.get_or<std::int64_t>(node, "connection_delay_frames", ctx, sim.connection_delay_frames);
    sim.rach_burst_fraction = r.get_or<double>(node, "rach_burst_fraction", ctx, sim.rach_burst_fraction);
    if (node["slot_us"]) {
        const double us = r.as<double>(node["slot_us"], "sim.slot_us");
        sim.timing = build(node["slot_us"], "sim.slot_us", [&] { return TimingConstants::from_slot_us(us); });
    }
    if (node["layout"]) {
        const auto text = r.as<std::string>(node["layout"], "sim.layout");
        sim.layout = build(node["layout"], "sim.layout", [&] { return MultiframeLayout::parse(text); });
    }
}

void read_station(const Reader& r, const YAML::Node& node, std::size_t index, Scenario& s) {
    const std::string ctx = "stations[" + std::to_string(index) + "]";
    r.check_keys(node, ctx,
                 {"id", "traffic_slot", "connected_power_level", "rach_power_level", "arfcn",
                  "call_duration_ms", "distances_m"});
    StationSpec st;
    st.id = r.get<std::string>(node, "id", ctx);
    st.traffic_slot = r.get_or<int>(node, "traffic_slot", ctx, st.traffic_slot);
    const int connected = r.get_or<int>(node, "connected_power_level", ctx, st.connected_power.index());
    st.connected_power = build(node, ctx + ".connected_power_level", [&] { return PowerLevel(connected); });
    const int rach = r.get_or<int>(node, "rach_power_level", ctx, st.rach_power.index());
    st.rach_power = build(node, ctx + ".rach_power_level", [&] { return PowerLevel(rach); });
    if (node["arfcn"]) {
        const int ch = r.as<int>(node["arfcn"], ctx + ".arfcn");
        st.arfcn = build(node["arfcn"], ctx + ".arfcn", [&] { return ArfcnChannel(ch); });
    }
    if (node["call_duration_ms"]) {
        st.call_duration = ms_to_ns(r.as<double>(node["call_duration_ms"], ctx + ".call_duration_ms"));
    }

    auto& table = s.distances[st.id];
    if (const auto d = node["distances_m"]) {
        r.expect_map(d, ctx + ".distances_m");
        for (const auto& kv : d) {
            const auto victim = kv.first.as<std::string>();
            table[victim] = r.as<double>(kv.second, ctx + ".distances_m." + victim);
        }
    }
    s.sim.stations.push_back(std::move(st));
}

void read_trigger(const Reader& r, const YAML::Node& node, std::size_t index, Scenario& s) {
    const std::string ctx = "triggers[" + std::to_string(index) + "]";
    r.check_keys(node, ctx, {"time_ms", "station", "trigger"});
    TriggerEvent t;
    t.time = ms_to_ns(r.get<double>(node, "time_ms", ctx));
    t.station = r.get<std::string>(node, "station", ctx);
    const auto name = r.get_or<std::string>(node, "trigger", ctx, "CALL");
    const auto parsed = parse_trigger(name);
    if (!parsed) {
        fail(node["trigger"], ctx + ".trigger: unknown trigger '" + name +
                                  "' (CALL, EMERGENCY, REESTABLISH, PAGE_RESPONSE, LOCATION_UPDATE)");
    }
    t.trigger = *parsed;
    s.sim.trigger_schedule.push_back(std::move(t));
}

void read_victim(const Reader& r, const YAML::Node& node, std::size_t index, Scenario& s) {
    std::string ctx = "victims[" + std::to_string(index) + "]";
    r.check_keys(node, ctx,
                 {"id", "band_mhz", "sensitivity_dbm", "blocking_threshold_dbm", "adjacent_selectivity_db"});
    const auto id = r.get<std::string>(node, "id", ctx);
    ctx = "victim '" + id + "'";
    VictimReceiver v{.name = id,
                     .band = read_band(r, node, ctx),
                     .sensitivity = read_dbm(r, node, "sensitivity_dbm", ctx),
                     .blocking_threshold = read_dbm(r, node, "blocking_threshold_dbm", ctx),
                     .adjacent_selectivity_db = std::nullopt};
    if (node["adjacent_selectivity_db"]) {
        v.adjacent_selectivity_db = r.as<double>(node["adjacent_selectivity_db"], ctx + ".adjacent_selectivity_db");
    }
    try {
        v.validate();
    } catch (const ConfigError& e) {
        fail(node, e.what());
    }
    s.victims.push_back(std::move(v));
}

void read_path_loss(const Reader& r, const YAML::Node& node, PathLossModel& m) {
    const std::string ctx = "path_loss";
    r.check_keys(node, ctx, {"model", "excess_loss_db", "tx_gain_dbi", "rx_gain_dbi"});
    const auto model = r.get_or<std::string>(node, "model", ctx, "free_space");
    if (model != "free_space") {
        fail(node["model"], "path_loss.model: unsupported model '" + model + "' (free_space)");
    }
    m.excess_loss_db = r.get_or<double>(node, "excess_loss_db", ctx, m.excess_loss_db);
    m.tx_gain_dbi = r.get_or<double>(node, "tx_gain_dbi", ctx, m.tx_gain_dbi);
    m.rx_gain_dbi = r.get_or<double>(node, "rx_gain_dbi", ctx, m.rx_gain_dbi);
    build(node, ctx, [&] {
        m.validate();
        return 0;
    });
}

HarmonicProfile read_harmonics(const Reader& r, const YAML::Node& node) {
    if (!node.IsSequence()) {
        fail(node, "harmonics: expected a list of {order, level_dbm}");
    }
    std::map<int, DbmPower> levels;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string ctx = "harmonics[" + std::to_string(i) + "]";
        r.check_keys(node[i], ctx, {"order", "level_dbm"});
        const int order = r.get<int>(node[i], "order", ctx);
        const auto level = read_dbm(r, node[i], "level_dbm", ctx);
        if (!levels.emplace(order, level).second) {
            fail(node[i], ctx + ": duplicate harmonic order " + std::to_string(order));
        }
    }
    return build(node, "harmonics", [&] { return HarmonicProfile(std::move(levels)); });
}

NcuScenario read_ncu(const Reader& r, const YAML::Node& node) {
    const std::string ctx = "ncu";
    r.check_keys(node, ctx,
                 {"picocell_signal_dbm", "ground_signal_dbm", "floor_offset_db", "required_cn_db", "margin_db"});
    NcuScenario n;
    n.config.picocell_signal = read_dbm(r, node, "picocell_signal_dbm", ctx);
    n.ground_signal = node["ground_signal_dbm"] ? read_dbm(r, node, "ground_signal_dbm", ctx) : DbmPower::silent();
    n.config.floor_offset_db = r.get_or<double>(node, "floor_offset_db", ctx, n.config.floor_offset_db);
    n.config.required_cn_db = r.get_or<double>(node, "required_cn_db", ctx, n.config.required_cn_db);
    n.config.margin_db = r.get_or<double>(node, "margin_db", ctx, n.config.margin_db);
    return n;
}

void read_analysis(const Reader& r, const YAML::Node& node, AnalysisOptions& a) {
    const std::string ctx = "analysis";
    r.check_keys(node, ctx, {"max_harmonic_order", "guard_mhz", "sample_rate_hz", "coupling_db", "ramp_us"});
    a.max_harmonic_order = r.get_or<int>(node, "max_harmonic_order", ctx, a.max_harmonic_order);
    a.guard_mhz = r.get_or<double>(node, "guard_mhz", ctx, a.guard_mhz);
    a.sample_rate_hz = r.get_or<double>(node, "sample_rate_hz", ctx, a.sample_rate_hz);
    a.coupling_db = r.get_or<double>(node, "coupling_db", ctx, a.coupling_db);
    a.ramp_us = r.get_or<double>(node, "ramp_us", ctx, a.ramp_us);
}

template <typename F>
void for_each_item(const YAML::Node& root, const char* key, F&& f) {
    const auto list = root[key];
    if (!list || list.IsNull()) {
        return;
    }
    if (!list.IsSequence()) {
        fail(list, std::string(key) + ": expected a list");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        f(list[i], i);
    }
}

}  // namespace

LoadedScenario parse_scenario(std::string_view text, const LoadOptions& options) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError("parse error: " + e.msg, e.mark.line, e.mark.column);
    }

    LoadedScenario out;
    Reader r(options, out.warnings);
    Scenario& s = out.scenario;
    r.check_keys(root, "scenario",
                 {"name", "horizon_ms", "sim", "stations", "triggers", "victims", "band_plan", "path_loss",
                  "harmonics", "ncu", "analysis"});

    s.name = r.get_or<std::string>(root, "name", "scenario", "");
    if (root["horizon_ms"]) {
        s.horizon = ms_to_ns(r.as<double>(root["horizon_ms"], "horizon_ms"));
    }
    if (root["sim"]) {
        read_sim(r, root["sim"], s.sim);
    }
    for_each_item(root, "stations", [&](const YAML::Node& n, std::size_t i) { read_station(r, n, i, s); });
    for_each_item(root, "triggers", [&](const YAML::Node& n, std::size_t i) { read_trigger(r, n, i, s); });
    for_each_item(root, "victims", [&](const YAML::Node& n, std::size_t i) { read_victim(r, n, i, s); });
    if (root["band_plan"]) {
        s.band_plan.clear();
        s.band_plan_defaulted = false;
        for_each_item(root, "band_plan", [&](const YAML::Node& n, std::size_t i) {
            const std::string ctx = "band_plan[" + std::to_string(i) + "]";
            r.check_keys(n, ctx, {"name", "band_mhz"});
            s.band_plan.push_back({r.get<std::string>(n, "name", ctx), read_band(r, n, ctx)});
        });
    }
    if (root["path_loss"]) {
        read_path_loss(r, root["path_loss"], s.path_loss);
    }
    if (root["harmonics"]) {
        s.harmonics = read_harmonics(r, root["harmonics"]);
        s.harmonics_defaulted = false;
    }
    if (root["ncu"]) {
        s.ncu = read_ncu(r, root["ncu"]);
    }
    if (root["analysis"]) {
        read_analysis(r, root["analysis"], s.analysis);
    }

    validate(s);
    return out;
}

LoadedScenario load_scenario(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read scenario file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str(), options);
    } catch (const ConfigError& e) {
        throw e.prefixed(path.string() + ": ");
    }
}

void validate(const Scenario& s) {
    s.sim.validate();

    std::set<std::string, std::less<>> victim_names;
    for (const auto& v : s.victims) {
        if (v.name.empty()) {
            throw ConfigError("victim id must not be empty");
        }
        if (!victim_names.insert(v.name).second) {
            throw ConfigError("duplicate victim id '" + v.name + "'");
        }
        v.validate();
    }

    for (const auto& [station, table] : s.distances) {
        const bool declared = std::any_of(s.sim.stations.begin(), s.sim.stations.end(),
                                          [&](const StationSpec& st) { return st.id == station; });
        if (!declared) {
            throw ConfigError("distances given for undeclared station '" + station + "'");
        }
        for (const auto& [victim, metres] : table) {
            if (!victim_names.contains(victim)) {
                throw ConfigError("station '" + station + "' references undeclared victim '" + victim + "'");
            }
            if (!std::isfinite(metres) || !(metres > 0.0)) {
                throw ConfigError("station '" + station + "': distance to '" + victim + "' must be positive");
            }
        }
    }
    for (const auto& st : s.sim.stations) {
        for (const auto& victim : victim_names) {
            auto it = s.distances.find(st.id);
            if (it == s.distances.end() || !it->second.contains(victim)) {
                throw ConfigError("station '" + st.id + "' has no distance to victim '" + victim + "'");
            }
        }
    }

    try {
        s.path_loss.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("path_loss: ") + e.what());
    }
    const auto& a = s.analysis;
    if (a.max_harmonic_order < 1) {
        throw ConfigError("analysis.max_harmonic_order must be >= 1");
    }
    if (!std::isfinite(a.guard_mhz) || a.guard_mhz < 0.0) {
        throw ConfigError("analysis.guard_mhz must be >= 0");
    }
    if (!std::isfinite(a.sample_rate_hz) || a.sample_rate_hz < kMinEnvelopeSampleRateHz) {
        throw ConfigError("analysis.sample_rate_hz must be at least 8000");
    }
    if (!std::isfinite(a.coupling_db) || a.coupling_db < 0.0) {
        throw ConfigError("analysis.coupling_db must be >= 0");
    }
    if (!std::isfinite(a.ramp_us) || a.ramp_us < 0.0) {
        throw ConfigError("analysis.ramp_us must be >= 0");
    }
    if (s.horizon && s.horizon->count() <= 0) {
        throw ConfigError("horizon_ms must be positive");
    }
}

std::string format_number(double v) {
    if (std::isinf(v)) {
        return v < 0 ? "-.inf" : ".inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void emit_band(YAML::Emitter& out, const FrequencyBand& b) {
    out << YAML::Key << "band_mhz" << YAML::Value << YAML::Flow << YAML::BeginSeq << format_number(b.low())
        << format_number(b.high()) << YAML::EndSeq;
}

void emit_number(YAML::Emitter& out, const char* key, double v) {
    out << YAML::Key << key << YAML::Value << format_number(v);
}

}  // namespace

std::string to_canonical_text(const Scenario& s) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << s.name;
    if (s.horizon) {
        emit_number(out, "horizon_ms", ns_to_ms(*s.horizon));
    }

    out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << s.sim.seed;
    out << YAML::Key << "max_attempts" << YAML::Value << s.sim.max_attempts;
    out << YAML::Key << "backoff_window" << YAML::Value << s.sim.backoff_window;
    out << YAML::Key << "capture" << YAML::Value << (s.sim.capture ? "true" : "false");
    out << YAML::Key << "connection_delay_frames" << YAML::Value << s.sim.connection_delay_frames;
    emit_number(out, "rach_burst_fraction", s.sim.rach_burst_fraction);
    emit_number(out, "slot_us", s.sim.timing.slot_us());
    out << YAML::Key << "layout" << YAML::Value << s.sim.layout.to_string();
    out << YAML::EndMap;

    out << YAML::Key << "stations" << YAML::Value << YAML::BeginSeq;
    for (const auto& st : s.sim.stations) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << st.id;
        out << YAML::Key << "traffic_slot" << YAML::Value << st.traffic_slot;
        out << YAML::Key << "connected_power_level" << YAML::Value << st.connected_power.index();
        out << YAML::Key << "rach_power_level" << YAML::Value << st.rach_power.index();
        if (st.arfcn) {
            out << YAML::Key << "arfcn" << YAML::Value << st.arfcn->number();
        }
        if (st.call_duration) {
            emit_number(out, "call_duration_ms", ns_to_ms(*st.call_duration));
        }
        out << YAML::Key << "distances_m" << YAML::Value << YAML::BeginMap;
        if (auto it = s.distances.find(st.id); it != s.distances.end()) {
            for (const auto& [victim, metres] : it->second) {
                out << YAML::Key << YAML::DoubleQuoted << victim << YAML::Value << format_number(metres);
            }
        }
        out << YAML::EndMap;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "triggers" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : s.sim.trigger_schedule) {
        out << YAML::Flow << YAML::BeginMap;
        emit_number(out, "time_ms", ns_to_ms(t.time));
        out << YAML::Key << "station" << YAML::Value << YAML::DoubleQuoted << t.station;
        out << YAML::Key << "trigger" << YAML::Value << std::string(to_string(t.trigger));
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "victims" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : s.victims) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << v.name;
        emit_band(out, v.band);
        emit_number(out, "sensitivity_dbm", v.sensitivity.value());
        emit_number(out, "blocking_threshold_dbm", v.blocking_threshold.value());
        if (v.adjacent_selectivity_db) {
            emit_number(out, "adjacent_selectivity_db", *v.adjacent_selectivity_db);
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    if (!s.band_plan_defaulted) {
        out << YAML::Key << "band_plan" << YAML::Value << YAML::BeginSeq;
        for (const auto& e : s.band_plan) {
            out << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << e.name;
            emit_band(out, e.band);
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }

    out << YAML::Key << "path_loss" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "model" << YAML::Value << "free_space";
    emit_number(out, "excess_loss_db", s.path_loss.excess_loss_db);
    emit_number(out, "tx_gain_dbi", s.path_loss.tx_gain_dbi);
    emit_number(out, "rx_gain_dbi", s.path_loss.rx_gain_dbi);
    out << YAML::EndMap;

    if (!s.harmonics_defaulted) {
        out << YAML::Key << "harmonics" << YAML::Value << YAML::BeginSeq;
        for (const auto& [order, level] : s.harmonics.levels()) {
            out << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "order" << YAML::Value << order;
            emit_number(out, "level_dbm", level.value());
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }

    if (s.ncu) {
        out << YAML::Key << "ncu" << YAML::Value << YAML::BeginMap;
        emit_number(out, "picocell_signal_dbm", s.ncu->config.picocell_signal.value());
        emit_number(out, "ground_signal_dbm", s.ncu->ground_signal.value());
        emit_number(out, "floor_offset_db", s.ncu->config.floor_offset_db);
        emit_number(out, "required_cn_db", s.ncu->config.required_cn_db);
        emit_number(out, "margin_db", s.ncu->config.margin_db);
        out << YAML::EndMap;
    }

    out << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "max_harmonic_order" << YAML::Value << s.analysis.max_harmonic_order;
    emit_number(out, "guard_mhz", s.analysis.guard_mhz);
    emit_number(out, "sample_rate_hz", s.analysis.sample_rate_hz);
    emit_number(out, "coupling_db", s.analysis.coupling_db);
    emit_number(out, "ramp_us", s.analysis.ramp_us);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace aerogsm
