#include "aerogsm/report.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <stdexcept>

namespace aerogsm {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::vector<EmissionComponent> nominal_components(const Scenario& s) {
    std::vector<EmissionComponent> out;
    for (const auto& st : s.sim.stations) {
        const EmissionEvent burst{.time = Nanos(0),
                                  .duration = s.sim.rach_burst_duration(),
                                  .source = st.id,
                                  .kind = BurstKind::RachBurst,
                                  .power = power_level_to_dbm(st.rach_power),
                                  .band = st.emission_band()};
        for (const auto& c : emission_components(burst, s.harmonics, s.analysis.max_harmonic_order)) {
            if (std::find(out.begin(), out.end(), c) == out.end()) {
                out.push_back(c);
            }
        }
    }
    return out;
}

std::vector<ScreeningRow> screen_scenario(const Scenario& s) {
    const auto components = nominal_components(s);
    return screen_band_plan(components, s.band_plan, s.analysis.guard_mhz);
}

std::optional<BuzzReport> analyze_buzz(std::span<const EmissionEvent> log, const Scenario& s, Nanos horizon) {
    const auto& timing = s.sim.timing;
    if (horizon < timing.frame() * 2) {
        return std::nullopt;
    }
    const auto trace = synthesize_envelope(log, Nanos(0), horizon, s.analysis.sample_rate_hz, s.analysis.ramp_us);
    BuzzReport b;
    b.fundamental_hz = buzz_fundamental_hz(timing);
    b.spectrum = envelope_spectrum(trace, timing);
    b.audio = coupled_audio_estimate(trace, s.analysis.coupling_db, timing);
    if (!b.audio.silent) {
        b.dominant_hz = b.spectrum.frequency(b.spectrum.dominant_bin(20.0, 20'000.0));
    }
    return b;
}

RunReport run_scenario(const Scenario& s, Nanos horizon) {
    validate(s);
    RunReport r;
    r.provenance.scenario_name = s.name;
    r.provenance.seed = s.sim.seed;
    r.provenance.horizon = horizon;
    r.provenance.harmonics_defaulted = s.harmonics_defaulted;
    r.provenance.band_plan_defaulted = s.band_plan_defaulted;

    auto sim = run(s.sim, horizon);
    r.log = std::move(sim.log);
    r.stats = std::move(sim.stats);
    r.victims = s.victims;
    r.interference = blocking_report(r.log, s.victims, s.path_loss, s.harmonics, s.distances, s.sim.timing,
                                     {.max_harmonic_order = s.analysis.max_harmonic_order,
                                      .guard_mhz = s.analysis.guard_mhz});
    r.screening = screen_scenario(s);
    if (s.ncu) {
        r.ncu = ncu_camping_check(s.ncu->ground_signal, s.ncu->config);
    }
    r.buzz = analyze_buzz(r.log, s, horizon);
    return r;
}

namespace {

std::string num(double v) {
    if (std::isinf(v)) {
        return v < 0 ? "-inf" : "inf";
    }
    return format_number(v);
}

// Exact decimal microseconds from integer nanoseconds.
std::string micros(Nanos t) {
    const auto ns = t.count();
    const auto whole = ns / 1000;
    const auto frac = std::llabs(ns % 1000);
    return fmt::format("{}{}.{:03d}", ns < 0 && whole == 0 ? "-" : "", whole, frac);
}

ordered_json json_num(double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json json_band(const FrequencyBand& b) {
    return ordered_json::array({b.low(), b.high()});
}

const VictimReceiver* find_victim(const RunReport& r, const std::string& name) {
    for (const auto& v : r.victims) {
        if (v.name == name) {
            return &v;
        }
    }
    return nullptr;
}

}  // namespace

std::string render_emissions_csv(std::span<const EmissionEvent> log) {
    std::string out = "time_us,duration_us,station,kind,power_dbm,band_low_mhz,band_high_mhz\n";
    for (const auto& e : log) {
        out += fmt::format("{},{},{},{},{},{},{}\n", micros(e.time), micros(e.duration), e.source,
                           to_string(e.kind), num(e.power.value()), num(e.band.low()), num(e.band.high()));
    }
    return out;
}

std::string render_margins_csv(const RunReport& r) {
    std::string out =
        "victim,band_low_mhz,band_high_mhz,blocking_threshold_dbm,peak_dbm,margin_db,worst_frame,worst_slot,"
        "verdict\n";
    for (const auto& ex : r.interference.victims) {
        const auto* v = find_victim(r, ex.victim);
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", ex.victim, v ? num(v->band.low()) : "",
                           v ? num(v->band.high()) : "", v ? num(v->blocking_threshold.value()) : "",
                           num(ex.peak.value()), num(ex.margin_db),
                           ex.worst_slot ? std::to_string(ex.worst_slot->frame) : "",
                           ex.worst_slot ? std::to_string(ex.worst_slot->slot) : "", to_string(ex.verdict));
    }
    return out;
}

std::string render_screening_csv(std::span<const ScreeningRow> rows) {
    std::string out =
        "order,emission_low_mhz,emission_high_mhz,level_dbm,entry,entry_low_mhz,entry_high_mhz,verdict\n";
    for (const auto& row : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", row.emission.order, num(row.emission.band.low()),
                           num(row.emission.band.high()), num(row.emission.level.value()), row.entry,
                           num(row.entry_band.low()), num(row.entry_band.high()), to_string(row.verdict));
    }
    return out;
}

std::string render_spectrum_csv(const SpectrumResult& spectrum) {
    std::string out = "freq_hz,magnitude\n";
    for (std::size_t k = 0; k < spectrum.magnitudes.size(); ++k) {
        out += fmt::format("{},{}\n", num(spectrum.frequency(k)), num(spectrum.magnitudes[k]));
    }
    return out;
}

std::string render_trace_csv(const EnvelopeTrace& trace) {
    std::string out = "time_s,power_mw\n";
    const double t0 = to_seconds(trace.start);
    for (std::size_t i = 0; i < trace.samples_mw.size(); ++i) {
        out += fmt::format("{},{}\n", num(t0 + static_cast<double>(i) / trace.sample_rate_hz),
                           num(trace.samples_mw[i]));
    }
    return out;
}

std::string render_screening_table(std::span<const ScreeningRow> rows) {
    std::string out = fmt::format("{:<6} {:>21} {:>9}  {:<20} {:>19}  {}\n", "order", "emission MHz", "dBm",
                                  "allocation", "allocation MHz", "verdict");
    for (const auto& row : rows) {
        out += fmt::format("{:<6} {:>10.1f}-{:<10.1f} {:>9.2f}  {:<20} {:>9.2f}-{:<9.2f}  {}\n", row.emission.order,
                           row.emission.band.low(), row.emission.band.high(), row.emission.level.value(),
                           row.entry, row.entry_band.low(), row.entry_band.high(), to_string(row.verdict));
    }
    return out;
}

std::string render_summary(const RunReport& r) {
    const auto& p = r.provenance;
    std::string out;
    out += fmt::format("aerogsm {} run report\n", p.tool_version);
    out += fmt::format("scenario: {}\nseed: {}\nhorizon: {} ms\n", p.scenario_name.empty() ? "(unnamed)" : p.scenario_name,
                       p.seed, num(static_cast<double>(p.horizon.count()) / 1e6));
    if (p.harmonics_defaulted) {
        out += "note: harmonic profile uses placeholder levels (-30 dBm at orders 2 and 3)\n";
    }
    if (p.band_plan_defaulted) {
        out += "note: built-in avionics band plan in use\n";
    }

    const auto& s = r.stats;
    out += "\nemissions\n";
    out += fmt::format("  RACH bursts:            {} ({} at 30 dBm)\n", s.rach_bursts, s.full_power_bursts);
    out += fmt::format("  traffic bursts:         {}\n", s.traffic_bursts);
    out += fmt::format("  max coincident RACH:    {}\n", s.max_simultaneous_rach);
    out += fmt::format("  accesses ok/abandoned:  {}/{}\n", s.successful_accesses, s.abandoned_accesses);
    out += fmt::format("  ignored triggers:       {}\n", s.ignored_triggers);
    for (const auto& [station, delays] : s.time_to_connect) {
        for (const auto& d : delays) {
            out += fmt::format("  time to connect {}: {:.3f} ms\n", station, static_cast<double>(d.count()) / 1e6);
        }
    }

    out += "\nvictims\n";
    for (const auto& ex : r.interference.victims) {
        if (!ex.exposed()) {
            out += fmt::format("  {:<20} no exposure  {}\n", ex.victim, to_string(ex.verdict));
            continue;
        }
        out += fmt::format("  {:<20} peak {:8.2f} dBm  margin {:8.2f} dB  worst (frame {}, slot {})  {}\n", ex.victim,
                           ex.peak.value(), ex.margin_db, ex.worst_slot->frame, ex.worst_slot->slot,
                           to_string(ex.verdict));
    }

    out += "\nband plan screening (non-clear rows)\n";
    bool any = false;
    for (const auto& row : r.screening) {
        if (row.verdict == OverlapVerdict::Clear) {
            continue;
        }
        any = true;
        out += fmt::format("  order {} {:.1f}-{:.1f} MHz vs {}: {}\n", row.emission.order, row.emission.band.low(),
                           row.emission.band.high(), row.entry, to_string(row.verdict));
    }
    if (!any) {
        out += "  all clear\n";
    }

    if (r.ncu) {
        out += fmt::format("\nNCU: floor {} dBm, ground C/N {} dB -> {}\n", num(r.ncu->noise_floor.value()),
                           num(r.ncu->ground_cn_db), to_string(r.ncu->verdict));
    }

    if (r.buzz) {
        const auto& b = *r.buzz;
        out += fmt::format("\nbuzz: frame rate {:.3f} Hz", b.fundamental_hz);
        if (b.audio.silent) {
            out += ", envelope has no audio content\n";
        } else {
            out += fmt::format(", dominant line {:.2f} Hz, fundamental {:.2f} dB, audio band {:.2f} dB (coupling {} dB)\n",
                               b.dominant_hz, b.audio.fundamental_level_db, b.audio.audio_band_level_db,
                               num(b.audio.coupling_db));
        }
    } else {
        out += "\nbuzz: horizon shorter than two frames, not analysed\n";
    }
    return out;
}

std::string render_json(const RunReport& r) {
    ordered_json j;
    const auto& p = r.provenance;
    j["provenance"] = {{"tool_version", p.tool_version},
                       {"scenario", p.scenario_name},
                       {"seed", p.seed},
                       {"horizon_ms", static_cast<double>(p.horizon.count()) / 1e6},
                       {"harmonics_defaulted", p.harmonics_defaulted},
                       {"band_plan_defaulted", p.band_plan_defaulted}};

    ordered_json ttc = ordered_json::object();
    for (const auto& [station, delays] : r.stats.time_to_connect) {
        auto arr = ordered_json::array();
        for (const auto& d : delays) {
            arr.push_back(static_cast<double>(d.count()) / 1e6);
        }
        ttc[station] = arr;
    }
    j["emissions"] = {{"events", r.log.size()},
                      {"rach_bursts", r.stats.rach_bursts},
                      {"full_power_rach_bursts", r.stats.full_power_bursts},
                      {"traffic_bursts", r.stats.traffic_bursts},
                      {"max_coincident_rach", r.stats.max_simultaneous_rach},
                      {"successful_accesses", r.stats.successful_accesses},
                      {"abandoned_accesses", r.stats.abandoned_accesses},
                      {"ignored_triggers", r.stats.ignored_triggers},
                      {"time_to_connect_ms", ttc}};

    auto victims = ordered_json::array();
    for (const auto& ex : r.interference.victims) {
        ordered_json v = {{"victim", ex.victim},
                          {"exposed", ex.exposed()},
                          {"peak_dbm", json_num(ex.peak.value())},
                          {"margin_db", json_num(ex.margin_db)},
                          {"verdict", to_string(ex.verdict)}};
        v["worst_slot"] = ex.worst_slot ? ordered_json{{"frame", ex.worst_slot->frame}, {"slot", ex.worst_slot->slot}}
                                        : ordered_json(nullptr);
        victims.push_back(std::move(v));
    }
    j["victims"] = std::move(victims);
    j["any_blocked"] = r.interference.any_blocked();

    auto screening = ordered_json::array();
    for (const auto& row : r.screening) {
        screening.push_back({{"order", row.emission.order},
                             {"emission_mhz", json_band(row.emission.band)},
                             {"level_dbm", json_num(row.emission.level.value())},
                             {"entry", row.entry},
                             {"entry_mhz", json_band(row.entry_band)},
                             {"verdict", to_string(row.verdict)}});
    }
    j["screening"] = std::move(screening);

    if (r.ncu) {
        j["ncu"] = {{"noise_floor_dbm", json_num(r.ncu->noise_floor.value())},
                    {"ground_cn_db", json_num(r.ncu->ground_cn_db)},
                    {"verdict", to_string(r.ncu->verdict)}};
    } else {
        j["ncu"] = nullptr;
    }

    if (r.buzz) {
        const auto& b = *r.buzz;
        auto harmonics = ordered_json::array();
        for (double h : b.audio.harmonic_levels_db) {
            harmonics.push_back(json_num(h));
        }
        j["buzz"] = {{"fundamental_hz", b.fundamental_hz},
                     {"dominant_hz", b.audio.silent ? ordered_json(nullptr) : ordered_json(b.dominant_hz)},
                     {"silent", b.audio.silent},
                     {"coupling_db", b.audio.coupling_db},
                     {"fundamental_level_db", json_num(b.audio.fundamental_level_db)},
                     {"harmonic_levels_db", harmonics},
                     {"audio_band_level_db", json_num(b.audio.audio_band_level_db)},
                     {"bin_hz", b.spectrum.bin_hz},
                     {"transform_size", b.spectrum.transform_size}};
    } else {
        j["buzz"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::optional<ReportFormat> parse_format(std::string_view name) {
    if (name == "summary") {
        return ReportFormat::Summary;
    }
    if (name == "csv") {
        return ReportFormat::Csv;
    }
    if (name == "json") {
        return ReportFormat::Json;
    }
    return std::nullopt;
}

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::vector<ManifestEntry> write_files_atomically(const fs::path& out_dir,
                                                  const std::vector<std::pair<std::string, std::string>>& files) {
    std::vector<ManifestEntry> manifest;
    if (files.empty()) {
        return manifest;
    }
    fs::create_directories(out_dir);

    std::vector<std::pair<fs::path, fs::path>> staged;  // temp, final
    auto discard = [&] {
        std::error_code ec;
        for (const auto& [tmp, final_path] : staged) {
            fs::remove(tmp, ec);
        }
    };
    try {
        for (const auto& [name, body] : files) {
            const auto final_path = out_dir / name;
            const auto tmp = out_dir / ("." + name + ".tmp");
            staged.emplace_back(tmp, final_path);
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            f.write(body.data(), static_cast<std::streamsize>(body.size()));
            f.flush();
            if (!f) {
                throw std::runtime_error("failed writing '" + tmp.string() + "'");
            }
            manifest.push_back({final_path, sha256_hex(body)});
        }
    } catch (...) {
        discard();
        throw;
    }
    for (std::size_t i = 0; i < staged.size(); ++i) {
        std::error_code ec;
        fs::rename(staged[i].first, staged[i].second, ec);
        if (ec) {
            staged.erase(staged.begin(), staged.begin() + static_cast<std::ptrdiff_t>(i));
            discard();
            throw fs::filesystem_error("cannot replace output file", staged.front().second, ec);
        }
    }
    return manifest;
}

std::vector<ManifestEntry> emit_report(const RunReport& r, const fs::path& out_dir,
                                       const std::set<ReportFormat>& formats) {
    std::vector<std::pair<std::string, std::string>> files;
    if (formats.contains(ReportFormat::Summary)) {
        files.emplace_back("summary.txt", render_summary(r));
    }
    if (formats.contains(ReportFormat::Json)) {
        files.emplace_back("report.json", render_json(r));
    }
    if (formats.contains(ReportFormat::Csv)) {
        files.emplace_back("emissions.csv", render_emissions_csv(r.log));
        files.emplace_back("margins.csv", render_margins_csv(r));
        files.emplace_back("screening.csv", render_screening_csv(r.screening));
        files.emplace_back("spectrum.csv", r.buzz ? render_spectrum_csv(r.buzz->spectrum) : "freq_hz,magnitude\n");
    }
    return write_files_atomically(out_dir, files);
}

}  // namespace aerogsm
