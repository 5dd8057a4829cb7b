#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerogsm/scenario.hpp"
#include "aerogsm/tdma_noise.hpp"

namespace aerogsm {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct Provenance {
    std::string tool_version{kToolVersion};
    std::string scenario_name;
    std::uint64_t seed = 0;
    Nanos horizon{0};
    bool harmonics_defaulted = false;
    bool band_plan_defaulted = false;
};

struct BuzzReport {
    double fundamental_hz = 0.0;
    /// Strongest audio-band line in the envelope spectrum.
    double dominant_hz = 0.0;
    AudioLevelReport audio;
    SpectrumResult spectrum;
};

struct RunReport {
    Provenance provenance;
    std::vector<EmissionEvent> log;
    SimStats stats;
    std::vector<VictimReceiver> victims;
    InterferenceReport interference;
    std::vector<ScreeningRow> screening;
    std::optional<NcuResult> ncu;
    /// Absent when the horizon is shorter than two frames.
    std::optional<BuzzReport> buzz;
};

/// Each station's random-access burst at its RACH power with all profile
/// harmonics up to the analysis order, duplicates removed.
std::vector<EmissionComponent> nominal_components(const Scenario& s);

std::vector<ScreeningRow> screen_scenario(const Scenario& s);

std::optional<BuzzReport> analyze_buzz(std::span<const EmissionEvent> log, const Scenario& s, Nanos horizon);

/// Simulate, propagate, screen, check the NCU and analyse the buzz.
/// Deterministic in (scenario, horizon).
RunReport run_scenario(const Scenario& s, Nanos horizon);

std::string render_summary(const RunReport& r);
/// Structured report body; contains no wall-clock data.
std::string render_json(const RunReport& r);
std::string render_emissions_csv(std::span<const EmissionEvent> log);
std::string render_margins_csv(const RunReport& r);
std::string render_screening_csv(std::span<const ScreeningRow> rows);
std::string render_spectrum_csv(const SpectrumResult& spectrum);
std::string render_trace_csv(const EnvelopeTrace& trace);
std::string render_screening_table(std::span<const ScreeningRow> rows);

enum class ReportFormat { Summary, Csv, Json };

std::optional<ReportFormat> parse_format(std::string_view name);

struct ManifestEntry {
    std::filesystem::path path;
    std::string sha256;
};

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Writes a set of named files into out_dir. All files are staged to
/// temporaries first and renamed into place only once every write has
/// succeeded; on failure the temporaries are removed and std::runtime_error
/// (or std::filesystem::filesystem_error) is thrown.
std::vector<ManifestEntry> write_files_atomically(
    const std::filesystem::path& out_dir, const std::vector<std::pair<std::string, std::string>>& files);

/// summary -> summary.txt; json -> report.json;
/// csv -> emissions.csv, margins.csv, screening.csv, spectrum.csv.
std::vector<ManifestEntry> emit_report(const RunReport& r, const std::filesystem::path& out_dir,
                                       const std::set<ReportFormat>& formats);

}  // namespace aerogsm
