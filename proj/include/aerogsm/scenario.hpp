#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aerogsm/propagation.hpp"
#include "aerogsm/rach_sim.hpp"
#include "aerogsm/victim_analysis.hpp"

namespace aerogsm {

struct AnalysisOptions {
    int max_harmonic_order = 3;
    double guard_mhz = 5.0;
    double sample_rate_hz = 48'000.0;
    /// Radiated-envelope to detected-audio attenuation.
    double coupling_db = 0.0;
    double ramp_us = 0.0;

    bool operator==(const AnalysisOptions&) const = default;
};

struct NcuScenario {
    NcuConfig config{.picocell_signal = DbmPower(-60.0)};
    /// Strongest ground base station heard in the cabin.
    DbmPower ground_signal = DbmPower::silent();

    bool operator==(const NcuScenario&) const = default;
};

struct Scenario {
    std::string name;
    std::optional<Nanos> horizon;
    SimConfig sim;
    DistanceTable distances;
    std::vector<VictimReceiver> victims;
    std::vector<BandPlanEntry> band_plan = default_band_plan();
    bool band_plan_defaulted = true;
    PathLossModel path_loss;
    HarmonicProfile harmonics = HarmonicProfile::placeholder();
    bool harmonics_defaulted = true;
    std::optional<NcuScenario> ncu;
    AnalysisOptions analysis;

    bool operator==(const Scenario&) const = default;
};

struct LoadOptions {
    /// Unknown keys become warnings instead of errors.
    bool lax = false;
};

struct LoadedScenario {
    Scenario scenario;
    std::vector<std::string> warnings;
};

/// Throws ConfigError (with line and column where known).
LoadedScenario parse_scenario(std::string_view text, const LoadOptions& options = {});
LoadedScenario load_scenario(const std::filesystem::path& path, const LoadOptions& options = {});

/// Cross-checks stations, victims and distances. Throws ConfigError.
void validate(const Scenario& s);

/// Canonical text form; parse_scenario(to_canonical_text(s)) == s.
std::string to_canonical_text(const Scenario& s);

/// Shortest decimal text that reads back to the same double ("-.inf" for -inf).
std::string format_number(double v);

}  // namespace aerogsm
