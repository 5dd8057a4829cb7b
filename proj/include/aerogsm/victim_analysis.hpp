#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerogsm/frame_engine.hpp"
#include "aerogsm/gsm_phy.hpp"
#include "aerogsm/propagation.hpp"
#include "aerogsm/rach_sim.hpp"

namespace aerogsm {

struct BandPlanEntry {
    std::string name;
    FrequencyBand band;

    bool operator==(const BandPlanEntry&) const = default;
};

/// Nominal width given to band-plan rows that list a single frequency.
inline constexpr double kSingleFrequencyWidthMhz = 1.0;

/// The twelve main avionics allocations, HF through radio altimeter.
std::vector<BandPlanEntry> default_band_plan();

struct VictimReceiver {
    std::string name;
    FrequencyBand band;
    DbmPower sensitivity;
    /// Strongest out-of-band level tolerated before sensitivity degrades.
    DbmPower blocking_threshold;
    /// Rejection applied to near-miss components, when known.
    std::optional<double> adjacent_selectivity_db;

    /// Throws ConfigError unless blocking_threshold > sensitivity.
    void validate() const;

    bool operator==(const VictimReceiver&) const = default;
};

struct NcuConfig {
    /// Onboard picocell level seen by the phone.
    DbmPower picocell_signal;
    double floor_offset_db = 12.0;
    double required_cn_db = 9.0;
    double margin_db = 3.0;

    bool operator==(const NcuConfig&) const = default;
};

enum class OverlapVerdict { Clear, NearMiss, Overlap };
enum class VictimVerdict { Clear, NearMiss, Overlap, Blocked };
enum class CampingVerdict { CampingPossible, CampingBlocked };

std::string_view to_string(OverlapVerdict v);
std::string_view to_string(VictimVerdict v);
std::string_view to_string(CampingVerdict v);

/// OVERLAP if the closed intervals intersect, NEAR_MISS if the gap is at
/// most guard_mhz, CLEAR otherwise.
OverlapVerdict overlap_check(const FrequencyBand& emission, const FrequencyBand& victim,
                             double guard_mhz = 5.0);

struct ScreeningRow {
    EmissionComponent emission;
    std::string entry;
    FrequencyBand entry_band;
    OverlapVerdict verdict = OverlapVerdict::Clear;
};

/// One row per (component, plan entry), component-major.
std::vector<ScreeningRow> screen_band_plan(std::span<const EmissionComponent> emissions,
                                           std::span<const BandPlanEntry> plan, double guard_mhz = 5.0);

struct VictimExposure {
    std::string victim;
    /// Silent when nothing reached the victim.
    DbmPower peak = DbmPower::silent();
    /// threshold - peak; +inf with no exposure.
    double margin_db = 0.0;
    std::optional<TdmaPosition> worst_slot;
    VictimVerdict verdict = VictimVerdict::Clear;

    bool exposed() const noexcept { return !peak.is_silent(); }
};

struct InterferenceReport {
    std::vector<VictimExposure> victims;

    bool any_blocked() const;
};

/// station id -> victim name -> metres.
using DistanceTable = std::map<std::string, std::map<std::string, double>, std::less<>>;

struct BlockingOptions {
    int max_harmonic_order = 3;
    double guard_mhz = 5.0;
};

/// Peak per-slot aggregate of all components landing in or near each victim
/// band, and the resulting blocking margin.
/// Throws ConfigError for a missing distance and SubWavelengthDistance when a
/// station is closer than one wavelength of its fundamental.
InterferenceReport blocking_report(std::span<const EmissionEvent> log,
                                   std::span<const VictimReceiver> victims, const PathLossModel& model,
                                   const HarmonicProfile& hp, const DistanceTable& distances,
                                   const TimingConstants& timing, const BlockingOptions& options = {});

struct NcuResult {
    CampingVerdict verdict = CampingVerdict::CampingBlocked;
    DbmPower noise_floor = DbmPower::silent();
    /// Ground signal over the NCU floor.
    double ground_cn_db = 0.0;
};

NcuResult ncu_camping_check(DbmPower ground_signal, const NcuConfig& ncu);

}  // namespace aerogsm
