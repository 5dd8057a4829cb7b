#include "aerogsm/victim_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aerogsm/errors.hpp"

namespace aerogsm {

std::string_view to_string(OverlapVerdict v) {
    switch (v) {
        case OverlapVerdict::Clear: return "CLEAR";
        case OverlapVerdict::NearMiss: return "NEAR_MISS";
        case OverlapVerdict::Overlap: return "OVERLAP";
    }
    return "?";
}

std::string_view to_string(VictimVerdict v) {
    switch (v) {
        case VictimVerdict::Clear: return "CLEAR";
        case VictimVerdict::NearMiss: return "NEAR_MISS";
        case VictimVerdict::Overlap: return "OVERLAP";
        case VictimVerdict::Blocked: return "BLOCKED";
    }
    return "?";
}

std::string_view to_string(CampingVerdict v) {
    return v == CampingVerdict::CampingPossible ? "CAMPING_POSSIBLE" : "CAMPING_BLOCKED";
}

std::vector<BandPlanEntry> default_band_plan() {
    constexpr double w = kSingleFrequencyWidthMhz;
    return {
        {"HF communication", {2.0, 30.0}},
        {"VHF communication", {118.0, 136.975}},
        {"Marker Beacon", {75.0, 75.0 + w}},
        {"VOR", {108.00, 117.95}},
        {"Localizer", {108.10, 111.95}},
        {"Glideslope", {329.15, 335.0}},
        {"DME", {962.0, 1213.0}},
        {"GPS", {1575.0, 1575.0 + w}},
        {"Satellite L-band", {1530.0, 1660.5}},
        {"Doppler navigation", {8800.0, 9800.0}},
        {"Weather radar", {4000.0, 8000.0}},
        {"Radio Altimeter", {4250.0, 4350.0}},
    };
}

void VictimReceiver::validate() const {
    if (!(blocking_threshold > sensitivity)) {
        throw ConfigError("victim '" + name + "': blocking threshold must exceed sensitivity");
    }
    if (adjacent_selectivity_db && (!std::isfinite(*adjacent_selectivity_db) || *adjacent_selectivity_db < 0.0)) {
        throw ConfigError("victim '" + name + "': adjacent selectivity must be >= 0 dB");
    }
}

bool InterferenceReport::any_blocked() const {
    return std::any_of(victims.begin(), victims.end(),
                       [](const VictimExposure& v) { return v.verdict == VictimVerdict::Blocked; });
}

OverlapVerdict overlap_check(const FrequencyBand& emission, const FrequencyBand& victim, double guard_mhz) {
    if (!(guard_mhz >= 0.0)) {
        throw std::invalid_argument("guard must be >= 0 MHz");
    }
    const double gap = std::max(emission.low(), victim.low()) - std::min(emission.high(), victim.high());
    if (gap <= 0.0) {
        return OverlapVerdict::Overlap;
    }
    return gap <= guard_mhz ? OverlapVerdict::NearMiss : OverlapVerdict::Clear;
}

std::vector<ScreeningRow> screen_band_plan(std::span<const EmissionComponent> emissions,
                                           std::span<const BandPlanEntry> plan, double guard_mhz) {
    std::vector<ScreeningRow> rows;
    rows.reserve(emissions.size() * plan.size());
    for (const auto& c : emissions) {
        for (const auto& entry : plan) {
            rows.push_back({c, entry.name, entry.band, overlap_check(c.band, entry.band, guard_mhz)});
        }
    }
    return rows;
}

namespace {

double distance_for(const DistanceTable& distances, const std::string& station, const std::string& victim) {
    auto s = distances.find(station);
    if (s == distances.end()) {
        throw ConfigError("no distances given for station '" + station + "'");
    }
    auto v = s->second.find(victim);
    if (v == s->second.end()) {
        throw ConfigError("station '" + station + "' has no distance to victim '" + victim + "'");
    }
    return v->second;
}

}  // namespace

InterferenceReport blocking_report(std::span<const EmissionEvent> log,
                                   std::span<const VictimReceiver> victims, const PathLossModel& model,
                                   const HarmonicProfile& hp, const DistanceTable& distances,
                                   const TimingConstants& timing, const BlockingOptions& options) {
    model.validate();
    for (const auto& v : victims) {
        v.validate();
    }

    struct Accumulator {
        double slot_mw = 0.0;
        bool saw_overlap = false;
        bool saw_near_miss = false;
    };
    // Per victim: linear sum for the current slot and worst slot so far.
    struct Running {
        double peak_mw = 0.0;
        std::optional<TdmaPosition> worst;
        bool overlap = false;
        bool near_miss = false;
    };
    std::vector<Running> running(victims.size());
    std::vector<Accumulator> slot_acc(victims.size());

    auto flush = [&](const TdmaPosition& pos) {
        for (std::size_t i = 0; i < victims.size(); ++i) {
            auto& acc = slot_acc[i];
            auto& run = running[i];
            if (acc.slot_mw > run.peak_mw) {
                run.peak_mw = acc.slot_mw;
                run.worst = pos;
            }
            run.overlap |= acc.saw_overlap;
            run.near_miss |= acc.saw_near_miss;
            acc = {};
        }
    };

    std::vector<const EmissionEvent*> ordered;
    ordered.reserve(log.size());
    for (const auto& e : log) {
        ordered.push_back(&e);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const EmissionEvent* a, const EmissionEvent* b) { return a->time < b->time; });

    std::optional<TdmaPosition> current;
    for (const auto* ep : ordered) {
        const auto& e = *ep;
        const auto pos = position_at(e.time, timing);
        if (current && *current != pos) {
            flush(*current);
        }
        current = pos;

        const auto components = emission_components(e, hp, options.max_harmonic_order);
        const double lambda = wavelength_m(e.band.low());
        for (std::size_t i = 0; i < victims.size(); ++i) {
            const auto& victim = victims[i];
            const double d = distance_for(distances, e.source, victim.name);
            if (d < lambda) {
                throw SubWavelengthDistance("station '" + e.source + "' is " + std::to_string(d) +
                                            " m from victim '" + victim.name +
                                            "', inside one wavelength (" + std::to_string(lambda) +
                                            " m); free-space loss does not apply");
            }
            for (const auto& c : components) {
                const auto verdict = overlap_check(c.band, victim.band, options.guard_mhz);
                if (verdict == OverlapVerdict::Clear || c.level.is_silent()) {
                    continue;
                }
                auto rx = received_power(c.level, model, d, c.band.low());
                if (verdict == OverlapVerdict::NearMiss) {
                    slot_acc[i].saw_near_miss = true;
                    if (victim.adjacent_selectivity_db) {
                        rx = DbmPower(rx.value() - *victim.adjacent_selectivity_db);
                    }
                } else {
                    slot_acc[i].saw_overlap = true;
                }
                slot_acc[i].slot_mw += dbm_to_mw(rx);
            }
        }
    }
    if (current) {
        flush(*current);
    }

    InterferenceReport report;
    for (std::size_t i = 0; i < victims.size(); ++i) {
        const auto& run = running[i];
        VictimExposure ex;
        ex.victim = victims[i].name;
        if (run.peak_mw > 0.0) {
            ex.peak = mw_to_dbm(run.peak_mw);
            ex.margin_db = victims[i].blocking_threshold.value() - ex.peak.value();
            ex.worst_slot = run.worst;
        } else {
            ex.margin_db = std::numeric_limits<double>::infinity();
        }
        if (ex.margin_db < 0.0) {
            ex.verdict = VictimVerdict::Blocked;
        } else if (run.overlap) {
            ex.verdict = VictimVerdict::Overlap;
        } else if (run.near_miss) {
            ex.verdict = VictimVerdict::NearMiss;
        }
        report.victims.push_back(std::move(ex));
    }
    return report;
}

NcuResult ncu_camping_check(DbmPower ground_signal, const NcuConfig& ncu) {
    NcuResult r;
    r.noise_floor = ncu.picocell_signal.is_silent()
                        ? DbmPower::silent()
                        : DbmPower(ncu.picocell_signal.value() - ncu.floor_offset_db);
    if (ground_signal.is_silent()) {
        r.ground_cn_db = -std::numeric_limits<double>::infinity();
        r.verdict = CampingVerdict::CampingBlocked;
        return r;
    }
    // Verdict depends only on ground - picocell + offset.
    r.ground_cn_db = ground_signal.value() - ncu.picocell_signal.value() + ncu.floor_offset_db;
    r.verdict = r.ground_cn_db < ncu.required_cn_db ? CampingVerdict::CampingBlocked
                                                    : CampingVerdict::CampingPossible;
    return r;
}

}  // namespace aerogsm
