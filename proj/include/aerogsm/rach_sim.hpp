#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerogsm/frame_engine.hpp"
#include "aerogsm/gsm_phy.hpp"

namespace aerogsm {

enum class StationState { Idle, Accessing, Connected };

/// Reasons a phone starts a random access. All five are identical at the RF level.
enum class AccessTrigger { Call, Emergency, Reestablish, PageResponse, LocationUpdate };

enum class BurstKind { RachBurst, TrafficBurst };

enum class AttemptOutcome { Success, Collided };

std::string_view to_string(StationState s);
std::string_view to_string(AccessTrigger t);
std::string_view to_string(BurstKind k);
std::string_view to_string(AttemptOutcome o);

/// Parses the upper-case names used in scenario files (CALL, EMERGENCY, ...).
std::optional<AccessTrigger> parse_trigger(std::string_view name);

/// Static description of one simulated phone.
struct StationSpec {
    std::string id;
    /// Timeslot used for traffic once connected.
    int traffic_slot = 2;
    PowerLevel connected_power = PowerLevel::lowest();
    /// Cap applied to random-access bursts; TX0 is the handset maximum.
    PowerLevel rach_power = PowerLevel::highest();
    /// Without a channel the phone is assumed anywhere in the uplink band.
    std::optional<ArfcnChannel> arfcn;
    /// Absent: the call lasts until the simulation horizon.
    std::optional<Nanos> call_duration;

    FrequencyBand emission_band() const;

    bool operator==(const StationSpec&) const = default;
};

struct TriggerEvent {
    Nanos time{0};
    std::string station;
    AccessTrigger trigger = AccessTrigger::Call;

    bool operator==(const TriggerEvent&) const = default;
};

struct SimConfig {
    std::uint64_t seed = 1;
    int max_attempts = 4;
    /// Retransmissions pick uniformly among this many upcoming opportunities.
    int backoff_window = 8;
    /// With capture, one of several colliding bursts still gets through.
    bool capture = false;
    /// Frames between a successful access and the CONNECTED state.
    std::int64_t connection_delay_frames = 51;
    /// RACH burst length as a fraction of a slot, in (0, 1].
    double rach_burst_fraction = 0.75;
    MultiframeLayout layout = MultiframeLayout::standard();
    TimingConstants timing;
    std::vector<StationSpec> stations;
    std::vector<TriggerEvent> trigger_schedule;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    Nanos rach_burst_duration() const;

    bool operator==(const SimConfig&) const = default;
};

struct AccessAttempt {
    std::string station;
    AccessTrigger trigger = AccessTrigger::Call;
    TdmaPosition scheduled_opportunity;
    int attempt_number = 1;
    /// When the access procedure started (the trigger time).
    Nanos started{0};
};

struct EmissionEvent {
    Nanos time{0};
    Nanos duration{0};
    std::string source;
    BurstKind kind = BurstKind::RachBurst;
    DbmPower power = DbmPower::silent();
    FrequencyBand band = uplink_band();

    bool operator==(const EmissionEvent&) const = default;
};

struct SimStats {
    std::size_t rach_bursts = 0;
    /// RACH bursts emitted at 30 dBm (TX0).
    std::size_t full_power_bursts = 0;
    std::size_t traffic_bursts = 0;
    int max_simultaneous_rach = 0;
    std::size_t successful_accesses = 0;
    std::size_t abandoned_accesses = 0;
    /// Triggers that fired while their station was busy.
    std::size_t ignored_triggers = 0;
    /// Trigger-to-CONNECTED delay per completed access, by station.
    std::map<std::string, std::vector<Nanos>> time_to_connect;

    bool operator==(const SimStats&) const = default;
};

struct SimResult {
    std::vector<EmissionEvent> log;
    SimStats stats;
};

/// Seeded 64-bit source: std::mt19937_64 (output fixed by the standard)
/// with rejection sampling for bounded integers, so draws are identical on
/// every platform.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

/// Per-attempt result of one RACH opportunity, together with the burst it radiated.
struct ResolvedAttempt {
    AccessAttempt attempt;
    AttemptOutcome outcome = AttemptOutcome::Collided;
    EmissionEvent emission;
};

/// Discrete-event simulation of phones contending on the RACH.
class RachSimulator {
public:
    /// Validates the configuration; throws ConfigError.
    explicit RachSimulator(SimConfig config);

    const SimConfig& config() const noexcept { return config_; }

    StationState state(std::string_view station) const;

    /// Moves an IDLE station to ACCESSING and places its first burst on one of
    /// the next backoff_window opportunities at or after `time`.
    /// Throws IllegalStateError if the station is not IDLE.
    AccessAttempt schedule_access(std::string_view station, AccessTrigger trigger, Nanos time);

    /// Resolves attempts that share one opportunity. Every attempt radiates.
    std::vector<ResolvedAttempt> resolve_opportunity(std::span<const AccessAttempt> attempts);

    /// Runs the trigger schedule up to `horizon`. A simulator runs once.
    SimResult run(Nanos horizon);

private:
    struct StationRuntime {
        StationSpec spec;
        StationState state = StationState::Idle;
        AccessTrigger trigger = AccessTrigger::Call;
        Nanos access_started{0};
        // Bumped at call end so stale traffic events are dropped.
        std::uint64_t generation = 0;
    };

    StationRuntime& runtime(std::string_view station);
    const StationRuntime& runtime(std::string_view station) const;
    TdmaPosition pick_opportunity(Nanos from);

    SimConfig config_;
    DeterministicRng rng_;
    std::map<std::string, StationRuntime, std::less<>> stations_;
    std::map<TdmaPosition, std::vector<AccessAttempt>> pending_;
    bool ran_ = false;
};

/// Convenience wrapper: a fresh simulator run.
SimResult run(const SimConfig& config, Nanos horizon);

/// Largest number of RACH bursts that share one TDMA position.
int max_coincident_rach(std::span<const EmissionEvent> log, const TimingConstants& timing);

}  // namespace aerogsm
