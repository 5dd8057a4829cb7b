#include "aerogsm/rach_sim.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

#include "aerogsm/errors.hpp"

namespace aerogsm {

std::string_view to_string(StationState s) {
    switch (s) {
        case StationState::Idle: return "IDLE";
        case StationState::Accessing: return "ACCESSING";
        case StationState::Connected: return "CONNECTED";
    }
    return "?";
}

std::string_view to_string(AccessTrigger t) {
    switch (t) {
        case AccessTrigger::Call: return "CALL";
        case AccessTrigger::Emergency: return "EMERGENCY";
        case AccessTrigger::Reestablish: return "REESTABLISH";
        case AccessTrigger::PageResponse: return "PAGE_RESPONSE";
        case AccessTrigger::LocationUpdate: return "LOCATION_UPDATE";
    }
    return "?";
}

std::string_view to_string(BurstKind k) {
    return k == BurstKind::RachBurst ? "RACH_BURST" : "TRAFFIC_BURST";
}

std::string_view to_string(AttemptOutcome o) {
    return o == AttemptOutcome::Success ? "SUCCESS" : "COLLIDED";
}

std::optional<AccessTrigger> parse_trigger(std::string_view name) {
    for (auto t : {AccessTrigger::Call, AccessTrigger::Emergency, AccessTrigger::Reestablish,
                   AccessTrigger::PageResponse, AccessTrigger::LocationUpdate}) {
        if (to_string(t) == name) {
            return t;
        }
    }
    return std::nullopt;
}

FrequencyBand StationSpec::emission_band() const {
    return arfcn ? channel_band(*arfcn) : uplink_band();
}

void SimConfig::validate() const {
    if (max_attempts < 1) {
        throw ConfigError("sim.max_attempts must be >= 1");
    }
    if (backoff_window < 1) {
        throw ConfigError("sim.backoff_window must be >= 1");
    }
    if (connection_delay_frames < 0) {
        throw ConfigError("sim.connection_delay_frames must be >= 0");
    }
    if (!(rach_burst_fraction > 0.0 && rach_burst_fraction <= 1.0)) {
        throw ConfigError("sim.rach_burst_fraction must be in (0, 1]");
    }
    if (layout.count(ChannelTag::Rach) == 0) {
        throw ConfigError("sim.layout has no RACH (R) frame");
    }
    std::set<std::string, std::less<>> ids;
    for (const auto& st : stations) {
        if (st.id.empty()) {
            throw ConfigError("station id must not be empty");
        }
        if (!ids.insert(st.id).second) {
            throw ConfigError("duplicate station id '" + st.id + "'");
        }
        if (st.traffic_slot < 1 || st.traffic_slot >= TimingConstants::kSlotsPerFrame) {
            throw ConfigError("station '" + st.id + "': traffic_slot must be in 1..7");
        }
        if (st.call_duration && st.call_duration->count() <= 0) {
            throw ConfigError("station '" + st.id + "': call_duration must be positive");
        }
    }
    for (const auto& tr : trigger_schedule) {
        if (!ids.contains(tr.station)) {
            throw ConfigError("trigger references unknown station '" + tr.station + "'");
        }
        if (tr.time.count() < 0) {
            throw ConfigError("trigger time for station '" + tr.station + "' is negative");
        }
    }
}

Nanos SimConfig::rach_burst_duration() const {
    return Nanos(static_cast<Nanos::rep>(
        std::llround(rach_burst_fraction * static_cast<double>(timing.slot().count()))));
}

std::uint64_t DeterministicRng::uniform_index(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index needs a positive bound");
    }
    // Reject the incomplete top block so every residue is equally likely.
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = kMax - (kMax % n + 1) % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x > limit);
    return x % n;
}

RachSimulator::RachSimulator(SimConfig config) : config_(std::move(config)), rng_(config_.seed) {
    config_.validate();
    for (const auto& st : config_.stations) {
        stations_.emplace(st.id, StationRuntime{.spec = st});
    }
}

RachSimulator::StationRuntime& RachSimulator::runtime(std::string_view station) {
    auto it = stations_.find(station);
    if (it == stations_.end()) {
        throw ConfigError("unknown station '" + std::string(station) + "'");
    }
    return it->second;
}

const RachSimulator::StationRuntime& RachSimulator::runtime(std::string_view station) const {
    auto it = stations_.find(station);
    if (it == stations_.end()) {
        throw ConfigError("unknown station '" + std::string(station) + "'");
    }
    return it->second;
}

StationState RachSimulator::state(std::string_view station) const {
    return runtime(station).state;
}

TdmaPosition RachSimulator::pick_opportunity(Nanos from) {
    const auto window = next_rach_opportunities(
        from, static_cast<std::size_t>(config_.backoff_window), config_.layout, config_.timing);
    return window[rng_.uniform_index(window.size())];
}

AccessAttempt RachSimulator::schedule_access(std::string_view station, AccessTrigger trigger,
                                             Nanos time) {
    if (time.count() < 0) {
        throw std::invalid_argument("access time must be non-negative");
    }
    auto& rt = runtime(station);
    if (rt.state != StationState::Idle) {
        throw IllegalStateError("station '" + rt.spec.id + "' is " +
                                std::string(to_string(rt.state)) + ", expected IDLE");
    }
    rt.state = StationState::Accessing;
    rt.trigger = trigger;
    rt.access_started = time;

    AccessAttempt attempt{.station = rt.spec.id,
                          .trigger = trigger,
                          .scheduled_opportunity = pick_opportunity(time),
                          .attempt_number = 1,
                          .started = time};
    pending_[attempt.scheduled_opportunity].push_back(attempt);
    return attempt;
}

std::vector<ResolvedAttempt> RachSimulator::resolve_opportunity(
    std::span<const AccessAttempt> attempts) {
    std::vector<ResolvedAttempt> out;
    if (attempts.empty()) {
        return out;
    }
    const auto pos = attempts.front().scheduled_opportunity;
    for (const auto& a : attempts) {
        if (a.scheduled_opportunity != pos) {
            throw std::invalid_argument("attempts resolved together must share one opportunity");
        }
    }

    std::size_t winner = attempts.size();  // none
    if (attempts.size() == 1) {
        winner = 0;
    } else if (config_.capture) {
        winner = static_cast<std::size_t>(rng_.uniform_index(attempts.size()));
    }

    const auto start = slot_start(pos, config_.timing);
    out.reserve(attempts.size());
    for (std::size_t i = 0; i < attempts.size(); ++i) {
        const auto& spec = runtime(attempts[i].station).spec;
        out.push_back(ResolvedAttempt{
            .attempt = attempts[i],
            .outcome = i == winner ? AttemptOutcome::Success : AttemptOutcome::Collided,
            .emission = EmissionEvent{.time = start,
                                      .duration = config_.rach_burst_duration(),
                                      .source = spec.id,
                                      .kind = BurstKind::RachBurst,
                                      .power = power_level_to_dbm(spec.rach_power),
                                      .band = spec.emission_band()}});
    }
    return out;
}

namespace {

enum class EventKind { CallEnd = 0, Trigger = 1, Connect = 2, Traffic = 4 };

// Same-time ordering: call ends free stations before new triggers, and
// triggers are placed before the opportunity at that instant is resolved.
constexpr int kOpportunityPriority = 3;

struct Event {
    Nanos time{0};
    int priority = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Trigger;
    std::string station;
    AccessTrigger trigger = AccessTrigger::Call;
    std::int64_t frame = 0;
    std::uint64_t generation = 0;

    auto key() const { return std::tie(time, priority, seq); }
};

struct LaterFirst {
    bool operator()(const Event& a, const Event& b) const { return a.key() > b.key(); }
};

}  // namespace

SimResult RachSimulator::run(Nanos horizon) {
    if (ran_) {
        throw IllegalStateError("a simulator instance runs only once");
    }
    if (horizon.count() <= 0) {
        throw std::invalid_argument("horizon must be positive");
    }
    for (const auto& tr : config_.trigger_schedule) {
        if (tr.time >= horizon) {
            throw ConfigError("trigger for station '" + tr.station + "' lies beyond the horizon");
        }
    }
    ran_ = true;

    const auto& timing = config_.timing;
    SimResult result;
    std::priority_queue<Event, std::vector<Event>, LaterFirst> queue;
    std::uint64_t seq = 0;
    auto push = [&](Event e) {
        e.priority = static_cast<int>(e.kind);
        e.seq = seq++;
        queue.push(std::move(e));
    };

    for (const auto& tr : config_.trigger_schedule) {
        push({.time = tr.time, .kind = EventKind::Trigger, .station = tr.station, .trigger = tr.trigger});
    }

    auto emit_traffic = [&](StationRuntime& rt, std::int64_t frame) {
        const TdmaPosition pos(frame, rt.spec.traffic_slot);
        const auto t = slot_start(pos, timing);
        if (t >= horizon) {
            return;
        }
        push({.time = t,
              .kind = EventKind::Traffic,
              .station = rt.spec.id,
              .frame = frame,
              .generation = rt.generation});
    };

    while (true) {
        const bool have_event = !queue.empty();
        const bool have_opportunity = !pending_.empty();
        if (!have_event && !have_opportunity) {
            break;
        }
        bool take_opportunity = false;
        if (have_opportunity) {
            const auto t_opp = slot_start(pending_.begin()->first, timing);
            take_opportunity = !have_event || std::tie(t_opp, kOpportunityPriority) <
                                                  std::tie(queue.top().time, queue.top().priority);
        }

        if (take_opportunity) {
            auto node = pending_.extract(pending_.begin());
            const auto pos = node.key();
            const auto t = slot_start(pos, timing);
            if (t >= horizon) {
                break;
            }
            for (auto& r : resolve_opportunity(node.mapped())) {
                auto& rt = runtime(r.attempt.station);
                ++result.stats.rach_bursts;
                if (r.emission.power == DbmPower(30.0)) {
                    ++result.stats.full_power_bursts;
                }
                result.log.push_back(r.emission);
                if (r.outcome == AttemptOutcome::Success) {
                    ++result.stats.successful_accesses;
                    push({.time = slot_start(TdmaPosition(pos.frame + config_.connection_delay_frames, 0),
                                             timing),
                          .kind = EventKind::Connect,
                          .station = rt.spec.id,
                          .generation = rt.generation});
                } else if (r.attempt.attempt_number < config_.max_attempts) {
                    AccessAttempt next = r.attempt;
                    next.attempt_number += 1;
                    next.scheduled_opportunity = pick_opportunity(t + Nanos(1));
                    pending_[next.scheduled_opportunity].push_back(std::move(next));
                } else {
                    ++result.stats.abandoned_accesses;
                    rt.state = StationState::Idle;
                }
            }
            continue;
        }

        Event ev = queue.top();
        queue.pop();
        if (ev.time >= horizon) {
            break;
        }
        auto& rt = runtime(ev.station);
        switch (ev.kind) {
            case EventKind::Trigger:
                if (rt.state != StationState::Idle) {
                    ++result.stats.ignored_triggers;
                } else {
                    schedule_access(ev.station, ev.trigger, ev.time);
                }
                break;
            case EventKind::Connect: {
                rt.state = StationState::Connected;
                result.stats.time_to_connect[rt.spec.id].push_back(ev.time - rt.access_started);
                if (rt.spec.call_duration) {
                    push({.time = ev.time + *rt.spec.call_duration,
                          .kind = EventKind::CallEnd,
                          .station = rt.spec.id,
                          .generation = rt.generation});
                }
                emit_traffic(rt, position_at(ev.time, timing).frame);
                break;
            }
            case EventKind::Traffic:
                if (ev.generation != rt.generation || rt.state != StationState::Connected) {
                    break;
                }
                ++result.stats.traffic_bursts;
                result.log.push_back(EmissionEvent{.time = ev.time,
                                                   .duration = timing.slot(),
                                                   .source = rt.spec.id,
                                                   .kind = BurstKind::TrafficBurst,
                                                   .power = power_level_to_dbm(rt.spec.connected_power),
                                                   .band = rt.spec.emission_band()});
                emit_traffic(rt, ev.frame + 1);
                break;
            case EventKind::CallEnd:
                if (ev.generation == rt.generation && rt.state == StationState::Connected) {
                    rt.state = StationState::Idle;
                    ++rt.generation;
                }
                break;
        }
    }

    std::stable_sort(result.log.begin(), result.log.end(),
                     [](const EmissionEvent& a, const EmissionEvent& b) { return a.time < b.time; });
    result.stats.max_simultaneous_rach = max_coincident_rach(result.log, timing);
    return result;
}

SimResult run(const SimConfig& config, Nanos horizon) {
    RachSimulator sim(config);
    return sim.run(horizon);
}

int max_coincident_rach(std::span<const EmissionEvent> log, const TimingConstants& timing) {
    std::map<TdmaPosition, int> per_slot;
    int best = 0;
    for (const auto& e : log) {
        if (e.kind != BurstKind::RachBurst) {
            continue;
        }
        best = std::max(best, ++per_slot[position_at(e.time, timing)]);
    }
    return best;
}

}  // namespace aerogsm
