#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aerogsm {

using Nanos = std::chrono::nanoseconds;

/// Absolute TDMA coordinate: frame counter since t = 0 and slot 0..7.
struct TdmaPosition {
    std::int64_t frame = 0;
    int slot = 0;

    TdmaPosition() = default;
    /// Throws std::invalid_argument for a negative frame or slot outside 0..7.
    TdmaPosition(std::int64_t frame, int slot);

    auto operator<=>(const TdmaPosition&) const = default;
};

/// Logical channel carried on timeslot 0 of one uplink frame.
enum class ChannelTag : char { Sdcch = 'D', Sacch = 'H', Rach = 'R' };

/// The 51-frame uplink control multiframe for timeslot 0.
class MultiframeLayout {
public:
    static constexpr std::size_t kFrames = 51;

    /// D x4, R x2, H x8, R x23, D x8, R x2, D x4.
    static MultiframeLayout standard();

    /// Parses exactly 51 characters over {D, H, R}; throws std::invalid_argument otherwise.
    static MultiframeLayout parse(std::string_view tags);

    ChannelTag tag_for_frame(std::int64_t frame) const;
    std::size_t count(ChannelTag tag) const;
    std::string to_string() const;

    bool operator==(const MultiframeLayout&) const = default;

private:
    explicit MultiframeLayout(const std::array<ChannelTag, kFrames>& tags) : tags_(tags) {}

    std::array<ChannelTag, kFrames> tags_;
};

/// Slot, frame and multiframe lengths. Frame = 8 slots and multiframe = 51
/// frames hold exactly because everything is kept in integer nanoseconds.
class TimingConstants {
public:
    static constexpr int kSlotsPerFrame = 8;
    /// 15/26 ms rounded to the nanosecond.
    static constexpr Nanos kDefaultSlot{576'923};

    TimingConstants() = default;
    /// Throws std::invalid_argument for a non-positive slot.
    explicit TimingConstants(Nanos slot);

    /// Slot duration given in microseconds, rounded to the nanosecond.
    static TimingConstants from_slot_us(double slot_us);

    Nanos slot() const noexcept { return slot_; }
    Nanos frame() const noexcept { return slot_ * kSlotsPerFrame; }
    Nanos multiframe() const noexcept { return frame() * static_cast<int>(MultiframeLayout::kFrames); }

    double slot_us() const noexcept { return static_cast<double>(slot_.count()) / 1e3; }
    double frame_us() const noexcept { return static_cast<double>(frame().count()) / 1e3; }
    double multiframe_ms() const noexcept { return static_cast<double>(multiframe().count()) / 1e6; }

    bool operator==(const TimingConstants&) const = default;

private:
    Nanos slot_ = kDefaultSlot;
};

/// Microseconds (real) to the nearest nanosecond.
Nanos from_us(double us);
double to_us(Nanos t);
double to_seconds(Nanos t);

bool is_rach_opportunity(const TdmaPosition& pos, const MultiframeLayout& layout);

/// Throws std::invalid_argument for negative time.
TdmaPosition position_at(Nanos time, const TimingConstants& timing);

Nanos slot_start(const TdmaPosition& pos, const TimingConstants& timing);

/// RACH opportunities whose slot start lies in [t0, t1), in time order.
std::vector<TdmaPosition> rach_opportunities_in(Nanos t0, Nanos t1, const MultiframeLayout& layout,
                                                const TimingConstants& timing);

/// The first `count` RACH opportunities starting at or after `from`. Empty
/// when the layout carries no RACH frame.
std::vector<TdmaPosition> next_rach_opportunities(Nanos from, std::size_t count,
                                                  const MultiframeLayout& layout,
                                                  const TimingConstants& timing);

}  // namespace aerogsm
