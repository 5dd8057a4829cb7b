#include "aerogsm/frame_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aerogsm {

TdmaPosition::TdmaPosition(std::int64_t frame_, int slot_) : frame(frame_), slot(slot_) {
    if (frame_ < 0) {
        throw std::invalid_argument("frame number must be non-negative");
    }
    if (slot_ < 0 || slot_ >= TimingConstants::kSlotsPerFrame) {
        throw std::invalid_argument("slot must be in 0..7");
    }
}

MultiframeLayout MultiframeLayout::standard() {
    return parse("DDDDRRHHHHHHHHRRRRRRRRRRRRRRRRRRRRRRRDDDDDDDDRRDDDD");
}

MultiframeLayout MultiframeLayout::parse(std::string_view tags) {
    if (tags.size() != kFrames) {
        throw std::invalid_argument("multiframe layout must have exactly 51 tags, got " +
                                    std::to_string(tags.size()));
    }
    std::array<ChannelTag, kFrames> out{};
    for (std::size_t i = 0; i < kFrames; ++i) {
        switch (tags[i]) {
            case 'D': out[i] = ChannelTag::Sdcch; break;
            case 'H': out[i] = ChannelTag::Sacch; break;
            case 'R': out[i] = ChannelTag::Rach; break;
            default:
                throw std::invalid_argument("multiframe layout tag at frame " + std::to_string(i) +
                                            " must be one of D, H, R");
        }
    }
    return MultiframeLayout(out);
}

ChannelTag MultiframeLayout::tag_for_frame(std::int64_t frame) const {
    const auto n = static_cast<std::int64_t>(kFrames);
    return tags_[static_cast<std::size_t>(((frame % n) + n) % n)];
}

std::size_t MultiframeLayout::count(ChannelTag tag) const {
    return static_cast<std::size_t>(std::count(tags_.begin(), tags_.end(), tag));
}

std::string MultiframeLayout::to_string() const {
    std::string s;
    s.reserve(kFrames);
    for (auto t : tags_) {
        s.push_back(static_cast<char>(t));
    }
    return s;
}

TimingConstants::TimingConstants(Nanos slot) : slot_(slot) {
    if (slot.count() <= 0) {
        throw std::invalid_argument("slot duration must be positive");
    }
}

TimingConstants TimingConstants::from_slot_us(double slot_us) {
    if (!std::isfinite(slot_us) || !(slot_us > 0.0)) {
        throw std::invalid_argument("slot duration must be positive");
    }
    return TimingConstants(from_us(slot_us));
}

Nanos from_us(double us) {
    return Nanos(std::llround(us * 1e3));
}

double to_us(Nanos t) {
    return static_cast<double>(t.count()) / 1e3;
}

double to_seconds(Nanos t) {
    return static_cast<double>(t.count()) / 1e9;
}

bool is_rach_opportunity(const TdmaPosition& pos, const MultiframeLayout& layout) {
    return pos.slot == 0 && layout.tag_for_frame(pos.frame) == ChannelTag::Rach;
}

TdmaPosition position_at(Nanos time, const TimingConstants& timing) {
    if (time.count() < 0) {
        throw std::invalid_argument("time must be non-negative");
    }
    const auto frame = time / timing.frame();
    const auto within = time % timing.frame();
    return {frame, static_cast<int>(within / timing.slot())};
}

Nanos slot_start(const TdmaPosition& pos, const TimingConstants& timing) {
    return timing.frame() * pos.frame + timing.slot() * pos.slot;
}

namespace {

// First frame whose slot 0 starts at or after t.
std::int64_t first_frame_at_or_after(Nanos t, const TimingConstants& timing) {
    if (t.count() <= 0) {
        return 0;
    }
    const auto f = timing.frame().count();
    return (t.count() + f - 1) / f;
}

}  // namespace

std::vector<TdmaPosition> rach_opportunities_in(Nanos t0, Nanos t1, const MultiframeLayout& layout,
                                                const TimingConstants& timing) {
    std::vector<TdmaPosition> out;
    if (t1 <= t0) {
        return out;
    }
    for (auto frame = first_frame_at_or_after(t0, timing);; ++frame) {
        const TdmaPosition pos(frame, 0);
        if (slot_start(pos, timing) >= t1) {
            break;
        }
        if (is_rach_opportunity(pos, layout)) {
            out.push_back(pos);
        }
    }
    return out;
}

std::vector<TdmaPosition> next_rach_opportunities(Nanos from, std::size_t count,
                                                  const MultiframeLayout& layout,
                                                  const TimingConstants& timing) {
    std::vector<TdmaPosition> out;
    if (count == 0 || layout.count(ChannelTag::Rach) == 0) {
        return out;
    }
    out.reserve(count);
    for (auto frame = first_frame_at_or_after(from, timing); out.size() < count; ++frame) {
        TdmaPosition pos(frame, 0);
        if (is_rach_opportunity(pos, layout)) {
            out.push_back(pos);
        }
    }
    return out;
}

}  // namespace aerogsm
