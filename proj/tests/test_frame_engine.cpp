#include <doctest.h>

#include <stdexcept>

#include <random>

#include "aerogsm/frame_engine.hpp"

using namespace aerogsm;

namespace {

const TimingConstants kTiming;
const auto kLayout = MultiframeLayout::standard();

}  // namespace

TEST_CASE("standard uplink multiframe") {
    CHECK(kLayout.count(ChannelTag::Rach) == 27);
    CHECK(kLayout.count(ChannelTag::Sdcch) == 16);
    CHECK(kLayout.count(ChannelTag::Sacch) == 8);
    const std::string expected = "DDDD" "RR" "HHHHHHHH" "RRRRRRRRRRRRRRRRRRRRRRR" "DDDDDDDD" "RR" "DDDD";
    CHECK(kLayout.to_string() == expected);
    CHECK(kLayout.tag_for_frame(4) == ChannelTag::Rach);
    CHECK(kLayout.tag_for_frame(51 + 4) == ChannelTag::Rach);
    CHECK(kLayout.tag_for_frame(13) == ChannelTag::Sacch);
    CHECK(kLayout.tag_for_frame(36) == ChannelTag::Rach);
    CHECK(kLayout.tag_for_frame(37) == ChannelTag::Sdcch);
}

TEST_CASE("layout parsing rejects wrong length or alphabet") {
    CHECK_THROWS_AS(MultiframeLayout::parse(std::string(50, 'R')), std::invalid_argument);
    CHECK_THROWS_AS(MultiframeLayout::parse(std::string(52, 'R')), std::invalid_argument);
    std::string bad = kLayout.to_string();
    bad[10] = 'P';
    CHECK_THROWS_AS(MultiframeLayout::parse(bad), std::invalid_argument);
    CHECK(MultiframeLayout::parse(kLayout.to_string()) == kLayout);
}

TEST_CASE("timing constants") {
    CHECK(kTiming.slot().count() == 576'923);
    CHECK(kTiming.frame() == kTiming.slot() * 8);
    CHECK(kTiming.multiframe() == kTiming.frame() * 51);
    CHECK(kTiming.slot_us() == doctest::Approx(576.92).epsilon(1e-5));
    CHECK(kTiming.frame_us() == doctest::Approx(4615.4).epsilon(1e-5));
    CHECK(kTiming.multiframe_ms() == doctest::Approx(235.38).epsilon(1e-4));
    const double rate = 1.0 / to_seconds(kTiming.frame());
    CHECK(rate >= 216.0);
    CHECK(rate <= 218.0);
    CHECK_THROWS_AS(TimingConstants(Nanos(0)), std::invalid_argument);
    CHECK_THROWS_AS(TimingConstants::from_slot_us(-1.0), std::invalid_argument);
}

TEST_CASE("RACH opportunities only on slot 0 of R frames") {
    CHECK(is_rach_opportunity({4, 0}, kLayout));
    CHECK_FALSE(is_rach_opportunity({0, 0}, kLayout));
    CHECK_FALSE(is_rach_opportunity({20, 3}, kLayout));
    CHECK_THROWS_AS(TdmaPosition(0, 8), std::invalid_argument);
    CHECK_THROWS_AS(TdmaPosition(-1, 0), std::invalid_argument);
}

TEST_CASE("position_at and slot_start") {
    CHECK(position_at(Nanos(0), kTiming) == TdmaPosition(0, 0));
    CHECK(position_at(from_us(4615.4), kTiming) == TdmaPosition(1, 0));
    CHECK(position_at(from_us(1200.0), kTiming) == TdmaPosition(0, 2));
    CHECK_THROWS_AS(position_at(Nanos(-1), kTiming), std::invalid_argument);

    CHECK(slot_start({0, 0}, kTiming) == Nanos(0));
    CHECK(to_us(slot_start({1, 0}, kTiming)) == doctest::Approx(4615.4).epsilon(1e-5));
    CHECK(to_us(slot_start({0, 7}, kTiming)) == doctest::Approx(4038.46).epsilon(1e-6));

    std::mt19937_64 gen(11);
    std::uniform_int_distribution<std::int64_t> t_dist(0, 3'600'000'000'000LL);
    for (int i = 0; i < 5000; ++i) {
        const Nanos t(t_dist(gen));
        const auto pos = position_at(t, kTiming);
        const auto start = slot_start(pos, kTiming);
        REQUIRE(start <= t);
        REQUIRE(t < start + kTiming.slot());
    }
}

TEST_CASE("rach_opportunities_in") {
    const auto one = rach_opportunities_in(Nanos(0), from_us(235384.6), kLayout, kTiming);
    CHECK(one.size() == 27);
    CHECK(std::is_sorted(one.begin(), one.end()));
    CHECK(rach_opportunities_in(Nanos(0), from_us(4615.4), kLayout, kTiming).empty());
    CHECK(rach_opportunities_in(Nanos(1000), Nanos(1000), kLayout, kTiming).empty());

    // Any window of k multiframes holds exactly 27k opportunities.
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::int64_t> start_dist(0, 100'000'000'000LL);
    for (int i = 0; i < 200; ++i) {
        const Nanos t0(start_dist(gen));
        const int k = 1 + i % 5;
        const auto ops = rach_opportunities_in(t0, t0 + kTiming.multiframe() * k, kLayout, kTiming);
        REQUIRE(ops.size() == 27u * static_cast<unsigned>(k));
        for (const auto& p : ops) {
            REQUIRE(is_rach_opportunity(p, kLayout));
        }
    }
}

TEST_CASE("layout is data: any layout yields slot-0 opportunities at its R frames") {
    std::mt19937_64 gen(5);
    const char tags[] = {'D', 'H', 'R'};
    for (int trial = 0; trial < 50; ++trial) {
        std::string text;
        for (int i = 0; i < 51; ++i) {
            text.push_back(tags[gen() % 3]);
        }
        const auto layout = MultiframeLayout::parse(text);
        const auto ops = rach_opportunities_in(Nanos(0), kTiming.multiframe(), layout, kTiming);
        REQUIRE(ops.size() == layout.count(ChannelTag::Rach));
        for (const auto& p : ops) {
            REQUIRE(p.slot == 0);
            REQUIRE(text[static_cast<std::size_t>(p.frame)] == 'R');
        }
    }
    const auto only_first = MultiframeLayout::parse("R" + std::string(50, 'D'));
    const auto ops = rach_opportunities_in(Nanos(0), kTiming.multiframe() * 2, only_first, kTiming);
    REQUIRE(ops.size() == 2);
    CHECK(ops[0] == TdmaPosition(0, 0));
    CHECK(ops[1] == TdmaPosition(51, 0));
}

TEST_CASE("next_rach_opportunities starts at or after the given time") {
    const auto ops = next_rach_opportunities(slot_start({4, 0}, kTiming), 3, kLayout, kTiming);
    REQUIRE(ops.size() == 3);
    CHECK(ops[0] == TdmaPosition(4, 0));
    CHECK(ops[1] == TdmaPosition(5, 0));
    CHECK(ops[2] == TdmaPosition(14, 0));
    const auto after = next_rach_opportunities(slot_start({5, 0}, kTiming) + Nanos(1), 1, kLayout, kTiming);
    CHECK(after.front() == TdmaPosition(14, 0));
    CHECK(next_rach_opportunities(Nanos(0), 4, MultiframeLayout::parse(std::string(51, 'D')), kTiming).empty());
}
