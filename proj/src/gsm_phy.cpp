#include "aerogsm/gsm_phy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aerogsm {

namespace {

constexpr double kChannelSpacingMhz = 0.2;
constexpr double kSpeedOfLight = 299'792'458.0;

}  // namespace

PowerLevel::PowerLevel(int index) : index_(index) {
    if (index < 0 || index > kMaxIndex) {
        throw std::invalid_argument("power level must be in 0..15, got " + std::to_string(index));
    }
}

DbmPower::DbmPower(double dbm) : dbm_(dbm) {
    if (std::isnan(dbm) || dbm == std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("dBm value must be finite or the -inf silent sentinel");
    }
}

ArfcnChannel::ArfcnChannel(int number) : number_(number) {
    if (number < kFirst || number > kLast) {
        throw std::invalid_argument("ARFCN must be in 513..884, got " + std::to_string(number));
    }
}

FrequencyBand::FrequencyBand(double low_mhz, double high_mhz) : low_(low_mhz), high_(high_mhz) {
    if (!std::isfinite(low_mhz) || !std::isfinite(high_mhz) || !(low_mhz > 0.0) ||
        !(low_mhz <= high_mhz)) {
        throw std::invalid_argument("frequency band requires 0 < low <= high");
    }
}

DbmPower power_level_to_dbm(PowerLevel level) {
    return DbmPower(30.0 - 2.0 * level.index());
}

double arfcn_to_uplink_mhz(ArfcnChannel ch) {
    // 1710.2 + 0.2 (n - 512), in integer 100 kHz units so each value is correctly rounded.
    const long tenths = 17102 + 2L * (ch.number() - 512);
    return static_cast<double>(tenths) / 10.0;
}

FrequencyBand channel_band(ArfcnChannel ch) {
    const double f = arfcn_to_uplink_mhz(ch);
    return {f - kChannelSpacingMhz / 2, f + kChannelSpacingMhz / 2};
}

FrequencyBand uplink_band() {
    return {arfcn_to_uplink_mhz(ArfcnChannel(ArfcnChannel::kFirst)),
            arfcn_to_uplink_mhz(ArfcnChannel(ArfcnChannel::kLast))};
}

FrequencyBand harmonic_band(const FrequencyBand& fundamental, int order) {
    if (order < 1) {
        throw std::invalid_argument("harmonic order must be >= 1");
    }
    return {order * fundamental.low(), order * fundamental.high()};
}

double dbm_to_mw(DbmPower p) {
    if (p.is_silent()) {
        return 0.0;
    }
    return std::pow(10.0, p.value() / 10.0);
}

DbmPower mw_to_dbm(double mw) {
    if (!(mw >= 0.0) || !std::isfinite(mw)) {
        throw std::invalid_argument("linear power must be a finite non-negative mW value");
    }
    if (mw == 0.0) {
        return DbmPower::silent();
    }
    return DbmPower(10.0 * std::log10(mw));
}

double wavelength_m(double freq_mhz) {
    if (!(freq_mhz > 0.0)) {
        throw std::invalid_argument("frequency must be positive");
    }
    return kSpeedOfLight / (freq_mhz * 1e6);
}

}  // namespace aerogsm
