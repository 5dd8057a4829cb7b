#pragma once

#include <compare>
#include <limits>

namespace aerogsm {

/// GSM1800 power-control level TX0..TX15.
class PowerLevel {
public:
    static constexpr int kMaxIndex = 15;

    /// Throws std::invalid_argument outside 0..15.
    explicit PowerLevel(int index);

    static PowerLevel highest() { return PowerLevel(0); }
    static PowerLevel lowest() { return PowerLevel(kMaxIndex); }

    int index() const noexcept { return index_; }

    auto operator<=>(const PowerLevel&) const = default;

private:
    int index_;
};

/// Power in dBm. Negative infinity is the "silent" sentinel.
class DbmPower {
public:
    /// Throws std::invalid_argument for NaN or +inf.
    explicit DbmPower(double dbm);

    static DbmPower silent() { return DbmPower(-std::numeric_limits<double>::infinity()); }

    double value() const noexcept { return dbm_; }
    bool is_silent() const noexcept { return dbm_ == -std::numeric_limits<double>::infinity(); }

    auto operator<=>(const DbmPower&) const = default;

private:
    double dbm_;
};

/// DCS1800 uplink channel number in the normal-burst range 513..884.
class ArfcnChannel {
public:
    static constexpr int kFirst = 513;
    static constexpr int kLast = 884;

    explicit ArfcnChannel(int number);

    int number() const noexcept { return number_; }

    auto operator<=>(const ArfcnChannel&) const = default;

private:
    int number_;
};

/// Closed frequency interval [low, high] in MHz, 0 < low <= high.
class FrequencyBand {
public:
    FrequencyBand(double low_mhz, double high_mhz);

    double low() const noexcept { return low_; }
    double high() const noexcept { return high_; }
    double width() const noexcept { return high_ - low_; }
    double center() const noexcept { return 0.5 * (low_ + high_); }

    bool operator==(const FrequencyBand&) const = default;

private:
    double low_;
    double high_;
};

DbmPower power_level_to_dbm(PowerLevel level);

double arfcn_to_uplink_mhz(ArfcnChannel ch);

/// Carrier band of a single 200 kHz channel.
FrequencyBand channel_band(ArfcnChannel ch);

/// Span of all uplink carriers, first to last channel.
FrequencyBand uplink_band();

/// [order * low, order * high]. Throws std::invalid_argument for order < 1.
FrequencyBand harmonic_band(const FrequencyBand& fundamental, int order);

double dbm_to_mw(DbmPower p);

/// Throws std::invalid_argument for negative or non-finite input; 0 mW is silent.
DbmPower mw_to_dbm(double mw);

/// Free-space wavelength in metres.
double wavelength_m(double freq_mhz);

}  // namespace aerogsm
