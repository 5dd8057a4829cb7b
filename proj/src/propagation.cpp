#include "aerogsm/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace aerogsm {

namespace {

constexpr double kFsplConstantDb = 32.44;
constexpr double kMinimumDistanceM = 1e-3;

}  // namespace

void PathLossModel::validate() const {
    if (!std::isfinite(excess_loss_db) || excess_loss_db < 0.0) {
        throw std::invalid_argument("excess loss must be a finite value >= 0 dB");
    }
    if (!std::isfinite(tx_gain_dbi) || !std::isfinite(rx_gain_dbi)) {
        throw std::invalid_argument("antenna gains must be finite");
    }
}

HarmonicProfile::HarmonicProfile(std::map<int, DbmPower> levels) : levels_(std::move(levels)) {
    for (const auto& [order, level] : levels_) {
        if (order < 2) {
            throw std::invalid_argument("harmonic orders start at 2");
        }
        if (level > DbmPower(30.0)) {
            throw std::invalid_argument("harmonic level exceeds the 30 dBm fundamental");
        }
    }
}

HarmonicProfile HarmonicProfile::placeholder() {
    return HarmonicProfile({{2, DbmPower(-30.0)}, {3, DbmPower(-30.0)}});
}

double fspl_db(double distance_m, double freq_mhz) {
    if (!(distance_m > 0.0) || !(freq_mhz > 0.0)) {
        throw std::invalid_argument("path loss needs positive distance and frequency");
    }
    return kFsplConstantDb + 20.0 * std::log10(distance_m / 1000.0) + 20.0 * std::log10(freq_mhz);
}

DbmPower received_power(DbmPower tx, const PathLossModel& model, double distance_m, double freq_mhz) {
    const double loss = fspl_db(distance_m, freq_mhz);
    if (tx.is_silent()) {
        return tx;
    }
    return DbmPower(tx.value() + model.tx_gain_dbi + model.rx_gain_dbi - loss - model.excess_loss_db);
}

DbmPower aggregate_rss(std::span<const DbmPower> levels) {
    double total_mw = 0.0;
    for (const auto& l : levels) {
        total_mw += dbm_to_mw(l);
    }
    return mw_to_dbm(total_mw);
}

std::vector<EmissionComponent> emission_components(const EmissionEvent& e, const HarmonicProfile& hp,
                                                   int max_order) {
    if (max_order < 1) {
        throw std::invalid_argument("max_order must be >= 1");
    }
    std::vector<EmissionComponent> out{{e.band, e.power, 1}};
    for (const auto& [order, level] : hp.levels()) {
        if (order > max_order) {
            break;
        }
        out.push_back({harmonic_band(e.band, order), std::min(level, e.power), order});
    }
    return out;
}

SafeDistance safe_distance(DbmPower threshold, int n_sources, DbmPower tx, const PathLossModel& model,
                           double freq_mhz) {
    if (n_sources < 1) {
        throw std::invalid_argument("need at least one source");
    }
    if (!(freq_mhz > 0.0)) {
        throw std::invalid_argument("frequency must be positive");
    }
    model.validate();
    if (threshold.is_silent()) {
        throw std::invalid_argument("a silent threshold can never be met");
    }
    if (tx.is_silent()) {
        return {};
    }
    // Path loss needed so that n equal sources sum to the threshold.
    const double required_loss = tx.value() + model.tx_gain_dbi + model.rx_gain_dbi -
                                 model.excess_loss_db + 10.0 * std::log10(n_sources) -
                                 threshold.value();
    if (required_loss <= 0.0) {
        return {};
    }
    const double d_km =
        std::pow(10.0, (required_loss - kFsplConstantDb - 20.0 * std::log10(freq_mhz)) / 20.0);
    const double d_m = d_km * 1000.0;
    if (d_m < kMinimumDistanceM) {
        return {};
    }
    return {d_m, true};
}

}  // namespace aerogsm
