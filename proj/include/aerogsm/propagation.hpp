#pragma once

#include <map>
#include <span>
#include <vector>

#include "aerogsm/gsm_phy.hpp"
#include "aerogsm/rach_sim.hpp"

namespace aerogsm {

enum class PathLossKind { FreeSpace };

struct PathLossModel {
    PathLossKind kind = PathLossKind::FreeSpace;
    /// Cabin clutter on top of free space, >= 0 dB.
    double excess_loss_db = 0.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;

    /// Throws std::invalid_argument on a negative excess loss or non-finite values.
    void validate() const;

    bool operator==(const PathLossModel&) const = default;
};

/// Conducted level of each harmonic order >= 2.
class HarmonicProfile {
public:
    HarmonicProfile() = default;
    /// Throws std::invalid_argument for an order < 2 or a level above 30 dBm.
    explicit HarmonicProfile(std::map<int, DbmPower> levels);

    /// Placeholder levels (-30 dBm at orders 2 and 3) standing in for a
    /// handset spurious-emission template.
    static HarmonicProfile placeholder();

    const std::map<int, DbmPower>& levels() const noexcept { return levels_; }
    bool empty() const noexcept { return levels_.empty(); }

    bool operator==(const HarmonicProfile&) const = default;

private:
    std::map<int, DbmPower> levels_;
};

/// Free-space path loss in dB: 32.44 + 20 log10(d_km) + 20 log10(f_MHz).
/// Throws std::invalid_argument for non-positive distance or frequency.
double fspl_db(double distance_m, double freq_mhz);

DbmPower received_power(DbmPower tx, const PathLossModel& model, double distance_m, double freq_mhz);

/// Incoherent (power-domain) sum. Empty or all-silent input is silent.
DbmPower aggregate_rss(std::span<const DbmPower> levels);

struct EmissionComponent {
    FrequencyBand band;
    DbmPower level;
    /// 1 for the fundamental.
    int order = 1;

    bool operator==(const EmissionComponent&) const = default;
};

/// Fundamental plus every profile harmonic up to max_order. Harmonic levels
/// never exceed the fundamental, so a silent burst has no harmonics.
std::vector<EmissionComponent> emission_components(const EmissionEvent& e, const HarmonicProfile& hp,
                                                   int max_order);

struct SafeDistance {
    double meters = 0.0;
    /// False when the sources cannot exceed the threshold at any distance.
    bool constrained = false;
};

/// Smallest distance at which n equal co-located sources aggregate to at most
/// `threshold`, by inverting the free-space formula.
SafeDistance safe_distance(DbmPower threshold, int n_sources, DbmPower tx, const PathLossModel& model,
                           double freq_mhz);

}  // namespace aerogsm
