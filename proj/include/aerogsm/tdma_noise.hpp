#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aerogsm/frame_engine.hpp"
#include "aerogsm/rach_sim.hpp"

namespace aerogsm {

/// Radiated power envelope, linear mW, uniformly sampled from `start`.
struct EnvelopeTrace {
    double sample_rate_hz = 48'000.0;
    Nanos start{0};
    std::vector<double> samples_mw;

    double duration_s() const { return static_cast<double>(samples_mw.size()) / sample_rate_hz; }
};

inline constexpr double kMinEnvelopeSampleRateHz = 8'000.0;

/// Builds the envelope of all bursts over [t0, t1). Each sample holds the mean
/// power over its sample interval, so burst energy is preserved exactly.
/// Bursts get linear ramps of ramp_us at both edges (0 = rectangular).
/// Throws std::invalid_argument for t0 >= t1, a negative ramp, or a sample
/// rate below 8 kHz.
EnvelopeTrace synthesize_envelope(std::span<const EmissionEvent> log, Nanos t0, Nanos t1,
                                  double sample_rate_hz = 48'000.0, double ramp_us = 0.0);

/// One-sided amplitude spectrum of a mean-removed, Hann-windowed envelope,
/// zero-padded to a power of two. A sinusoid of amplitude a shows a peak of
/// about a at its bin.
struct SpectrumResult {
    double sample_rate_hz = 0.0;
    double bin_hz = 0.0;
    std::size_t transform_size = 0;
    std::size_t samples_used = 0;
    /// Sum of window weights and of their squares, for energy calibration.
    double window_sum = 0.0;
    double window_power_sum = 0.0;
    std::vector<double> magnitudes;

    double frequency(std::size_t bin) const { return static_cast<double>(bin) * bin_hz; }

    /// Index of the largest magnitude with frequency in [min_hz, max_hz].
    std::size_t dominant_bin(double min_hz, double max_hz) const;

    /// Amplitude of the tone near freq_hz, from the energy across the window main lobe.
    double tone_amplitude(double freq_hz) const;

    /// RMS of the part of the signal within [low_hz, high_hz].
    double band_rms(double low_hz, double high_hz) const;
};

/// Throws std::invalid_argument if the trace is shorter than two frames.
SpectrumResult envelope_spectrum(const EnvelopeTrace& trace, const TimingConstants& timing = {});

/// Frame repetition rate, the pitch of the TDMA buzz.
double buzz_fundamental_hz(const TimingConstants& timing);

struct ResonantCircuit {
    double capacitance_f = 0.0;
    double inductance_h = 0.0;
};

/// 1 / (2 pi sqrt(LC)). Throws std::invalid_argument for non-positive values.
double self_resonant_frequency_hz(const ResonantCircuit& c);

/// Series inductance that resonates with `capacitance_f` at f0_hz.
double inductance_for(double f0_hz, double capacitance_f);

struct AudioLevelReport {
    bool silent = true;
    double fundamental_hz = 0.0;
    double coupling_db = 0.0;
    /// Levels are 10 log10 of envelope amplitude in mW, minus the coupling
    /// loss, so they move dB-for-dB with transmit power.
    double fundamental_level_db = 0.0;
    /// Frame-rate harmonics 1..10.
    std::vector<double> harmonic_levels_db;
    /// 20 Hz to 20 kHz.
    double audio_band_level_db = 0.0;
};

inline constexpr int kReportedBuzzHarmonics = 10;

/// Square-law detector model: audio follows envelope power, attenuated by
/// coupling_db (>= 0). Throws std::invalid_argument for negative coupling.
AudioLevelReport coupled_audio_estimate(const EnvelopeTrace& trace, double coupling_db,
                                        const TimingConstants& timing = {});

}  // namespace aerogsm
