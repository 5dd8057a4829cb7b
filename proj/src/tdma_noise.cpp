#include "aerogsm/tdma_noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace aerogsm {

namespace {

constexpr double kAudioLowHz = 20.0;
constexpr double kAudioHighHz = 20'000.0;

// fftw planner calls are not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Integral from -inf to x of a unit trapezoid occupying [s, e] with ramps r.
double trapezoid_integral(double x, double s, double e, double r) {
    if (x <= s) {
        return 0.0;
    }
    if (r <= 0.0) {
        return std::min(x, e) - s;
    }
    if (x <= s + r) {
        return (x - s) * (x - s) / (2.0 * r);
    }
    if (x <= e - r) {
        return r / 2.0 + (x - s - r);
    }
    if (x <= e) {
        const double tail = e - x;
        return (e - s) - r - tail * tail / (2.0 * r);
    }
    return (e - s) - r;
}

}  // namespace

EnvelopeTrace synthesize_envelope(std::span<const EmissionEvent> log, Nanos t0, Nanos t1,
                                  double sample_rate_hz, double ramp_us) {
    if (t1 <= t0) {
        throw std::invalid_argument("envelope window needs t0 < t1");
    }
    if (!std::isfinite(sample_rate_hz) || sample_rate_hz < kMinEnvelopeSampleRateHz) {
        throw std::invalid_argument("envelope sample rate must be at least 8 kHz");
    }
    if (!std::isfinite(ramp_us) || ramp_us < 0.0) {
        throw std::invalid_argument("ramp must be >= 0 us");
    }

    EnvelopeTrace trace;
    trace.sample_rate_hz = sample_rate_hz;
    trace.start = t0;
    const double span_s = to_seconds(t1 - t0);
    const auto n = static_cast<std::size_t>(std::floor(span_s * sample_rate_hz + 1e-9));
    trace.samples_mw.assign(n, 0.0);
    if (n == 0) {
        return trace;
    }

    const double dt = 1.0 / sample_rate_hz;
    for (const auto& e : log) {
        const double p = dbm_to_mw(e.power);
        if (p == 0.0 || e.duration.count() <= 0) {
            continue;
        }
        const double s = to_seconds(e.time - t0);
        const double end = s + to_seconds(e.duration);
        if (end <= 0.0 || s >= static_cast<double>(n) * dt) {
            continue;
        }
        const double r = std::min(ramp_us * 1e-6, (end - s) / 2.0);
        const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(s / dt)));
        const auto last = std::min(n, static_cast<std::size_t>(std::ceil(end / dt)) + 1);
        for (std::size_t i = first; i < last; ++i) {
            const double a = static_cast<double>(i) * dt;
            // On the plateau the difference of running integrals only adds cancellation error.
            const bool plateau = a >= s + r && a + dt <= end - r;
            const double area =
                plateau ? dt : trapezoid_integral(a + dt, s, end, r) - trapezoid_integral(a, s, end, r);
            trace.samples_mw[i] += p * area / dt;
        }
    }
    return trace;
}

std::size_t SpectrumResult::dominant_bin(double min_hz, double max_hz) const {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
        const double f = frequency(k);
        if (f < min_hz || f > max_hz) {
            continue;
        }
        if (magnitudes[k] > best_mag) {
            best_mag = magnitudes[k];
            best = k;
        }
    }
    return best;
}

namespace {

// Hann main lobe spans 2 bins of the unpadded length either side; take twice that.
std::size_t lobe_halfwidth(const SpectrumResult& s) {
    return static_cast<std::size_t>(
               std::ceil(4.0 * static_cast<double>(s.transform_size) / static_cast<double>(s.samples_used))) +
           1;
}

double energy_to_amplitude_scale(const SpectrumResult& s) {
    return s.window_sum / std::sqrt(static_cast<double>(s.transform_size) * s.window_power_sum);
}

}  // namespace

double SpectrumResult::tone_amplitude(double freq_hz) const {
    if (magnitudes.empty()) {
        return 0.0;
    }
    const auto center = static_cast<std::int64_t>(std::llround(freq_hz / bin_hz));
    const auto h = static_cast<std::int64_t>(lobe_halfwidth(*this));
    const auto lo = std::max<std::int64_t>(1, center - h);
    const auto hi = std::min<std::int64_t>(static_cast<std::int64_t>(magnitudes.size()) - 1, center + h);
    double energy = 0.0;
    for (auto k = lo; k <= hi; ++k) {
        energy += magnitudes[static_cast<std::size_t>(k)] * magnitudes[static_cast<std::size_t>(k)];
    }
    return std::sqrt(energy) * energy_to_amplitude_scale(*this);
}

double SpectrumResult::band_rms(double low_hz, double high_hz) const {
    double energy = 0.0;
    for (std::size_t k = 1; k < magnitudes.size(); ++k) {
        const double f = frequency(k);
        if (f >= low_hz && f <= high_hz) {
            energy += magnitudes[k] * magnitudes[k];
        }
    }
    return std::sqrt(energy / 2.0) * energy_to_amplitude_scale(*this);
}

SpectrumResult envelope_spectrum(const EnvelopeTrace& trace, const TimingConstants& timing) {
    const std::size_t len = trace.samples_mw.size();
    const double needed = 2.0 * to_seconds(timing.frame()) * trace.sample_rate_hz;
    if (len < 2 || static_cast<double>(len) < needed) {
        throw std::invalid_argument("envelope must span at least two TDMA frames");
    }

    const std::size_t n = std::bit_ceil(len);
    SpectrumResult out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.transform_size = n;
    out.samples_used = len;
    out.bin_hz = trace.sample_rate_hz / static_cast<double>(n);

    double mean = 0.0;
    for (double v : trace.samples_mw) {
        mean += v;
    }
    mean /= static_cast<double>(len);

    auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    auto* spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    if (in == nullptr || spec == nullptr) {
        fftw_free(in);
        fftw_free(spec);
        throw std::bad_alloc();
    }
    std::unique_ptr<double, decltype(&fftw_free)> in_guard(in, fftw_free);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> spec_guard(spec, fftw_free);

    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, spec, FFTW_ESTIMATE);
    }

    const double denom = static_cast<double>(len - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < len) {
            const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
            out.window_sum += w;
            out.window_power_sum += w * w;
            in[i] = (trace.samples_mw[i] - mean) * w;
        } else {
            in[i] = 0.0;
        }
    }

    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    out.magnitudes.resize(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double mag = std::hypot(spec[k][0], spec[k][1]);
        const double scale = (k == 0 || k == n / 2) ? 1.0 : 2.0;
        out.magnitudes[k] = scale * mag / out.window_sum;
    }
    return out;
}

double buzz_fundamental_hz(const TimingConstants& timing) {
    return 1.0 / to_seconds(timing.frame());
}

double self_resonant_frequency_hz(const ResonantCircuit& c) {
    if (!(c.capacitance_f > 0.0) || !(c.inductance_h > 0.0)) {
        throw std::invalid_argument("capacitance and inductance must be positive");
    }
    return 1.0 / (2.0 * std::numbers::pi * std::sqrt(c.inductance_h * c.capacitance_f));
}

double inductance_for(double f0_hz, double capacitance_f) {
    if (!(f0_hz > 0.0) || !(capacitance_f > 0.0)) {
        throw std::invalid_argument("frequency and capacitance must be positive");
    }
    const double w = 2.0 * std::numbers::pi * f0_hz;
    return 1.0 / (w * w * capacitance_f);
}

AudioLevelReport coupled_audio_estimate(const EnvelopeTrace& trace, double coupling_db,
                                        const TimingConstants& timing) {
    if (!std::isfinite(coupling_db) || coupling_db < 0.0) {
        throw std::invalid_argument("coupling attenuation must be >= 0 dB");
    }
    AudioLevelReport report;
    report.coupling_db = coupling_db;
    report.fundamental_hz = buzz_fundamental_hz(timing);

    const auto spectrum = envelope_spectrum(trace, timing);
    const auto [lo, hi] = std::minmax_element(trace.samples_mw.begin(), trace.samples_mw.end());
    constexpr double kSilent = -std::numeric_limits<double>::infinity();
    auto level = [&](double amplitude_mw) {
        return amplitude_mw > 0.0 ? 10.0 * std::log10(amplitude_mw) - coupling_db : kSilent;
    };

    report.silent = *hi - *lo <= 1e-12 * std::abs(*hi);
    if (report.silent) {
        report.fundamental_level_db = kSilent;
        report.audio_band_level_db = kSilent;
        report.harmonic_levels_db.assign(kReportedBuzzHarmonics, kSilent);
        return report;
    }
    report.fundamental_level_db = level(spectrum.tone_amplitude(report.fundamental_hz));
    for (int k = 1; k <= kReportedBuzzHarmonics; ++k) {
        report.harmonic_levels_db.push_back(level(spectrum.tone_amplitude(k * report.fundamental_hz)));
    }
    report.audio_band_level_db =
        level(spectrum.band_rms(kAudioLowHz, std::min(kAudioHighHz, trace.sample_rate_hz / 2.0)));
    return report;
}

}  // namespace aerogsm
