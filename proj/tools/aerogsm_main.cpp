// aerogsm: cabin GSM1800 interference and TDMA buzz analysis.
//
// Exit codes: 0 success, 1 a victim is BLOCKED, 2 configuration error,
// 3 runtime error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "aerogsm/errors.hpp"
#include "aerogsm/report.hpp"
#include "aerogsm/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBlocked = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

constexpr double kDefaultHorizonMs = 1000.0;
constexpr const char* kOutDirEnv = "AEROGSM_OUT_DIR";

struct CommonArgs {
    std::string scenario;
    bool lax = false;
    std::optional<double> horizon_ms;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

aerogsm::Scenario load(const CommonArgs& args) {
    auto loaded = aerogsm::load_scenario(args.scenario, {.lax = args.lax});
    for (const auto& w : loaded.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    if (args.seed) {
        loaded.scenario.sim.seed = *args.seed;
    }
    return std::move(loaded.scenario);
}

aerogsm::Nanos horizon_for(const CommonArgs& args, const aerogsm::Scenario& s) {
    if (args.horizon_ms) {
        if (!(*args.horizon_ms > 0.0)) {
            throw aerogsm::ConfigError("--horizon must be positive");
        }
        return aerogsm::Nanos(std::llround(*args.horizon_ms * 1e6));
    }
    return s.horizon.value_or(aerogsm::Nanos(std::llround(kDefaultHorizonMs * 1e6)));
}

std::string out_dir_for(const CommonArgs& args) {
    if (!args.out_dir.empty()) {
        return args.out_dir;
    }
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return "aerogsm-out";
}

void print_manifest(const std::vector<aerogsm::ManifestEntry>& manifest) {
    for (const auto& m : manifest) {
        std::cout << m.sha256 << "  " << m.path.string() << "\n";
    }
}

int cmd_run(const CommonArgs& args, const std::vector<std::string>& format_names) {
    const auto s = load(args);
    std::set<aerogsm::ReportFormat> formats;
    for (const auto& name : format_names) {
        const auto f = aerogsm::parse_format(name);
        if (!f) {
            throw aerogsm::ConfigError("unknown format '" + name + "' (summary, csv, json)");
        }
        formats.insert(*f);
    }
    const auto report = aerogsm::run_scenario(s, horizon_for(args, s));
    print_manifest(aerogsm::emit_report(report, out_dir_for(args), formats));
    std::cout << aerogsm::render_summary(report);
    return report.interference.any_blocked() ? kExitBlocked : kExitOk;
}

int cmd_check(const CommonArgs& args) {
    const auto s = load(args);
    std::cout << fmt::format("ok: {} station(s), {} victim(s), {} trigger(s), {} band-plan entries\n",
                             s.sim.stations.size(), s.victims.size(), s.sim.trigger_schedule.size(),
                             s.band_plan.size());
    return kExitOk;
}

int cmd_bands(const CommonArgs& args) {
    const auto s = load(args);
    const auto rows = aerogsm::screen_scenario(s);
    std::cout << aerogsm::render_screening_table(rows);
    if (!args.out_dir.empty()) {
        print_manifest(aerogsm::write_files_atomically(args.out_dir,
                                                       {{"screening.csv", aerogsm::render_screening_csv(rows)}}));
    }
    return kExitOk;
}

int cmd_buzz(const CommonArgs& args) {
    const auto s = load(args);
    const auto horizon = horizon_for(args, s);
    const auto sim = aerogsm::run(s.sim, horizon);
    const auto buzz = aerogsm::analyze_buzz(sim.log, s, horizon);
    if (!buzz) {
        throw aerogsm::ConfigError("horizon must cover at least two TDMA frames for buzz analysis");
    }
    std::cout << fmt::format("frame rate:        {:.3f} Hz\n", buzz->fundamental_hz);
    if (buzz->audio.silent) {
        std::cout << "envelope has no audio-band content\n";
    } else {
        std::cout << fmt::format("dominant line:     {:.2f} Hz\n", buzz->dominant_hz);
        std::cout << fmt::format("fundamental level: {:.2f} dB\n", buzz->audio.fundamental_level_db);
        std::cout << fmt::format("audio band level:  {:.2f} dB\n", buzz->audio.audio_band_level_db);
        for (std::size_t k = 0; k < buzz->audio.harmonic_levels_db.size(); ++k) {
            std::cout << fmt::format("  harmonic {:2d} ({:8.2f} Hz): {:.2f} dB\n", k + 1,
                                     static_cast<double>(k + 1) * buzz->fundamental_hz,
                                     buzz->audio.harmonic_levels_db[k]);
        }
    }
    if (!args.out_dir.empty()) {
        const auto trace = aerogsm::synthesize_envelope(sim.log, aerogsm::Nanos(0), horizon,
                                                        s.analysis.sample_rate_hz, s.analysis.ramp_us);
        print_manifest(aerogsm::write_files_atomically(
            args.out_dir, {{"trace.csv", aerogsm::render_trace_csv(trace)},
                           {"spectrum.csv", aerogsm::render_spectrum_csv(buzz->spectrum)}}));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cabin GSM1800 RACH interference and TDMA buzz analysis"};
    app.set_version_flag("--version", std::string(aerogsm::kToolVersion));
    app.require_subcommand(1);

    CommonArgs args;
    std::vector<std::string> formats{"summary", "csv", "json"};

    auto add_scenario = [&](CLI::App* sub) {
        sub->add_option("scenario", args.scenario, "Scenario file")->required();
        sub->add_flag("--lax", args.lax, "Warn on unknown keys instead of failing");
    };

    auto* run = app.add_subcommand("run", "Simulate, analyse and write reports");
    add_scenario(run);
    run->add_option("--horizon", args.horizon_ms, "Simulated time in ms");
    run->add_option("--out", args.out_dir, std::string("Output directory (default $") + kOutDirEnv + ")");
    run->add_option("--formats", formats, "Any of summary, csv, json")->delimiter(',');
    run->add_option("--seed", args.seed, "Override the scenario seed");

    auto* check = app.add_subcommand("check", "Validate a scenario");
    add_scenario(check);

    auto* bands = app.add_subcommand("bands", "Band-plan screening table only");
    add_scenario(bands);
    bands->add_option("--out", args.out_dir, "Also write screening.csv here");

    auto* buzz = app.add_subcommand("buzz", "Envelope spectrum and buzz levels only");
    add_scenario(buzz);
    buzz->add_option("--horizon", args.horizon_ms, "Simulated time in ms");
    buzz->add_option("--seed", args.seed, "Override the scenario seed");
    buzz->add_option("--out", args.out_dir, "Also write trace.csv and spectrum.csv here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(args, formats);
        }
        if (*check) {
            return cmd_check(args);
        }
        if (*bands) {
            return cmd_bands(args);
        }
        return cmd_buzz(args);
    } catch (const aerogsm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const aerogsm::SubWavelengthDistance& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
