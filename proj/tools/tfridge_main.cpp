// tfridge: synthesize, simulate, and analyze time-frequency ridge data.
//
// Exit codes: 0 success; 2 configuration, usage, or I/O errors (including
// non-uniform input grids and missing output directories); 3 oscillator
// truncation not converged; 4 domain or analysis errors; 1 unexpected.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "tfridge/config.hpp"
#include "tfridge/csv.hpp"
#include "tfridge/dimer.hpp"
#include "tfridge/errors.hpp"
#include "tfridge/ridge.hpp"
#include "tfridge/spectral.hpp"
#include "tfridge/synth.hpp"
#include "tfridge/version.hpp"
#include "tfridge/wavelet.hpp"

namespace {

namespace fs = std::filesystem;

struct CliOptions {
  std::string preset;
  std::string config_file;
  std::string out_dir;
  bool fit = false;
  std::optional<double> threshold;
  std::optional<double> fmin;
  std::optional<double> fmax;
  std::optional<int> voices;
  std::optional<double> omega0;
};

void add_common_options(CLI::App* cmd, CliOptions& opt, bool with_analysis) {
  auto* preset = cmd->add_option("--preset", opt.preset,
                                 "Named parameter preset (see --list-presets)");
  auto* config =
      cmd->add_option("--config", opt.config_file, "JSON configuration file");
  preset->excludes(config);
  config->excludes(preset);
  cmd->add_option("--out", opt.out_dir,
                  "Output directory (must exist; overrides config out_dir)");
  if (with_analysis) {
    cmd->add_flag("--fit", opt.fit,
                  "Fit the peak track to omega_inf + A*exp(-r*t), write fit.json");
    cmd->add_option("--threshold", opt.threshold,
                    "Ridge dominance threshold in (0,1], default 0.2");
    cmd->add_option("--fmin", opt.fmin, "Band lower angular frequency");
    cmd->add_option("--fmax", opt.fmax, "Band upper angular frequency");
    cmd->add_option("--voices", opt.voices, "Frequency bins per octave");
    cmd->add_option("--omega0", opt.omega0, "Morlet center frequency (>= 5)");
  }
}

tfridge::RunConfig resolve_config(const CliOptions& opt) {
  if (opt.preset.empty() == opt.config_file.empty())
    throw tfridge::ConfigError("give exactly one of --preset or --config");
  tfridge::RunConfig cfg = opt.preset.empty()
                               ? tfridge::load_config(opt.config_file)
                               : tfridge::preset(opt.preset);
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (opt.threshold) cfg.ridge.threshold = *opt.threshold;
  if (opt.fmin || opt.fmax || opt.voices || opt.omega0) {
    tfridge::CwtParams p = cfg.cwt.value_or(tfridge::CwtParams{});
    if (opt.fmin) p.f_min = *opt.fmin;
    if (opt.fmax) p.f_max = *opt.fmax;
    if (opt.voices) p.voices = *opt.voices;
    if (opt.omega0) p.omega0 = *opt.omega0;
    cfg.cwt = p;
  }
  return cfg;
}

fs::path require_out_dir(const tfridge::RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  if (!fs::is_directory(dir))
    throw tfridge::IoError("output directory does not exist: " + dir.string());
  return dir;
}

void write_run_json(const fs::path& dir, const std::string& command,
                    const tfridge::RunConfig& cfg) {
  nlohmann::json j;
  j["version"] = tfridge::version;
  j["command"] = command;
  j["config"] = tfridge::config_to_json(cfg);
  tfridge::io::atomic_write(dir / "run.json", j.dump(2) + "\n");
}

tfridge::TimeSeries make_signal(const tfridge::RunConfig& cfg) {
  if (cfg.toy) return tfridge::gen_toy_signal(*cfg.toy, *cfg.grid);
  if (cfg.lineshape) return tfridge::gen_lineshape_signal(*cfg.lineshape, *cfg.grid);
  if (cfg.dimer) return tfridge::evolve(*cfg.dimer).as_time_series();
  return tfridge::io::read_time_series(*cfg.input_csv);
}

int cmd_synth(const CliOptions& opt) {
  tfridge::RunConfig cfg = resolve_config(opt);
  if (!cfg.toy && !cfg.lineshape)
    throw tfridge::ConfigError("synth needs a toy or lineshape source");
  const fs::path dir = require_out_dir(cfg);
  tfridge::io::write_time_series(dir / "signal.csv", make_signal(cfg));
  write_run_json(dir, "synth", cfg);
  return 0;
}

int cmd_sim_dimer(const CliOptions& opt) {
  tfridge::RunConfig cfg = resolve_config(opt);
  if (!cfg.dimer) throw tfridge::ConfigError("sim-dimer needs a dimer source");
  const fs::path dir = require_out_dir(cfg);
  const tfridge::CoherenceTrace trace = tfridge::evolve(*cfg.dimer);
  tfridge::io::write_time_series(dir / "coherence.csv", trace.as_time_series());
  write_run_json(dir, "sim-dimer", cfg);
  return 0;
}

int cmd_analyze(const CliOptions& opt) {
  tfridge::RunConfig cfg = resolve_config(opt);
  const fs::path dir = require_out_dir(cfg);
  if (!cfg.cwt)
    throw tfridge::ConfigError(
        "analyze needs cwt parameters (config 'cwt' or --fmin/--fmax/--voices)");

  const tfridge::TimeSeries signal = make_signal(cfg);
  tfridge::io::write_spectrum(dir / "spectrum.csv",
                              tfridge::dft_magnitude(signal));

  const tfridge::MorletParams morlet{cfg.cwt->omega0};
  const tfridge::ScaleBank bank = tfridge::make_scale_bank(
      cfg.cwt->f_min, cfg.cwt->f_max, cfg.cwt->voices, signal.grid(), morlet);
  const tfridge::Scalogram scal = tfridge::cwt(signal, bank, morlet);
  tfridge::io::write_scalogram(dir / "scalogram.csv", scal);

  const tfridge::RidgeTrack track = tfridge::dominant_frequencies(
      scal, cfg.ridge.threshold, cfg.ridge.respect_coi);
  tfridge::io::write_ridge(dir / "ridge.csv", track);

  if (opt.fit) {
    double t_start, t_end;
    if (cfg.fit) {
      t_start = cfg.fit->t_start;
      t_end = cfg.fit->t_end;
    } else {
      const auto extent = tfridge::track_extent(scal, track);
      if (!extent)
        throw tfridge::WindowTooShort(
            "fit: peak track never clears the cone of influence");
      t_start = extent->first;
      t_end = extent->second;
    }
    const tfridge::RelaxationFit fit =
        tfridge::fit_relaxation(track, t_start, t_end);
    nlohmann::json j;
    j["omega_inf"] = fit.omega_inf;
    j["amplitude"] = fit.lambda_est;
    j["rate"] = fit.rate_est;
    j["rms_residual"] = fit.rms_residual;
    tfridge::io::atomic_write(dir / "fit.json", j.dump(2) + "\n");
  }
  write_run_json(dir, "analyze", cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-frequency ridge analysis toolkit"};
  app.set_version_flag("--version", std::string(tfridge::version));

  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "List preset names and exit");

  CliOptions synth_opt, dimer_opt, analyze_opt;
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic signal.csv");
  add_common_options(synth, synth_opt, false);
  CLI::App* sim =
      app.add_subcommand("sim-dimer", "Integrate the dimer, write coherence.csv");
  add_common_options(sim, dimer_opt, false);
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Write spectrum.csv, scalogram.csv, ridge.csv (and fit.json)");
  add_common_options(analyze, analyze_opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (list_presets) {
    for (const auto& name : tfridge::preset_names()) std::cout << name << "\n";
    return 0;
  }
  if (!synth->parsed() && !sim->parsed() && !analyze->parsed()) {
    std::cerr << "error: expected a subcommand (synth, sim-dimer, analyze)\n";
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_opt);
    if (sim->parsed()) return cmd_sim_dimer(dimer_opt);
    return cmd_analyze(analyze_opt);
  } catch (const tfridge::TruncationNotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tfridge::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tfridge::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tfridge::NonUniformGrid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tfridge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
