#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfridge/core.hpp"
#include "tfridge/dimer.hpp"
#include "tfridge/errors.hpp"
#include "tfridge/synth.hpp"

namespace tfridge {

/// Analysis band: log-spaced frequencies in [f_min, f_max] (angular), with
/// `voices` bins per octave.
struct CwtParams {
  double f_min = 0.0;
  double f_max = 0.0;
  int voices = 16;
  double omega0 = 6.0;
};

struct RidgeOptions {
  double threshold = 0.2;
  bool respect_coi = true;
};

struct FitWindow {
  double t_start = 0.0;
  double t_end = 0.0;
};

/// One full run: exactly one signal source, plus the analysis band, ridge
/// rule, optional fit window, and output directory.
struct RunConfig {
  std::optional<ToyParams> toy;
  std::optional<LineshapeParams> lineshape;
  std::optional<DimerParams> dimer;  // carries its own grid
  std::optional<std::string> input_csv;
  std::optional<TimeGrid> grid;  // sampling grid for toy/lineshape sources
  std::optional<CwtParams> cwt;
  RidgeOptions ridge;
  std::optional<FitWindow> fit;
  std::string out_dir = ".";

  int source_count() const {
    return (toy ? 1 : 0) + (lineshape ? 1 : 0) + (dimer ? 1 : 0) +
           (input_csv ? 1 : 0);
  }
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

inline double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  if (!j.at(key).is_number())
    throw ConfigError(where + ": key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline double get_number_or(const json& j, const char* key, double fallback,
                            const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError(where + ": key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline int get_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  if (!j.at(key).is_number_integer())
    throw ConfigError(where + ": key '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

inline TimeGrid parse_grid(const json& j, const std::string& where) {
  check_keys(j, {"t0", "dt", "n"}, where);
  const double t0 = get_number(j, "t0", where);
  const double dt = get_number(j, "dt", where);
  const int n = get_int(j, "n", where);
  if (n < 2) throw ConfigError(where + ": n must be >= 2");
  try {
    return TimeGrid(t0, dt, static_cast<std::size_t>(n));
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline ToyParams parse_toy(const json& j, std::optional<TimeGrid>& grid) {
  check_keys(j, {"components", "grid"}, "toy");
  if (!j.contains("components") || !j.at("components").is_array() ||
      j.at("components").empty())
    throw ConfigError("toy: 'components' must be a nonempty array");
  ToyParams p;
  std::size_t idx = 0;
  for (const auto& c : j.at("components")) {
    const std::string where = "toy.components[" + std::to_string(idx) + "]";
    check_keys(c, {"omega", "mu", "sigma"}, where);
    p.components.push_back({get_number(c, "omega", where),
                            get_number(c, "mu", where),
                            get_number(c, "sigma", where)});
    ++idx;
  }
  if (j.contains("grid")) grid = parse_grid(j.at("grid"), "toy.grid");
  return p;
}

inline LineshapeParams parse_lineshape(const json& j,
                                       std::optional<TimeGrid>& grid) {
  check_keys(j, {"omega_eg", "lambda", "s", "omega_d", "g_re", "grid"},
             "lineshape");
  if (j.contains("lambda") && j.contains("s"))
    throw ConfigError("lineshape: give either 'lambda' or its alias 's', not both");
  if (!j.contains("lambda") && !j.contains("s"))
    throw ConfigError("lineshape: missing key 'lambda' (alias 's')");
  LineshapeParams p;
  p.omega_eg = get_number(j, "omega_eg", "lineshape");
  p.lambda = j.contains("lambda") ? get_number(j, "lambda", "lineshape")
                                  : get_number(j, "s", "lineshape");
  p.omega_d = get_number(j, "omega_d", "lineshape");
  p.g_re = get_number_or(j, "g_re", 0.0, "lineshape");
  if (j.contains("grid")) grid = parse_grid(j.at("grid"), "lineshape.grid");
  return p;
}

inline DimerParams parse_dimer(const json& j) {
  check_keys(j, {"j", "g", "omega", "gamma", "n_max", "grid"}, "dimer");
  DimerParams p;
  p.j = get_number(j, "j", "dimer");
  p.g = get_number(j, "g", "dimer");
  p.omega = get_number(j, "omega", "dimer");
  p.gamma = get_number(j, "gamma", "dimer");
  p.n_max = get_int(j, "n_max", "dimer");
  if (!j.contains("grid")) throw ConfigError("dimer: missing key 'grid'");
  p.grid = parse_grid(j.at("grid"), "dimer.grid");
  return p;
}

}  // namespace detail

/// Parse a RunConfig from JSON. Field names mirror the struct exactly;
/// unknown keys anywhere are errors.
inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::check_keys;
  check_keys(j, {"toy", "lineshape", "dimer", "input_csv", "cwt", "ridge", "fit",
                 "out_dir"},
             "config");
  RunConfig cfg;
  if (j.contains("toy")) cfg.toy = detail::parse_toy(j.at("toy"), cfg.grid);
  if (j.contains("lineshape"))
    cfg.lineshape = detail::parse_lineshape(j.at("lineshape"), cfg.grid);
  if (j.contains("dimer")) cfg.dimer = detail::parse_dimer(j.at("dimer"));
  if (j.contains("input_csv")) {
    if (!j.at("input_csv").is_string())
      throw ConfigError("config: 'input_csv' must be a string path");
    cfg.input_csv = j.at("input_csv").get<std::string>();
  }
  if (cfg.source_count() != 1)
    throw ConfigError("config: exactly one of toy/lineshape/dimer/input_csv "
                      "must be given, found " +
                      std::to_string(cfg.source_count()));
  if ((cfg.toy || cfg.lineshape) && !cfg.grid)
    throw ConfigError("config: synthetic sources require a 'grid' object");

  if (j.contains("cwt")) {
    const auto& c = j.at("cwt");
    check_keys(c, {"f_min", "f_max", "voices", "omega0"}, "cwt");
    CwtParams p;
    p.f_min = detail::get_number(c, "f_min", "cwt");
    p.f_max = detail::get_number(c, "f_max", "cwt");
    p.voices = detail::get_int(c, "voices", "cwt");
    p.omega0 = detail::get_number_or(c, "omega0", 6.0, "cwt");
    cfg.cwt = p;
  }
  if (j.contains("ridge")) {
    const auto& r = j.at("ridge");
    check_keys(r, {"threshold", "respect_coi"}, "ridge");
    cfg.ridge.threshold =
        detail::get_number_or(r, "threshold", cfg.ridge.threshold, "ridge");
    if (r.contains("respect_coi")) {
      if (!r.at("respect_coi").is_boolean())
        throw ConfigError("ridge: 'respect_coi' must be a boolean");
      cfg.ridge.respect_coi = r.at("respect_coi").get<bool>();
    }
  }
  if (j.contains("fit")) {
    const auto& f = j.at("fit");
    check_keys(f, {"t_start", "t_end"}, "fit");
    cfg.fit = FitWindow{detail::get_number(f, "t_start", "fit"),
                        detail::get_number(f, "t_end", "fit")};
  }
  if (j.contains("out_dir")) {
    if (!j.at("out_dir").is_string())
      throw ConfigError("config: 'out_dir' must be a string path");
    cfg.out_dir = j.at("out_dir").get<std::string>();
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return parse_config(j);
}

/// Serialize a RunConfig back to the JSON layout parse_config accepts.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  auto grid_json = [](const TimeGrid& g) {
    return nlohmann::json{{"t0", g.t0()}, {"dt", g.dt()},
                          {"n", static_cast<long long>(g.size())}};
  };
  if (cfg.toy) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : cfg.toy->components)
      comps.push_back({{"omega", c.omega}, {"mu", c.mu}, {"sigma", c.sigma}});
    j["toy"] = {{"components", comps}};
    if (cfg.grid) j["toy"]["grid"] = grid_json(*cfg.grid);
  }
  if (cfg.lineshape) {
    j["lineshape"] = {{"omega_eg", cfg.lineshape->omega_eg},
                      {"lambda", cfg.lineshape->lambda},
                      {"omega_d", cfg.lineshape->omega_d},
                      {"g_re", cfg.lineshape->g_re}};
    if (cfg.grid) j["lineshape"]["grid"] = grid_json(*cfg.grid);
  }
  if (cfg.dimer) {
    j["dimer"] = {{"j", cfg.dimer->j},         {"g", cfg.dimer->g},
                  {"omega", cfg.dimer->omega}, {"gamma", cfg.dimer->gamma},
                  {"n_max", cfg.dimer->n_max}, {"grid", grid_json(cfg.dimer->grid)}};
  }
  if (cfg.input_csv) j["input_csv"] = *cfg.input_csv;
  if (cfg.cwt)
    j["cwt"] = {{"f_min", cfg.cwt->f_min},
                {"f_max", cfg.cwt->f_max},
                {"voices", cfg.cwt->voices},
                {"omega0", cfg.cwt->omega0}};
  j["ridge"] = {{"threshold", cfg.ridge.threshold},
                {"respect_coi", cfg.ridge.respect_coi}};
  if (cfg.fit)
    j["fit"] = {{"t_start", cfg.fit->t_start}, {"t_end", cfg.fit->t_end}};
  j["out_dir"] = cfg.out_dir;
  return j;
}

/// Compiled-in registry pinning every preset's parameters.
inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "paper-A", "paper-B", "fig3-left", "fig3-right", "fig6", "fig7", "fig8"};
  return names;
}

inline RunConfig preset(const std::string& name) {
  RunConfig cfg;
  if (name == "paper-A" || name == "paper-B") {
    ToyParams toy;
    const double mu2 = (name == "paper-A") ? 80.0 : 25.0;
    toy.components = {{20.0, 20.0, 4.0}, {50.0, mu2, 4.0}, {80.0, 170.0, 4.0}};
    cfg.toy = toy;
    cfg.grid = TimeGrid(0.0, 0.005, 50001);  // t in [0, 250]
    cfg.cwt = CwtParams{5.0, 120.0, 16, 6.0};
  } else if (name == "fig3-left") {
    DimerParams d;
    d.j = 1.0;
    d.g = 0.015;
    d.omega = 0.4;
    d.gamma = 0.01;
    d.n_max = 10;
    // Long enough for the slow vibronic branch to outlast the dephasing
    // 2*gamma decay of the fast branch (crossover near t = 370).
    d.grid = TimeGrid(0.0, 0.01, 55001);  // t in [0, 550]
    cfg.dimer = d;
    cfg.cwt = CwtParams{0.25, 3.5, 32, 6.0};
  } else if (name == "fig3-right") {
    DimerParams d;
    d.j = 1.0;
    d.g = 0.15;
    d.omega = 2.0;
    d.gamma = 0.01;
    d.n_max = 10;
    d.grid = TimeGrid(0.0, 0.01, 15001);  // t in [0, 150]
    cfg.dimer = d;
    // The resonant spectrum is a dense progression of vibronic lines a few
    // percent apart; a high-Q atom keeps the ridge locked onto them instead
    // of wandering between unresolved neighbors.
    cfg.cwt = CwtParams{1.2, 3.3, 64, 28.0};
  } else if (name == "fig6" || name == "fig7" || name == "fig8") {
    LineshapeParams l;
    l.omega_eg = 3.0;
    l.lambda = 2.0;
    l.omega_d = 0.05;
    l.g_re = (name == "fig6") ? 0.0 : (name == "fig7" ? 0.01 : 0.05);
    cfg.lineshape = l;
    cfg.grid = TimeGrid(0.0, 0.01, 40001);  // t in [0, 400]
    cfg.cwt = CwtParams{1.0, 8.0, 32, 6.0};
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return cfg;
}

}  // namespace tfridge
