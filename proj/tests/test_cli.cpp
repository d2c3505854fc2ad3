#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tfridge/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;

  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() /
           ("tfridge_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + TFRIDGE_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  REQUIRE(out.good());
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_toy_config(const fs::path& out_dir) {
  return json{
      {"toy",
       {{"components", json::array({{{"omega", 6.0}, {"mu", 10.0}, {"sigma", 2.0}},
                                    {{"omega", 15.0}, {"mu", 22.0}, {"sigma", 2.0}}})},
        {"grid", {{"t0", 0.0}, {"dt", 0.02}, {"n", 1601}}}}},
      {"cwt", {{"f_min", 3.0}, {"f_max", 25.0}, {"voices", 8}}},
      {"out_dir", out_dir.string()}};
}

}  // namespace

TEST_CASE("cli rejects bad invocations") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("analyze") == 2);  // neither preset nor config
  TempDir tmp;
  CHECK(run_cli("analyze --preset paper-A --config missing.json --out " +
                tmp.path.string()) == 2);
  CHECK(run_cli("synth --preset no-such-preset --out " + tmp.path.string()) == 2);
}

TEST_CASE("cli lists presets") {
  CHECK(run_cli("--list-presets") == 0);
}

TEST_CASE("synth writes the signal and a run record") {
  TempDir tmp;
  REQUIRE(run_cli("synth --preset paper-A --out " + tmp.path.string()) == 0);

  const auto ts = tfridge::io::read_time_series(tmp.path / "signal.csv");
  CHECK(ts.size() == 50001);
  CHECK(ts.grid().dt() == Catch::Approx(0.005).margin(1e-12));

  const json run = json::parse(slurp(tmp.path / "run.json"));
  CHECK(run.contains("version"));
  CHECK(run.at("command") == "synth");
  CHECK(run.at("config").contains("toy"));
}

TEST_CASE("synth requires an existing output directory and a synthetic source") {
  TempDir tmp;
  CHECK(run_cli("synth --preset paper-A --out " +
                (tmp.path / "missing").string()) == 2);
  CHECK(run_cli("synth --preset fig3-left --out " + tmp.path.string()) == 2);
}

TEST_CASE("analyze produces deterministic artifacts") {
  TempDir tmp;
  const fs::path out_a = tmp.path / "a";
  const fs::path out_b = tmp.path / "b";
  fs::create_directories(out_a);
  fs::create_directories(out_b);

  const fs::path cfg_a = tmp.path / "a.json";
  const fs::path cfg_b = tmp.path / "b.json";
  write_file(cfg_a, small_toy_config(out_a).dump(2));
  write_file(cfg_b, small_toy_config(out_b).dump(2));

  REQUIRE(run_cli("analyze --config " + cfg_a.string()) == 0);
  REQUIRE(run_cli("analyze --config " + cfg_b.string()) == 0);

  for (const char* name : {"spectrum.csv", "scalogram.csv", "ridge.csv"}) {
    INFO(name);
    CHECK(slurp(out_a / name) == slurp(out_b / name));
  }

  const auto scal = tfridge::io::read_scalogram(out_a / "scalogram.csv");
  CHECK(scal.grid().size() == 1601);
  CHECK(scal.freqs().front() > scal.freqs().back());

  const auto track = tfridge::io::read_ridge(out_a / "ridge.csv", scal.grid());
  bool found_low = false;
  bool found_high = false;
  for (std::size_t i = 0; i < track.peak().size(); ++i) {
    if (const auto& p = track.peak()[i]) {
      const double t = scal.grid().time(i);
      if (t > 9.0 && t < 11.0 && std::abs(p->freq - 6.0) / 6.0 < 0.1) {
        found_low = true;
      }
      if (t > 21.0 && t < 23.0 && std::abs(p->freq - 15.0) / 15.0 < 0.1) {
        found_high = true;
      }
    }
  }
  CHECK(found_low);
  CHECK(found_high);
}

TEST_CASE("analyze reads an external signal and rejects a non-uniform one") {
  TempDir tmp;
  const fs::path sig = tmp.path / "sig.csv";
  {
    std::ostringstream ss;
    ss << "t,value\n";
    for (int i = 0; i < 600; ++i) {
      const double t = 0.05 * i;
      ss << t << "," << std::sin(4.0 * t) << "\n";
    }
    write_file(sig, ss.str());
  }
  const json cfg = {{"input_csv", sig.string()},
                    {"cwt", {{"f_min", 1.0}, {"f_max", 12.0}, {"voices", 8}}},
                    {"out_dir", tmp.path.string()}};
  const fs::path cfg_path = tmp.path / "run.jsonc.json";
  write_file(cfg_path, cfg.dump());
  REQUIRE(run_cli("analyze --config " + cfg_path.string()) == 0);
  CHECK(fs::exists(tmp.path / "scalogram.csv"));

  write_file(sig, "t,value\n0,1\n0.1,2\n0.25,3\n0.3,4\n");
  CHECK(run_cli("analyze --config " + cfg_path.string()) == 2);
}

TEST_CASE("analyze surfaces analysis errors distinctly from config errors") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "cfg.json";
  write_file(cfg_path, small_toy_config(tmp.path).dump());
  CHECK(run_cli("analyze --config " + cfg_path.string() + " --threshold 1.5") == 4);

  json bad = small_toy_config(tmp.path);
  bad["bogus"] = true;
  write_file(cfg_path, bad.dump());
  CHECK(run_cli("analyze --config " + cfg_path.string()) == 2);
}

TEST_CASE("sim-dimer writes the coherence trace and flags truncation") {
  TempDir tmp;
  json cfg = {{"dimer",
               {{"j", 1.0},
                {"g", 0.1},
                {"omega", 0.4},
                {"gamma", 0.0},
                {"n_max", 6},
                {"grid", {{"t0", 0.0}, {"dt", 0.01}, {"n", 501}}}}},
              {"out_dir", tmp.path.string()}};
  const fs::path cfg_path = tmp.path / "dimer.json";
  write_file(cfg_path, cfg.dump());
  REQUIRE(run_cli("sim-dimer --config " + cfg_path.string()) == 0);

  const auto trace = tfridge::io::read_time_series(tmp.path / "coherence.csv");
  REQUIRE(trace.size() == 501);
  CHECK(trace.values().front() == Catch::Approx(-0.5).margin(1e-12));

  // Resonant coupling pumps the ladder; two levels cannot hold it.
  cfg["dimer"]["n_max"] = 2;
  cfg["dimer"]["g"] = 0.15;
  cfg["dimer"]["omega"] = 2.0;
  cfg["dimer"]["grid"]["n"] = 1001;
  write_file(cfg_path, cfg.dump());
  CHECK(run_cli("sim-dimer --config " + cfg_path.string()) == 3);
}

TEST_CASE("analyze --fit emits the relaxation summary") {
  TempDir tmp;
  const json cfg = {
      {"lineshape",
       {{"omega_eg", 3.0},
        {"lambda", 2.0},
        {"omega_d", 0.05},
        {"grid", {{"t0", 0.0}, {"dt", 0.05}, {"n", 4001}}}}},
      {"cwt", {{"f_min", 1.0}, {"f_max", 8.0}, {"voices", 12}}},
      {"out_dir", tmp.path.string()}};
  const fs::path cfg_path = tmp.path / "cfg.json";
  write_file(cfg_path, cfg.dump());
  REQUIRE(run_cli("analyze --fit --config " + cfg_path.string()) == 0);

  const json fit = json::parse(slurp(tmp.path / "fit.json"));
  CHECK(fit.at("rate").get<double>() > 0.0);
  CHECK(fit.at("omega_inf").get<double>() > 0.0);
  CHECK(fit.contains("amplitude"));
  CHECK(fit.contains("rms_residual"));
}
