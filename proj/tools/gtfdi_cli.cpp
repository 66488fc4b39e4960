// Command-line front end: trim points, build model banks, run scenarios and
// campaigns, estimate fault severity from recorded traces, and compare
// methods.  Exit codes: 0 success, 2 configuration/validation failure,
// 3 numerical failure.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gtfdi/engine/config.hpp"
#include "gtfdi/engine/profile.hpp"
#include "gtfdi/engine/trim.hpp"
#include "gtfdi/errors.hpp"
#include "gtfdi/linearize/model_bank.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

gtfdi::engine::EngineConfig load_config(const std::string& path) {
  if (path.empty()) return gtfdi::engine::EngineConfig::builtin();
  return gtfdi::engine::EngineConfig::load(path);
}

int cmd_trim(const std::string& config_path, double fuel, double alt_ft, double mach) {
  using namespace gtfdi;
  engine::EngineConfig cfg = load_config(config_path);
  engine::EngineModel model(cfg);
  const engine::RamConditions ram =
      engine::ram_conditions(alt_ft, mach, cfg.ambient, cfg.gamma);
  const engine::TrimResult res =
      engine::trim(model, fuel, ram, engine::HealthFactors{}, cfg.design_state);
  std::printf("state: P_cc=%.6f bar  N=%.3f rpm  T_cc=%.3f K  P_t=%.6f bar\n",
              res.state[0], res.state[1], res.state[2], res.state[3]);
  std::printf("outputs: T_c=%.3f K  P_c=%.6f bar  N=%.3f rpm  T_t=%.3f K  P_t=%.6f bar\n",
              res.outputs[0], res.outputs[1], res.outputs[2], res.outputs[3], res.outputs[4]);
  std::printf("residual_norm=%.3e  iterations=%d\n", res.residual_norm, res.iterations);
  return kExitOk;
}

int cmd_linearize(const std::string& config_path, const std::string& points_path,
                  const std::string& out_path, double sample_period) {
  using namespace gtfdi;
  engine::EngineConfig cfg = load_config(config_path);
  engine::EngineModel model(cfg);
  const std::vector<linearize::OperatingPoint> points =
      linearize::load_operating_points(points_path);
  const linearize::ModelBank bank =
      linearize::build_bank(model, points, sample_period);
  linearize::save_bank(bank, out_path);
  std::printf("wrote %d-model bank to %s\n", bank.size(), out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gas-turbine sensor fault detection toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "engine config file (default: built-in)");

  auto* trim = app.add_subcommand("trim", "solve a steady operating point");
  double trim_fuel = 0.25, trim_alt = 16404.2, trim_mach = 0.85;
  trim->add_option("--fuel", trim_fuel, "fuel flow");
  trim->add_option("--alt-ft", trim_alt, "altitude [ft]");
  trim->add_option("--mach", trim_mach, "Mach number");

  auto* lin = app.add_subcommand("linearize", "build and persist the model bank");
  std::string lin_points, lin_out = "bank.json";
  double lin_ts = 0.01;
  lin->add_option("--points", lin_points, "operating-point CSV")->required();
  lin->add_option("--out", lin_out, "output bank path");
  lin->add_option("--sample-period", lin_ts, "discretization period [s]");

  CLI11_PARSE(app, argc, argv);

  try {
    if (trim->parsed()) return cmd_trim(config_path, trim_fuel, trim_alt, trim_mach);
    if (lin->parsed()) return cmd_linearize(config_path, lin_points, lin_out, lin_ts);
  } catch (const gtfdi::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const gtfdi::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitConfig;
  } catch (const gtfdi::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
