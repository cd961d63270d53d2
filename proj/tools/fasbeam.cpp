#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fasbeam/errors.hpp"
#include "fasbeam/harness/config_file.hpp"
#include "fasbeam/harness/outcome_log.hpp"
#include "fasbeam/harness/runs.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "INI-style experiment file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--preset", f.preset, "GNN size preset")
      ->check(CLI::IsMember({"paper", "desk"}));
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--set", f.sets, "Override a setting, e.g. --set network.tx_power_dbm=0");
}

fasbeam::harness::ExperimentSpec make_spec(const CommonFlags& f) {
  using namespace fasbeam::harness;
  Settings s;
  if (!f.config.empty()) s = read_settings(f.config);
  for (const auto& a : f.sets) s.push_back(parse_assignment(a));
  if (f.seed) s.emplace_back("experiment.seed", std::to_string(*f.seed));
  if (!f.out.empty()) s.emplace_back("experiment.out", f.out);
  std::optional<fasbeam::GnnPreset> preset;
  if (!f.preset.empty()) preset = fasbeam::parse_preset(f.preset);
  return build_spec(s, preset);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fasbeam::harness;
  CLI::App app{"Fluid-antenna multi-cell GNN beamforming experiments"};
  app.require_subcommand(0, 1);

  CommonFlags flags;
  std::string log_path;
  bool list_keys = false;
  auto* train = app.add_subcommand("train", "Train one GNN per cell and save the models");
  auto* bench = app.add_subcommand("benchmark", "Mean WSR per scheme over channel draws");
  auto* rps = app.add_subcommand("rps-dist", "Best-of-T WSR distribution of random port selection");
  auto* sched = app.add_subcommand("sched", "Accelerator cycle counts for 1..B concurrent tasks");
  auto* verify = app.add_subcommand("verify", "Recompute logged outcomes from their channel seeds");
  for (auto* cmd : {train, bench, rps, sched, verify}) add_common(cmd, flags);
  verify->add_option("--log", log_path, "Outcome log (default <out>/outcomes.jsonl)");
  app.add_flag("--list-keys", list_keys, "Print every configuration key and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  if (list_keys) {
    for (const auto& k : known_keys()) std::cout << k << '\n';
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    const ExperimentSpec spec = make_spec(flags);
    if (train->parsed()) {
      const auto out = run_train(spec, &std::cerr);
      for (const auto& m : out.models) std::cout << "wrote " << m.string() << '\n';
      std::cout << "wrote " << out.history_csv.string() << '\n';
    } else if (bench->parsed()) {
      const auto out = run_benchmark(spec, &std::cerr);
      std::cout << "wrote " << out.csv.string() << '\n';
      if (!out.log.empty()) std::cout << "wrote " << out.log.string() << '\n';
    } else if (rps->parsed()) {
      const auto out = run_rps_distribution(spec, &std::cerr);
      std::cout << "wrote " << out.csv.string() << '\n';
    } else if (sched->parsed()) {
      const auto out = run_sched(spec, &std::cout);
      std::cout << "wrote " << out.csv.string() << '\n';
    } else if (verify->parsed()) {
      const std::string path =
          log_path.empty() ? (spec.out / "outcomes.jsonl").string() : log_path;
      const auto result = verify_records(read_records(path));
      std::cout << "checked " << result.checked << " outcomes, " << result.failed
                << " failed, max relative error " << result.max_rel_error << '\n';
      for (const auto& msg : result.failures) std::cout << "  " << msg << '\n';
      return result.failed == 0 ? 0 : kRuntimeError;
    }
  } catch (const fasbeam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
