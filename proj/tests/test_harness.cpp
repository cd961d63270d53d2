#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fasbeam/errors.hpp"
#include "fasbeam/harness/config_file.hpp"
#include "fasbeam/harness/csv.hpp"
#include "fasbeam/harness/outcome_log.hpp"
#include "fasbeam/harness/runs.hpp"
#include "fasbeam/rng.hpp"

using namespace fasbeam;
using namespace fasbeam::harness;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("fasbeam_harness_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(f, line)) ++n;
  return n;
}

ExperimentSpec quick_spec(const std::filesystem::path& out) {
  Settings s = {{"experiment.out", out.string()},      {"network.cells", "2"},
                {"network.ues", "2"},                  {"train.epochs", "2"},
                {"train.samples_per_epoch", "40"},     {"train.batch_size", "20"},
                {"train.eval_samples", "20"},          {"experiment.draws", "3"},
                {"experiment.trials_exhaustive", "10"}, {"rps.trials", "1,5,10"},
                {"rps.draws", "4"}};
  return build_spec(s);
}

}  // namespace

TEST(Csv, QuotingAndFloats) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_double(12345678912.0), "1.23456789e+10");
  std::ostringstream out;
  CsvWriter w(out);
  w.row({"x", "y,z"});
  EXPECT_EQ(out.str(), "x,\"y,z\"\n");
}

TEST(Config, ReadsIniAndAppliesOverrides) {
  const auto dir = fresh_dir("config");
  const auto path = dir / "exp.ini";
  std::ofstream(path) << "; comment\n[network]\ncells = 3\nues = 2\ntx_power_dbm = 6\n"
                         "[experiment]\nschemes = GNN-RandomMax, MMSE-Exhaustive\nseed = 11\n";
  Settings s = read_settings(path);
  s.push_back(parse_assignment("network.noise_dbm=-80"));
  const auto spec = build_spec(s);
  EXPECT_EQ(spec.network.num_cells, 3u);
  EXPECT_EQ(spec.network.ues_per_cell, (std::vector<std::size_t>{2, 2, 2}));
  EXPECT_EQ(spec.network.tx_power_dbm, 6.0);
  EXPECT_EQ(spec.network.noise_dbm, -80.0);
  EXPECT_EQ(spec.seed, 11u);
  EXPECT_EQ(spec.schemes, (std::vector<Scheme>{Scheme::kGnnRandomMax, Scheme::kMmseExhaustive}));
}

TEST(Config, PresetLayering) {
  EXPECT_EQ(build_spec({}).train.samples_per_epoch, 500u);
  EXPECT_EQ(build_spec({}).trials_exhaustive, 100u);
  const auto paper = build_spec({{"experiment.preset", "paper"}});
  EXPECT_EQ(paper.train.samples_per_epoch, 10000u);
  EXPECT_EQ(paper.train.batch_size, 200u);
  EXPECT_EQ(paper.train.eval_samples, 2000u);
  EXPECT_EQ(paper.trials_exhaustive, 500u);
  // Explicit settings win over the preset regardless of order.
  const auto mixed = build_spec({{"train.batch_size", "7"}, {"experiment.preset", "paper"}});
  EXPECT_EQ(mixed.train.batch_size, 7u);
  EXPECT_EQ(build_spec({{"experiment.preset", "paper"}}, GnnPreset::kDesk).preset, GnnPreset::kDesk);
}

TEST(Config, Errors) {
  EXPECT_THROW(build_spec({{"network.nonsense", "1"}}), ConfigError);
  EXPECT_THROW(build_spec({{"network.cells", "two"}}), ConfigError);
  EXPECT_THROW(build_spec({{"experiment.schemes", "Oracle"}}), ConfigError);
  EXPECT_THROW(build_spec({{"network.ues", "0"}}), ConfigError);
  EXPECT_THROW(build_spec({{"experiment.sweep", "power_dbm"}}), ConfigError);
  EXPECT_THROW(parse_assignment("novalue"), ConfigError);
  EXPECT_THROW(parse_assignment("cells=2"), ConfigError);
  EXPECT_FALSE(known_keys().empty());
}

TEST(Config, NoiselessAllowed) {
  EXPECT_EQ(build_spec({{"network.noise_dbm", "-inf"}}).network.noise_mw(), 0.0);
}

TEST(Experiment, SweepPoints) {
  ExperimentSpec spec;
  spec.network = make_network(1, 2, 4, 6, 9.0);
  spec.sweep = SweepVariable::kCellsTotalPower;
  const auto n = network_at(spec, 3.0);
  EXPECT_EQ(n.num_cells, 3u);
  EXPECT_NEAR(3.0 * n.tx_power_mw(), dbm_to_mw(9.0), 1e-12);
  spec.sweep = SweepVariable::kUes;
  EXPECT_EQ(network_at(spec, 4.0).ues_per_cell, (std::vector<std::size_t>{4}));
  spec.sweep = SweepVariable::kPorts;
  EXPECT_EQ(network_at(spec, 3.0).ports_per_fa, 3u);
  EXPECT_THROW(network_at(spec, 2.5), ConfigError);
}

TEST(Experiment, NamedSubSeeds) {
  const auto s = sub_seeds(5);
  EXPECT_EQ(s.channel, derive_seed(5, "channel"));
  EXPECT_EQ(s.train, derive_seed(5, "train"));
  EXPECT_EQ(s.rps, derive_seed(5, "rps"));
}

TEST(OutcomeLog, JsonRoundTripIsExact) {
  OutcomeRecord r;
  r.scheme = "MRT-Exhaustive";
  r.draw = 4;
  r.channel_seed = 0xfedcba9876543210ULL;
  r.network = make_network(2, 2, 3, 4);
  r.network.noise_dbm = -INFINITY;
  r.selection = PortSelection(2, 3);
  r.selection.at(1, 2) = 3;
  r.beams = BeamformingSet(UeLayout(r.network.ues_per_cell), 3);
  Rng rng(1);
  for (auto& v : r.beams.data()) v = rng.complex_normal();
  r.wsr = 1.0 / 7.0;
  const auto back = from_json_line(to_json_line(r));
  EXPECT_EQ(back.channel_seed, r.channel_seed);
  EXPECT_EQ(back.selection, r.selection);
  EXPECT_EQ(back.beams, r.beams);
  EXPECT_EQ(back.wsr, r.wsr);
  EXPECT_EQ(back.network.noise_dbm, -INFINITY);
  EXPECT_THROW(from_json_line("{\"scheme\": 1}"), InputError);
}

TEST(Runs, TrainBenchmarkVerifyAndReproducibility) {
  const auto dir = fresh_dir("runs");
  const ExperimentSpec spec = quick_spec(dir / "a");
  const auto trained = run_train(spec);
  EXPECT_EQ(trained.models.size(), 2u);
  EXPECT_EQ(count_lines(trained.history_csv), 1 + spec.train.epochs);

  const auto bench = run_benchmark(spec);
  EXPECT_EQ(count_lines(bench.csv), 1 + spec.schemes.size());
  const auto records = read_records(bench.log);
  EXPECT_EQ(records.size(), spec.draws * spec.schemes.size());
  const auto v = verify_records(records);
  EXPECT_EQ(v.failed, 0u);
  EXPECT_LE(v.max_rel_error, 1e-9);

  const auto rps = run_rps_distribution(spec);
  EXPECT_EQ(count_lines(rps.csv), 1 + spec.rps_trials.size() * spec.rps_draws);
  for (std::size_t d = 0; d < spec.rps_draws; ++d)
    for (std::size_t t = 1; t < spec.rps_trials.size(); ++t)
      EXPECT_GE(rps.best[t][d], rps.best[t - 1][d]);

  // Same spec and seed elsewhere: byte-identical outputs.
  const ExperimentSpec again = quick_spec(dir / "b");
  run_train(again);
  run_benchmark(again);
  EXPECT_EQ(slurp(dir / "a" / "train_history.csv"), slurp(dir / "b" / "train_history.csv"));
  EXPECT_EQ(slurp(dir / "a" / "benchmark.csv"), slurp(dir / "b" / "benchmark.csv"));
  EXPECT_EQ(slurp(dir / "a" / "model_cell1.fbgn"), slurp(dir / "b" / "model_cell1.fbgn"));
}

TEST(Runs, TamperedLogFailsVerify) {
  const auto dir = fresh_dir("tamper");
  ExperimentSpec spec = quick_spec(dir);
  spec.schemes = {Scheme::kMmseExhaustive};
  const auto bench = run_benchmark(spec);
  auto records = read_records(bench.log);
  records[1].wsr *= 1.0 + 1e-6;
  records[2].beams.data()[0] *= 2.0;
  const auto v = verify_records(records);
  EXPECT_EQ(v.failed, 2u);
}

TEST(Runs, MissingModelNamesFile) {
  const auto dir = fresh_dir("missing");
  const ExperimentSpec spec = quick_spec(dir);
  try {
    run_benchmark(spec);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("model_cell0.fbgn"), std::string::npos);
  }
}

TEST(Runs, SchedCsv) {
  const auto dir = fresh_dir("sched");
  const auto out = run_sched(quick_spec(dir));
  EXPECT_EQ(out.sweep.reports.size(), 5u);
  const auto& r1 = out.sweep.reports[0];
  const auto& r4 = out.sweep.reports[2];
  EXPECT_NEAR(static_cast<double>(r1.total_cycles), 392636.0, 0.05 * 392636.0);
  EXPECT_LE(static_cast<double>(r4.total_cycles), 1.03 * static_cast<double>(r1.total_cycles));
  EXPECT_DOUBLE_EQ(r1.total_ns, 10.0 * static_cast<double>(r1.total_cycles));
  EXPECT_TRUE(std::filesystem::exists(out.csv));
}
