#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fasbeam/gnn.hpp"
#include "fasbeam/network_config.hpp"
#include "fasbeam/sched.hpp"
#include "fasbeam/training.hpp"

namespace fasbeam::harness {

enum class Scheme {
  kGnnRandomMax,
  kGnnRandomSingle,
  kGnnExhaustive,
  kMmseExhaustive,
  kMrtExhaustive,
  kZfExhaustive,
};

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& name);
bool uses_gnn(Scheme s);
std::vector<Scheme> all_schemes();

// What the benchmark sweeps. kCellsTotalPower keeps the total transmit power
// fixed at the configured value and splits it evenly over the BSs.
enum class SweepVariable { kNone, kPowerDbm, kCells, kCellsTotalPower, kUes, kPorts };

const char* to_string(SweepVariable v);
SweepVariable parse_sweep(const std::string& name);

struct ExperimentSpec {
  std::string scenario = "default";
  NetworkConfig network;
  GnnPreset preset = GnnPreset::kDesk;
  std::vector<Scheme> schemes = all_schemes();
  std::size_t trials_random_max = 20;
  std::size_t trials_exhaustive = 100;
  SweepVariable sweep = SweepVariable::kNone;
  std::vector<double> sweep_values;
  std::size_t draws = 200;  // Monte-Carlo channel draws per sweep point
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  std::filesystem::path model_dir;  // empty: same as out
  bool log_outcomes = true;

  TrainSpec train;

  std::vector<std::size_t> rps_trials = {1, 20, 100, 500, 2000};
  std::size_t rps_draws = 100;

  AcceleratorConfig accel;
  std::vector<std::size_t> sched_tasks = {1, 2, 4, 8, 16};
  std::size_t sched_ues = 4;
  GnnPreset sched_preset = GnnPreset::kPaper;

  // Throws ConfigError.
  void validate() const;
  GnnDims dims() const { return make_dims(preset, network.fas_per_bs); }
  std::filesystem::path models() const { return model_dir.empty() ? out : model_dir; }
};

// Preset defaults layered under any file or flag settings.
void apply_preset(ExperimentSpec& spec, GnnPreset preset);

// Named sub-seeds of the master seed: derive_seed(master, name).
struct SubSeeds {
  std::uint64_t channel;
  std::uint64_t train;
  std::uint64_t rps;
};
SubSeeds sub_seeds(std::uint64_t master);

// Network at one sweep point.
NetworkConfig network_at(const ExperimentSpec& spec, double sweep_value);

std::filesystem::path model_path(const std::filesystem::path& dir, std::size_t cell);

}  // namespace fasbeam::harness
