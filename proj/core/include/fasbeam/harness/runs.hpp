#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "fasbeam/harness/experiment.hpp"
#include "fasbeam/sched.hpp"
#include "fasbeam/training.hpp"

namespace fasbeam::harness {

struct TrainOutput {
  TrainResult result;
  std::vector<std::filesystem::path> models;
  std::filesystem::path history_csv;
};

// Writes model_cell<i>.fbgn per cell and train_history.csv into spec.models()
// and spec.out.
TrainOutput run_train(const ExperimentSpec& spec, std::ostream* progress = nullptr);

// Loads one model per cell of `network`; throws InputError naming a missing file.
GnnBeamformer load_beamformer(const ExperimentSpec& spec, const NetworkConfig& network);

struct SchemeStats {
  double sweep_value = 0.0;
  Scheme scheme{};
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t draws = 0;
};

struct BenchmarkOutput {
  std::vector<SchemeStats> stats;
  std::filesystem::path csv;
  std::filesystem::path log;  // empty unless spec.log_outcomes
};

// benchmark.csv: sweep,value,scheme,mean_wsr,std_wsr,draws
BenchmarkOutput run_benchmark(const ExperimentSpec& spec, std::ostream* progress = nullptr);

struct RpsOutput {
  // best[t][d]: best WSR over the first spec.rps_trials[t] trials of draw d.
  std::vector<std::vector<double>> best;
  std::filesystem::path csv;
};

// rps_distribution.csv: T,draw,best_wsr
RpsOutput run_rps_distribution(const ExperimentSpec& spec, std::ostream* progress = nullptr);

struct SchedOutput {
  SweepResult sweep;
  std::filesystem::path csv;
};

// sched.csv: see write_schedule_csv.
SchedOutput run_sched(const ExperimentSpec& spec, std::ostream* progress = nullptr);

}  // namespace fasbeam::harness
