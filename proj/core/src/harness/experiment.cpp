#include "fasbeam/harness/experiment.hpp"

#include <cmath>

#include "fasbeam/errors.hpp"
#include "fasbeam/rng.hpp"

namespace fasbeam::harness {

namespace {

struct SchemeName {
  Scheme scheme;
  const char* name;
};

constexpr SchemeName kSchemes[] = {
    {Scheme::kGnnRandomMax, "GNN-RandomMax"},     {Scheme::kGnnRandomSingle, "GNN-RandomSingle"},
    {Scheme::kGnnExhaustive, "GNN-Exhaustive"},   {Scheme::kMmseExhaustive, "MMSE-Exhaustive"},
    {Scheme::kMrtExhaustive, "MRT-Exhaustive"},   {Scheme::kZfExhaustive, "ZF-Exhaustive"},
};

struct SweepName {
  SweepVariable v;
  const char* name;
};

constexpr SweepName kSweeps[] = {
    {SweepVariable::kNone, "none"},  {SweepVariable::kPowerDbm, "power_dbm"},
    {SweepVariable::kCells, "cells"}, {SweepVariable::kCellsTotalPower, "cells_total_power"},
    {SweepVariable::kUes, "ues"},     {SweepVariable::kPorts, "ports"},
};

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e6)
    throw ConfigError(std::string(what) + " sweep values must be positive integers");
  return static_cast<std::size_t>(v);
}

}  // namespace

const char* to_string(Scheme s) {
  for (const auto& e : kSchemes)
    if (e.scheme == s) return e.name;
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  for (const auto& e : kSchemes)
    if (name == e.name) return e.scheme;
  throw ConfigError("unknown scheme '" + name + "'");
}

bool uses_gnn(Scheme s) {
  return s == Scheme::kGnnRandomMax || s == Scheme::kGnnRandomSingle ||
         s == Scheme::kGnnExhaustive;
}

std::vector<Scheme> all_schemes() {
  std::vector<Scheme> out;
  for (const auto& e : kSchemes) out.push_back(e.scheme);
  return out;
}

const char* to_string(SweepVariable v) {
  for (const auto& e : kSweeps)
    if (e.v == v) return e.name;
  return "?";
}

SweepVariable parse_sweep(const std::string& name) {
  for (const auto& e : kSweeps)
    if (name == e.name) return e.v;
  throw ConfigError("unknown sweep variable '" + name +
                    "' (expected none, power_dbm, cells, cells_total_power, ues or ports)");
}

void ExperimentSpec::validate() const {
  network.validate();
  train.validate();
  accel.validate();
  if (schemes.empty()) throw ConfigError("at least one scheme is required");
  if (draws == 0) throw ConfigError("draws must be at least 1");
  if (trials_random_max == 0 || trials_exhaustive == 0)
    throw ConfigError("trial counts must be at least 1");
  if (sweep != SweepVariable::kNone && sweep_values.empty())
    throw ConfigError(std::string("sweep '") + to_string(sweep) + "' needs sweep_values");
  if (rps_trials.empty()) throw ConfigError("rps.trials must list at least one trial count");
  for (std::size_t t : rps_trials)
    if (t == 0) throw ConfigError("rps.trials entries must be positive");
  if (rps_draws == 0) throw ConfigError("rps.draws must be at least 1");
  if (sched_tasks.empty()) throw ConfigError("sched.tasks must list at least one task count");
  for (std::size_t b : sched_tasks)
    if (b == 0) throw ConfigError("sched.tasks entries must be positive");
  if (sched_ues == 0) throw ConfigError("sched.ues must be positive");
  for (double v : sweep_values) network_at(*this, v).validate();
}

void apply_preset(ExperimentSpec& spec, GnnPreset preset) {
  spec.preset = preset;
  if (preset == GnnPreset::kPaper) {
    spec.train.samples_per_epoch = 10000;
    spec.train.batch_size = 200;
    spec.train.eval_samples = 2000;
    spec.trials_exhaustive = 500;
  } else {
    spec.train.samples_per_epoch = 500;
    spec.train.batch_size = 50;
    spec.train.eval_samples = 200;
    spec.trials_exhaustive = 100;
  }
}

SubSeeds sub_seeds(std::uint64_t master) {
  return {derive_seed(master, "channel"), derive_seed(master, "train"),
          derive_seed(master, "rps")};
}

NetworkConfig network_at(const ExperimentSpec& spec, double v) {
  NetworkConfig n = spec.network;
  switch (spec.sweep) {
    case SweepVariable::kNone:
      break;
    case SweepVariable::kPowerDbm:
      n.tx_power_dbm = v;
      break;
    case SweepVariable::kCells:
    case SweepVariable::kCellsTotalPower: {
      const std::size_t cells = as_count(v, "cell");
      const std::size_t ues = spec.network.ues_per_cell.at(0);
      n.num_cells = cells;
      n.ues_per_cell.assign(cells, ues);
      n.rate_weights.clear();
      if (spec.sweep == SweepVariable::kCellsTotalPower)
        n.tx_power_dbm = spec.network.tx_power_dbm - 10.0 * std::log10(static_cast<double>(cells));
      break;
    }
    case SweepVariable::kUes:
      n.ues_per_cell.assign(n.num_cells, as_count(v, "UE"));
      n.rate_weights.clear();
      break;
    case SweepVariable::kPorts:
      n.ports_per_fa = as_count(v, "port");
      break;
  }
  return n;
}

std::filesystem::path model_path(const std::filesystem::path& dir, std::size_t cell) {
  return dir / ("model_cell" + std::to_string(cell) + ".fbgn");
}

}  // namespace fasbeam::harness
