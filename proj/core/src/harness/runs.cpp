#include "fasbeam/harness/runs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fasbeam/errors.hpp"
#include "fasbeam/harness/csv.hpp"
#include "fasbeam/harness/outcome_log.hpp"
#include "fasbeam/model_io.hpp"
#include "fasbeam/portsel.hpp"
#include "fasbeam/rng.hpp"

namespace fasbeam::harness {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw InputError("cannot open '" + path.string() + "' for writing");
  return f;
}

SelectionOutcome run_scheme(Scheme s, const ExperimentSpec& spec, const ChannelTensor& tensor,
                            const NetworkConfig& net, const Solver& gnn, std::uint64_t rps_seed) {
  auto exhaustive_like = [&](const Solver& solver) {
    if (selection_count(tensor) <= static_cast<double>(spec.trials_exhaustive))
      return exhaustive(tensor, net, solver);
    return rps_best_of(tensor, net, solver, spec.trials_exhaustive, rps_seed);
  };
  switch (s) {
    case Scheme::kGnnRandomMax:
      return rps_best_of(tensor, net, gnn, spec.trials_random_max, rps_seed);
    case Scheme::kGnnRandomSingle:
      return rps_single(tensor, net, gnn, rps_seed);
    case Scheme::kGnnExhaustive:
      return exhaustive_like(gnn);
    case Scheme::kMmseExhaustive:
      return exhaustive_like(mmse_solver(net));
    case Scheme::kMrtExhaustive:
      return exhaustive_like(mrt_solver(net));
    case Scheme::kZfExhaustive:
      return exhaustive_like(zf_solver(net));
  }
  throw InputError("unhandled scheme");
}

}  // namespace

TrainOutput run_train(const ExperimentSpec& spec, std::ostream* progress) {
  spec.validate();
  TrainSpec ts = spec.train;
  ts.seed = sub_seeds(spec.seed).train;
  if (progress) {
    ts.on_epoch = [progress, &spec](const EpochStats& e) {
      *progress << "epoch " << e.epoch << "/" << spec.train.epochs
                << "  train WSR " << format_double(e.train_wsr)
                << "  eval WSR " << format_double(e.eval_wsr) << '\n';
    };
  }
  TrainOutput out;
  out.result = train(spec.network, spec.dims(), ts);

  std::filesystem::create_directories(spec.models());
  for (const auto& p : out.result.params) {
    out.models.push_back(model_path(spec.models(), p.cell));
    save_params(p, out.models.back());
  }
  out.history_csv = spec.out / "train_history.csv";
  auto f = open_out(out.history_csv);
  CsvWriter csv(f);
  csv.row({"epoch", "train_wsr", "eval_wsr", "loss", "lr"});
  for (const auto& e : out.result.history)
    csv.row({std::to_string(e.epoch), format_double(e.train_wsr), format_double(e.eval_wsr),
             format_double(e.loss), format_double(e.lr)});
  return out;
}

GnnBeamformer load_beamformer(const ExperimentSpec& spec, const NetworkConfig& network) {
  const GnnDims dims = make_dims(spec.preset, network.fas_per_bs);
  std::vector<GnnParams> cells;
  for (std::size_t i = 0; i < network.num_cells; ++i) {
    const auto path = model_path(spec.models(), i);
    if (!std::filesystem::exists(path))
      throw InputError("missing model file '" + path.string() + "' for cell " +
                       std::to_string(i) + "; run 'fasbeam train' with at least " +
                       std::to_string(network.num_cells) + " cells first");
    cells.push_back(load_params(path, dims));
  }
  return GnnBeamformer(std::move(cells), network);
}

BenchmarkOutput run_benchmark(const ExperimentSpec& spec, std::ostream* progress) {
  spec.validate();
  const SubSeeds seeds = sub_seeds(spec.seed);
  const bool need_gnn = std::any_of(spec.schemes.begin(), spec.schemes.end(), uses_gnn);
  const std::vector<double> values =
      spec.sweep == SweepVariable::kNone ? std::vector<double>{0.0} : spec.sweep_values;

  BenchmarkOutput out;
  out.csv = spec.out / "benchmark.csv";
  auto f = open_out(out.csv);
  CsvWriter csv(f);
  csv.row({"sweep", "value", "scheme", "mean_wsr", "std_wsr", "draws"});
  if (spec.log_outcomes) {
    out.log = spec.out / "outcomes.jsonl";
    std::filesystem::remove(out.log);
  }

  for (double value : values) {
    const NetworkConfig net = network_at(spec, value);
    const auto corr = build_correlation(net.ports_per_fa, net.fa_length_wavelengths);
    std::optional<GnnBeamformer> model;
    if (need_gnn) model.emplace(load_beamformer(spec, net));
    const Solver gnn = model ? gnn_solver(*model) : Solver{};

    std::vector<std::vector<double>> wsr(spec.schemes.size());
    std::vector<OutcomeRecord> records;
    for (std::size_t d = 0; d < spec.draws; ++d) {
      const std::uint64_t channel_seed = derive_seed(seeds.channel, d);
      const ChannelTensor tensor = sample_channels(net, corr, channel_seed);
      const std::uint64_t rps_seed = derive_seed(seeds.rps, d);
      for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
        SelectionOutcome o = run_scheme(spec.schemes[s], spec, tensor, net, gnn, rps_seed);
        wsr[s].push_back(o.wsr);
        if (spec.log_outcomes)
          records.push_back({to_string(spec.schemes[s]), value, d, channel_seed, net,
                             std::move(o.selection), std::move(o.beams), o.wsr});
      }
    }
    if (spec.log_outcomes) append_records(out.log, records);

    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
      SchemeStats st;
      st.sweep_value = value;
      st.scheme = spec.schemes[s];
      st.draws = wsr[s].size();
      double acc = 0.0;
      for (double v : wsr[s]) acc += v;
      st.mean = acc / static_cast<double>(st.draws);
      double sq = 0.0;
      for (double v : wsr[s]) sq += (v - st.mean) * (v - st.mean);
      st.stddev = st.draws > 1 ? std::sqrt(sq / static_cast<double>(st.draws - 1)) : 0.0;
      csv.row({to_string(spec.sweep), format_double(value), to_string(st.scheme),
               format_double(st.mean), format_double(st.stddev), std::to_string(st.draws)});
      if (progress)
        *progress << to_string(spec.sweep) << '=' << format_double(value) << "  "
                  << to_string(st.scheme) << "  mean WSR " << format_double(st.mean) << '\n';
      out.stats.push_back(st);
    }
  }
  return out;
}

RpsOutput run_rps_distribution(const ExperimentSpec& spec, std::ostream* progress) {
  spec.validate();
  const SubSeeds seeds = sub_seeds(spec.seed);
  const NetworkConfig& net = spec.network;
  const auto corr = build_correlation(net.ports_per_fa, net.fa_length_wavelengths);
  const GnnBeamformer model = load_beamformer(spec, net);
  const Solver gnn = gnn_solver(model);
  const std::size_t t_max = *std::max_element(spec.rps_trials.begin(), spec.rps_trials.end());

  RpsOutput out;
  out.best.assign(spec.rps_trials.size(), std::vector<double>(spec.rps_draws));
  for (std::size_t d = 0; d < spec.rps_draws; ++d) {
    const ChannelTensor tensor = sample_channels(net, corr, derive_seed(seeds.channel, d));
    const auto wsrs = trial_wsrs(tensor, net, gnn, t_max, derive_seed(seeds.rps, d));
    std::vector<double> prefix_max(wsrs.size());
    for (std::size_t t = 0; t < wsrs.size(); ++t)
      prefix_max[t] = t == 0 ? wsrs[0] : std::max(prefix_max[t - 1], wsrs[t]);
    for (std::size_t i = 0; i < spec.rps_trials.size(); ++i)
      out.best[i][d] = prefix_max[spec.rps_trials[i] - 1];
    if (progress && (d + 1) % 10 == 0)
      *progress << "draw " << d + 1 << "/" << spec.rps_draws << '\n';
  }

  out.csv = spec.out / "rps_distribution.csv";
  auto f = open_out(out.csv);
  CsvWriter csv(f);
  csv.row({"T", "draw", "best_wsr"});
  for (std::size_t i = 0; i < spec.rps_trials.size(); ++i)
    for (std::size_t d = 0; d < spec.rps_draws; ++d)
      csv.row({std::to_string(spec.rps_trials[i]), std::to_string(d),
               format_double(out.best[i][d])});
  return out;
}

SchedOutput run_sched(const ExperimentSpec& spec, std::ostream* progress) {
  spec.validate();
  const GnnDims dims = make_dims(spec.sched_preset, spec.network.fas_per_bs);
  SchedOutput out;
  out.sweep = sweep_tasks(dims, spec.sched_ues, spec.accel, spec.sched_tasks);
  out.csv = spec.out / "sched.csv";
  auto f = open_out(out.csv);
  write_schedule_csv(f, out.sweep.reports, spec.accel);
  if (progress) {
    for (const auto& r : out.sweep.reports)
      *progress << "B=" << r.tasks << "  cycles " << r.total_cycles << "  ns "
                << format_double(r.total_ns) << "  " << to_string(r.bound)
                << (r.spill ? "  (spill)" : "") << '\n';
    if (out.sweep.flip_at)
      *progress << "bound flips to compute-bound at B=" << *out.sweep.flip_at << '\n';
  }
  return out;
}

}  // namespace fasbeam::harness
