#include "fasbeam/portsel.hpp"

#include <cmath>
#include <cstdio>

#include "fasbeam/baselines.hpp"
#include "fasbeam/errors.hpp"
#include "fasbeam/rng.hpp"

namespace fasbeam {

namespace {

constexpr std::size_t kChunk = 128;

// Evaluates `selections` in chunks and keeps the first strict maximum.
class BestTracker {
 public:
  BestTracker(const ChannelTensor& tensor, const NetworkConfig& cfg, const Solver& solver)
      : tensor_(tensor), cfg_(cfg), solver_(solver) {}

  void add(PortSelection sel) {
    pending_.push_back(std::move(sel));
    if (pending_.size() == kChunk) flush();
  }

  void flush() {
    if (pending_.empty()) return;
    std::vector<EffectiveChannels> hs;
    hs.reserve(pending_.size());
    for (const auto& s : pending_) hs.push_back(select_ports(tensor_, s));
    auto beams = solver_.run(hs);
    for (std::size_t n = 0; n < pending_.size(); ++n) {
      const double wsr = compute_rates(hs[n], beams[n], cfg_).wsr;
      wsrs_.push_back(wsr);
      if (!have_ || wsr > best_.wsr) {
        have_ = true;
        best_ = {std::move(pending_[n]), wsr, std::move(beams[n]), index_};
      }
      ++index_;
    }
    pending_.clear();
  }

  SelectionOutcome take() {
    flush();
    return std::move(best_);
  }
  std::vector<double> take_wsrs() {
    flush();
    return std::move(wsrs_);
  }

 private:
  const ChannelTensor& tensor_;
  const NetworkConfig& cfg_;
  const Solver& solver_;
  std::vector<PortSelection> pending_;
  std::vector<double> wsrs_;
  SelectionOutcome best_;
  bool have_ = false;
  std::size_t index_ = 0;
};

}  // namespace

std::vector<BeamformingSet> Solver::run(std::span<const EffectiveChannels> hs) const {
  if (batch) return batch(hs);
  std::vector<BeamformingSet> out;
  out.reserve(hs.size());
  for (const auto& h : hs) out.push_back(single(h));
  return out;
}

Solver mrt_solver(const NetworkConfig& cfg) {
  return {"MRT", [cfg](const EffectiveChannels& h) { return mrt(h, cfg); }, {}};
}

Solver zf_solver(const NetworkConfig& cfg) {
  return {"ZF", [cfg](const EffectiveChannels& h) { return zf(h, cfg).beams; }, {}};
}

Solver mmse_solver(const NetworkConfig& cfg) {
  return {"MMSE", [cfg](const EffectiveChannels& h) { return mmse(h, cfg); }, {}};
}

Solver gnn_solver(const GnnBeamformer& model) {
  return {"GNN", [&model](const EffectiveChannels& h) { return model(h); },
          [&model](std::span<const EffectiveChannels> hs) { return model.batch(hs); }};
}

PortSelection trial_selection(const ChannelTensor& tensor, std::uint64_t seed, std::size_t trial) {
  return random_selection(tensor.num_bs(), tensor.fas(), tensor.ports(), derive_seed(seed, trial));
}

SelectionOutcome rps_single(const ChannelTensor& tensor, const NetworkConfig& cfg,
                            const Solver& solver, std::uint64_t seed) {
  return rps_best_of(tensor, cfg, solver, 1, seed);
}

SelectionOutcome rps_best_of(const ChannelTensor& tensor, const NetworkConfig& cfg,
                             const Solver& solver, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InputError("best-of-T needs at least one trial");
  BestTracker best(tensor, cfg, solver);
  for (std::size_t t = 0; t < trials; ++t) best.add(trial_selection(tensor, seed, t));
  return best.take();
}

std::vector<double> trial_wsrs(const ChannelTensor& tensor, const NetworkConfig& cfg,
                               const Solver& solver, std::size_t trials, std::uint64_t seed) {
  BestTracker best(tensor, cfg, solver);
  for (std::size_t t = 0; t < trials; ++t) best.add(trial_selection(tensor, seed, t));
  return best.take_wsrs();
}

double selection_count(const ChannelTensor& tensor) {
  return std::pow(static_cast<double>(tensor.ports()),
                  static_cast<double>(tensor.num_bs() * tensor.fas()));
}

SelectionOutcome exhaustive(const ChannelTensor& tensor, const NetworkConfig& cfg,
                            const Solver& solver, double cap) {
  const double count = selection_count(tensor);
  if (count > cap) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "exhaustive search over %.6g port selections exceeds the cap of %.6g", count,
                  cap);
    throw SelectionError(buf);
  }
  BestTracker best(tensor, cfg, solver);
  PortSelection sel(tensor.num_bs(), tensor.fas());
  auto ports = sel.flat();
  for (;;) {
    best.add(sel);
    // Odometer step, last position fastest.
    std::size_t pos = ports.size();
    while (pos > 0 && ++ports[pos - 1] == tensor.ports()) ports[--pos] = 0;
    if (pos == 0) break;
  }
  return best.take();
}

}  // namespace fasbeam
