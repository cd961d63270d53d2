#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fasbeam/channel.hpp"
#include "fasbeam/gnn.hpp"
#include "fasbeam/metrics.hpp"
#include "fasbeam/network_config.hpp"

namespace fasbeam {

// Maps effective channels to beams. `batch`, when set, must agree with
// `single` element-wise; it lets the GNN evaluate many selections at once.
struct Solver {
  std::string name;
  std::function<BeamformingSet(const EffectiveChannels&)> single;
  std::function<std::vector<BeamformingSet>(std::span<const EffectiveChannels>)> batch;

  std::vector<BeamformingSet> run(std::span<const EffectiveChannels> hs) const;
};

Solver mrt_solver(const NetworkConfig& cfg);
Solver zf_solver(const NetworkConfig& cfg);
Solver mmse_solver(const NetworkConfig& cfg);
// The beamformer is captured by reference and must outlive the solver.
Solver gnn_solver(const GnnBeamformer& model);

struct SelectionOutcome {
  PortSelection selection;
  double wsr = 0.0;
  BeamformingSet beams;
  std::size_t trial = 0;  // trial index, or enumeration index for exhaustive
};

// Selection used by trial t of a run seeded with `seed`. Trials nest: trial t
// is the same for every trial count.
PortSelection trial_selection(const ChannelTensor& tensor, std::uint64_t seed, std::size_t trial);

SelectionOutcome rps_single(const ChannelTensor& tensor, const NetworkConfig& cfg,
                            const Solver& solver, std::uint64_t seed);

// Best of `trials` uniform selections; ties keep the lowest trial index.
// Throws InputError if trials == 0.
SelectionOutcome rps_best_of(const ChannelTensor& tensor, const NetworkConfig& cfg,
                             const Solver& solver, std::size_t trials, std::uint64_t seed);

// WSR of each of the first `trials` nested trials.
std::vector<double> trial_wsrs(const ChannelTensor& tensor, const NetworkConfig& cfg,
                               const Solver& solver, std::size_t trials, std::uint64_t seed);

inline constexpr double kDefaultExhaustiveCap = 1e6;

// Number of selections, L^(num_bs * N), as a double so huge grids do not wrap.
double selection_count(const ChannelTensor& tensor);

// Visits every selection in lexicographic order of the flat (BS, FA) port
// list; ties keep the earliest. Throws SelectionError naming the count when
// it exceeds `cap`.
SelectionOutcome exhaustive(const ChannelTensor& tensor, const NetworkConfig& cfg,
                            const Solver& solver, double cap = kDefaultExhaustiveCap);

}  // namespace fasbeam
