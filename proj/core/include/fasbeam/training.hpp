#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fasbeam/adam.hpp"
#include "fasbeam/channel.hpp"
#include "fasbeam/gnn.hpp"
#include "fasbeam/network_config.hpp"

namespace fasbeam {

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_wsr = 0.0;  // mean over the epoch's samples, before each update
  double eval_wsr = 0.0;   // mean over the held-out set after the epoch
  double loss = 0.0;       // mean batch loss, equals -train_wsr
  double lr = 0.0;
};

struct TrainSpec {
  std::size_t epochs = 200;
  std::size_t samples_per_epoch = 500;
  std::size_t batch_size = 50;
  std::size_t eval_samples = 200;
  std::uint64_t seed = 1;
  ad::AdamOptions adam;
  std::function<void(const EpochStats&)> on_epoch;

  void validate() const;
};

struct TrainResult {
  std::vector<GnnParams> params;  // one per cell
  std::vector<EpochStats> history;
};

// `count` samples, each a fresh channel draw seen through an independent
// uniform port selection. Sample t uses sub-seeds derived from (seed, t).
std::vector<EffectiveChannels> generate_samples(const NetworkConfig& cfg,
                                                const CorrelationFactors& corr,
                                                std::size_t count, std::uint64_t seed);

// -(1/B) * sum over samples of the weighted sum rate, all cells' GNNs
// evaluated jointly so inter-cell interference enters the gradient.
ad::Tensor wsr_loss(const std::vector<GnnParams>& params, std::span<const EffectiveChannels> batch,
                    const NetworkConfig& cfg, double feature_scale);

// Mean weighted sum rate of the GNN beamformer over `samples`.
double mean_wsr(const GnnBeamformer& model, std::span<const EffectiveChannels> samples);

// Throws TrainingDiverged if a batch loss is not finite.
TrainResult train(const NetworkConfig& cfg, const GnnDims& dims, const TrainSpec& spec);

}  // namespace fasbeam
