#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fasbeam/autodiff.hpp"
#include "fasbeam/channel.hpp"
#include "fasbeam/linalg.hpp"
#include "fasbeam/metrics.hpp"
#include "fasbeam/network_config.hpp"

namespace fasbeam {

// Layer widths of one per-cell GNN: an input MLP, two GNN layers (each an
// aggregation MLP feeding a neighbour max-pool and a combination MLP fed by
// [own row | pooled row]) and a linear output layer back to 2N features.
struct GnnDims {
  std::size_t num_fas = 4;
  std::vector<std::size_t> mlp_in;  // {2N, hidden, out}
  std::vector<std::size_t> mlp1;    // aggregation MLP of GNN layer 1
  std::vector<std::size_t> mlp2;    // combination MLP of GNN layer 1
  std::vector<std::size_t> mlp3;    // aggregation MLP of GNN layer 2
  std::vector<std::size_t> mlp4;    // combination MLP of GNN layer 2

  // 2N x 1024 x 512, GNN layers 512 x 512 x 512 / 1024 x 512 x 512, FC 512 x 2N.
  static GnnDims paper(std::size_t num_fas);
  // Same topology with 1024 -> 64 and 512 -> 32.
  static GnnDims desk(std::size_t num_fas);
  static GnnDims scaled(std::size_t num_fas, std::size_t wide, std::size_t narrow);

  std::size_t input_dim() const { return 2 * num_fas; }
  // (fan_in, fan_out) of the 11 linear layers in evaluation order: mlp_in x2,
  // mlp1 x2, mlp2 x2, mlp3 x2, mlp4 x2, fc.
  std::vector<std::pair<std::size_t, std::size_t>> layer_shapes() const;
  std::size_t weight_count() const;
  std::size_t bias_count() const;
  std::size_t parameter_count() const { return weight_count() + bias_count(); }

  // Throws ConfigError if the widths do not chain.
  void validate() const;
  bool operator==(const GnnDims&) const = default;
};

enum class GnnPreset { kPaper, kDesk };
GnnDims make_dims(GnnPreset preset, std::size_t num_fas);
GnnPreset parse_preset(const std::string& name);

struct Linear {
  ad::Tensor weight;  // fan_in x fan_out
  ad::Tensor bias;    // 1 x fan_out
};

struct GnnParams {
  std::size_t cell = 0;
  GnnDims dims;
  std::vector<Linear> layers;  // layer_shapes() order

  // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static GnnParams init(const GnnDims& dims, std::size_t cell, std::uint64_t seed);

  // weight0, bias0, weight1, bias1, ...
  std::vector<ad::Tensor> tensors() const;
  void set_requires_grad(bool on);
  GnnParams clone() const;
};

// K_i x 2N rows [Re h_{ik,i} | Im h_{ik,i}] * scale.
using FeatureMatrix = RealMatrix;

FeatureMatrix make_features(const EffectiveChannels& h, std::size_t cell, double scale = 1.0);

// Amplitude normalisation for GNN inputs: inverse amplitude path loss at the
// midpoint of the UE distance range, so features are O(1).
double input_scale(const NetworkConfig& cfg);

// Literal per-UE evaluation: for every UE k, the aggregation MLP runs on the
// other rows, their column-wise max is concatenated to row k and passed
// through the combination MLP; output sqrt(P) * X / ||X||_F.
RealMatrix gnn_forward(const GnnParams& params, const FeatureMatrix& x_in, double power_mw);
ad::Tensor gnn_forward(const GnnParams& params, const ad::Tensor& x_in, double power_mw);

// Multi-selection evaluation: the B inputs are stacked, each MLP runs once on
// the stacked matrix, and pooling/normalisation stay per selection.
// Matches gnn_forward per input. Throws InputError on an empty list or
// inconsistent shapes.
std::vector<RealMatrix> gnn_forward_batched(const GnnParams& params,
                                            std::span<const FeatureMatrix> inputs,
                                            double power_mw);
// Stacked tensor form: `stacked` holds groups of `ues` consecutive rows.
ad::Tensor gnn_forward_stacked(const GnnParams& params, const ad::Tensor& stacked,
                               std::size_t ues, double power_mw);

// Writes rows [Re w | Im w] of `out` into the beams of `cell`.
void write_beams(const RealMatrix& out, std::size_t cell, BeamformingSet& beams);

// One GNN per cell, each seeing only its own serving-cell channels.
class GnnBeamformer {
 public:
  GnnBeamformer(std::vector<GnnParams> cells, NetworkConfig cfg);

  BeamformingSet operator()(const EffectiveChannels& h) const;
  // Evaluates many port selections of the same network with the stacked path.
  std::vector<BeamformingSet> batch(std::span<const EffectiveChannels> hs) const;

  const std::vector<GnnParams>& cells() const { return cells_; }
  const NetworkConfig& config() const { return cfg_; }

 private:
  std::vector<GnnParams> cells_;
  NetworkConfig cfg_;
  double scale_;
};

}  // namespace fasbeam
