#include "fasbeam/gnn.hpp"

#include <cmath>

#include "fasbeam/errors.hpp"
#include "fasbeam/rng.hpp"

namespace fasbeam {

namespace {

enum LayerIndex : std::size_t {
  kMlpIn = 0,
  kMlp1 = 2,
  kMlp2 = 4,
  kMlp3 = 6,
  kMlp4 = 8,
  kFc = 10,
  kLayerCount = 11,
};

ad::Tensor linear(const GnnParams& p, std::size_t layer, const ad::Tensor& x, bool activate) {
  const Linear& l = p.layers[layer];
  ad::Tensor y = ad::add_bias(ad::matmul(x, l.weight), l.bias);
  return activate ? ad::relu(y) : y;
}

// Two fully connected layers, both followed by ReLU.
ad::Tensor mlp(const GnnParams& p, std::size_t first, const ad::Tensor& x) {
  return linear(p, first + 1, linear(p, first, x, true), true);
}

ad::Tensor gnn_layer_per_ue(const GnnParams& p, std::size_t aggregate, std::size_t combine,
                            const ad::Tensor& x) {
  const std::size_t ues = x.rows();
  const std::size_t pooled_width = p.layers[aggregate + 1].weight.cols();
  std::vector<ad::Tensor> rows;
  rows.reserve(ues);
  for (std::size_t k = 0; k < ues; ++k) {
    ad::Tensor pooled;
    if (ues == 1) {
      pooled = ad::Tensor(1, pooled_width);
    } else {
      std::vector<std::size_t> others;
      for (std::size_t q = 0; q < ues; ++q)
        if (q != k) others.push_back(q);
      pooled = ad::column_max(mlp(p, aggregate, ad::gather_rows(x, others)));
    }
    const std::size_t self[] = {k};
    const ad::Tensor parts[] = {ad::gather_rows(x, self), pooled};
    rows.push_back(mlp(p, combine, ad::concat_cols(parts)));
  }
  return ad::concat_rows(rows);
}

ad::Tensor gnn_layer_stacked(const GnnParams& p, std::size_t aggregate, std::size_t combine,
                             const ad::Tensor& x, std::size_t ues) {
  const ad::Tensor pooled = ad::group_exclusive_max(mlp(p, aggregate, x), ues);
  const ad::Tensor parts[] = {x, pooled};
  return mlp(p, combine, ad::concat_cols(parts));
}

void check_params(const GnnParams& p) {
  if (p.layers.size() != kLayerCount)
    throw InputError("GNN parameters have " + std::to_string(p.layers.size()) +
                     " layers, expected 11");
}

void check_input(const GnnParams& p, std::size_t rows, std::size_t cols) {
  if (rows == 0) throw InputError("GNN input has no UE rows");
  if (cols != p.dims.input_dim())
    throw InputError("GNN input has " + std::to_string(cols) + " columns, model expects " +
                     std::to_string(p.dims.input_dim()));
}

std::vector<std::size_t> triple(std::size_t a, std::size_t b, std::size_t c) { return {a, b, c}; }

}  // namespace

GnnDims GnnDims::scaled(std::size_t num_fas, std::size_t wide, std::size_t narrow) {
  GnnDims d;
  d.num_fas = num_fas;
  d.mlp_in = triple(2 * num_fas, wide, narrow);
  d.mlp1 = triple(narrow, narrow, narrow);
  d.mlp2 = triple(2 * narrow, narrow, narrow);
  d.mlp3 = triple(narrow, narrow, narrow);
  d.mlp4 = triple(2 * narrow, narrow, narrow);
  return d;
}

GnnDims GnnDims::paper(std::size_t num_fas) { return scaled(num_fas, 1024, 512); }
GnnDims GnnDims::desk(std::size_t num_fas) { return scaled(num_fas, 64, 32); }

GnnDims make_dims(GnnPreset preset, std::size_t num_fas) {
  return preset == GnnPreset::kPaper ? GnnDims::paper(num_fas) : GnnDims::desk(num_fas);
}

GnnPreset parse_preset(const std::string& name) {
  if (name == "paper") return GnnPreset::kPaper;
  if (name == "desk") return GnnPreset::kDesk;
  throw ConfigError("unknown preset '" + name + "' (expected paper or desk)");
}

std::vector<std::pair<std::size_t, std::size_t>> GnnDims::layer_shapes() const {
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  for (const auto* m : {&mlp_in, &mlp1, &mlp2, &mlp3, &mlp4}) {
    if (m->size() != 3) throw ConfigError("every GNN MLP needs exactly three widths");
    shapes.emplace_back((*m)[0], (*m)[1]);
    shapes.emplace_back((*m)[1], (*m)[2]);
  }
  shapes.emplace_back(mlp4.at(2), 2 * num_fas);
  return shapes;
}

std::size_t GnnDims::weight_count() const {
  std::size_t n = 0;
  for (auto [in, out] : layer_shapes()) n += in * out;
  return n;
}

std::size_t GnnDims::bias_count() const {
  std::size_t n = 0;
  for (auto [in, out] : layer_shapes()) n += out;
  return n;
}

void GnnDims::validate() const {
  if (num_fas == 0) throw ConfigError("GNN needs at least one FA");
  layer_shapes();
  for (const auto* m : {&mlp_in, &mlp1, &mlp2, &mlp3, &mlp4})
    for (std::size_t w : *m)
      if (w == 0) throw ConfigError("GNN layer widths must be positive");
  if (mlp_in[0] != 2 * num_fas) throw ConfigError("input MLP must take 2N features");
  if (mlp1[0] != mlp_in[2]) throw ConfigError("aggregation MLP 1 input must match input MLP output");
  if (mlp2[0] != mlp_in[2] + mlp1[2])
    throw ConfigError("combination MLP 2 input must be own row + pooled row");
  if (mlp3[0] != mlp2[2]) throw ConfigError("aggregation MLP 3 input must match MLP 2 output");
  if (mlp4[0] != mlp2[2] + mlp3[2])
    throw ConfigError("combination MLP 4 input must be own row + pooled row");
}

GnnParams GnnParams::init(const GnnDims& dims, std::size_t cell, std::uint64_t seed) {
  dims.validate();
  GnnParams p;
  p.cell = cell;
  p.dims = dims;
  Rng rng(seed);
  for (auto [in, out] : dims.layer_shapes()) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    std::vector<double> w(in * out);
    for (double& v : w) v = rng.uniform(-bound, bound);
    p.layers.push_back({ad::Tensor::from(in, out, std::move(w)), ad::Tensor(1, out)});
  }
  return p;
}

std::vector<ad::Tensor> GnnParams::tensors() const {
  std::vector<ad::Tensor> out;
  for (const Linear& l : layers) {
    out.push_back(l.weight);
    out.push_back(l.bias);
  }
  return out;
}

void GnnParams::set_requires_grad(bool on) {
  for (Linear& l : layers) {
    l.weight.set_requires_grad(on);
    l.bias.set_requires_grad(on);
  }
}

GnnParams GnnParams::clone() const {
  GnnParams p;
  p.cell = cell;
  p.dims = dims;
  for (const Linear& l : layers) p.layers.push_back({l.weight.detach(), l.bias.detach()});
  return p;
}

FeatureMatrix make_features(const EffectiveChannels& h, std::size_t cell, double scale) {
  const std::size_t ues = h.layout().num_ues(cell);
  const std::size_t fas = h.fas();
  FeatureMatrix x(ues, 2 * fas);
  for (std::size_t k = 0; k < ues; ++k) {
    const auto v = h.vec(cell, k, cell);
    for (std::size_t n = 0; n < fas; ++n) {
      x(k, n) = scale * v[n].real();
      x(k, fas + n) = scale * v[n].imag();
    }
  }
  return x;
}

double input_scale(const NetworkConfig& cfg) {
  const double mid = 0.5 * (cfg.ue_distance_range.min_m + cfg.ue_distance_range.max_m);
  return 1.0 / std::sqrt(db_to_linear(pathloss_db(mid, cfg)));
}

ad::Tensor gnn_forward(const GnnParams& params, const ad::Tensor& x_in, double power_mw) {
  check_params(params);
  check_input(params, x_in.rows(), x_in.cols());
  const ad::Tensor x1 = mlp(params, kMlpIn, x_in);
  const ad::Tensor x4 = gnn_layer_per_ue(params, kMlp1, kMlp2, x1);
  const ad::Tensor x7 = gnn_layer_per_ue(params, kMlp3, kMlp4, x4);
  const ad::Tensor x8 = linear(params, kFc, x7, false);
  return ad::frobenius_normalize_scale(x8, std::sqrt(power_mw));
}

RealMatrix gnn_forward(const GnnParams& params, const FeatureMatrix& x_in, double power_mw) {
  ad::NoGradGuard no_grad;
  return gnn_forward(params, ad::Tensor::from(x_in), power_mw).to_matrix();
}

ad::Tensor gnn_forward_stacked(const GnnParams& params, const ad::Tensor& stacked,
                               std::size_t ues, double power_mw) {
  check_params(params);
  check_input(params, stacked.rows(), stacked.cols());
  if (ues == 0 || stacked.rows() % ues != 0)
    throw InputError("stacked GNN input rows are not a multiple of the UE count");
  const ad::Tensor x1 = mlp(params, kMlpIn, stacked);
  const ad::Tensor x4 = gnn_layer_stacked(params, kMlp1, kMlp2, x1, ues);
  const ad::Tensor x7 = gnn_layer_stacked(params, kMlp3, kMlp4, x4, ues);
  const ad::Tensor x8 = linear(params, kFc, x7, false);
  return ad::frobenius_normalize_scale(x8, std::sqrt(power_mw), ues);
}

std::vector<RealMatrix> gnn_forward_batched(const GnnParams& params,
                                            std::span<const FeatureMatrix> inputs,
                                            double power_mw) {
  if (inputs.empty()) throw InputError("gnn_forward_batched needs at least one selection");
  const std::size_t ues = inputs[0].rows();
  const std::size_t cols = inputs[0].cols();
  std::vector<double> stacked;
  stacked.reserve(inputs.size() * ues * cols);
  for (const FeatureMatrix& x : inputs) {
    if (x.rows() != ues || x.cols() != cols)
      throw InputError("all selections must share the UE count and feature width");
    stacked.insert(stacked.end(), x.data().begin(), x.data().end());
  }
  ad::NoGradGuard no_grad;
  const ad::Tensor y = gnn_forward_stacked(
      params, ad::Tensor::from(inputs.size() * ues, cols, std::move(stacked)), ues, power_mw);
  std::vector<RealMatrix> out;
  out.reserve(inputs.size());
  const auto data = y.data();
  for (std::size_t b = 0; b < inputs.size(); ++b) {
    RealMatrix m(ues, cols);
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(b * ues * cols), ues * cols,
                m.data().begin());
    out.push_back(std::move(m));
  }
  return out;
}

void write_beams(const RealMatrix& out, std::size_t cell, BeamformingSet& beams) {
  const std::size_t fas = beams.fas();
  if (out.rows() != beams.layout().num_ues(cell) || out.cols() != 2 * fas)
    throw InputError("GNN output shape does not match the beamforming set");
  for (std::size_t k = 0; k < out.rows(); ++k)
    for (std::size_t n = 0; n < fas; ++n) beams.at(cell, k, n) = {out(k, n), out(k, fas + n)};
}

GnnBeamformer::GnnBeamformer(std::vector<GnnParams> cells, NetworkConfig cfg)
    : cells_(std::move(cells)), cfg_(std::move(cfg)), scale_(input_scale(cfg_)) {
  cfg_.validate();
  if (cells_.size() < cfg_.num_cells)
    throw ConfigError("network has " + std::to_string(cfg_.num_cells) + " cells but only " +
                      std::to_string(cells_.size()) + " GNN models were provided");
  for (const GnnParams& p : cells_)
    if (p.dims.num_fas != cfg_.fas_per_bs)
      throw ConfigError("GNN model built for N = " + std::to_string(p.dims.num_fas) +
                        " FAs, network has N = " + std::to_string(cfg_.fas_per_bs));
}

BeamformingSet GnnBeamformer::operator()(const EffectiveChannels& h) const {
  return std::move(batch(std::span<const EffectiveChannels>(&h, 1)).front());
}

std::vector<BeamformingSet> GnnBeamformer::batch(std::span<const EffectiveChannels> hs) const {
  std::vector<BeamformingSet> out;
  out.reserve(hs.size());
  for (const auto& h : hs) out.emplace_back(h.layout(), h.fas());
  if (hs.empty()) return out;
  const double power = cfg_.tx_power_mw();
  std::vector<FeatureMatrix> features(hs.size());
  for (std::size_t i = 0; i < cfg_.num_cells; ++i) {
    for (std::size_t b = 0; b < hs.size(); ++b) features[b] = make_features(hs[b], i, scale_);
    const auto beams = gnn_forward_batched(cells_[i], features, power);
    for (std::size_t b = 0; b < hs.size(); ++b) write_beams(beams[b], i, out[b]);
  }
  return out;
}

}  // namespace fasbeam
