#include "fasbeam/training.hpp"

#include <cmath>
#include <string>

#include "fasbeam/errors.hpp"
#include "fasbeam/metrics.hpp"
#include "fasbeam/rng.hpp"

namespace fasbeam {

void TrainSpec::validate() const {
  if (epochs == 0) throw ConfigError("training needs at least one epoch");
  if (samples_per_epoch == 0) throw ConfigError("samples_per_epoch must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (eval_samples == 0) throw ConfigError("eval_samples must be positive");
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
}

std::vector<EffectiveChannels> generate_samples(const NetworkConfig& cfg,
                                                const CorrelationFactors& corr,
                                                std::size_t count, std::uint64_t seed) {
  std::vector<EffectiveChannels> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const std::uint64_t s = derive_seed(seed, t);
    const ChannelTensor tensor = sample_channels(cfg, corr, derive_seed(s, 0));
    const PortSelection sel =
        random_selection(cfg.num_cells, cfg.fas_per_bs, cfg.ports_per_fa, derive_seed(s, 1));
    out.push_back(select_ports(tensor, sel));
  }
  return out;
}

ad::Tensor wsr_loss(const std::vector<GnnParams>& params, std::span<const EffectiveChannels> batch,
                    const NetworkConfig& cfg, double feature_scale) {
  if (batch.empty()) throw InputError("wsr_loss needs a non-empty batch");
  if (params.size() < cfg.num_cells) throw InputError("wsr_loss needs one GNN per cell");
  const UeLayout& layout = batch[0].layout();
  const std::size_t cells = cfg.num_cells;
  const std::size_t fas = cfg.fas_per_bs;
  const std::size_t users = layout.total();
  const std::size_t B = batch.size();
  const double power = cfg.tx_power_mw();
  const double noise = cfg.noise_mw();

  std::vector<ad::Tensor> received;
  received.reserve(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    const std::size_t ues = layout.num_ues(j);
    std::vector<double> stacked;
    stacked.reserve(B * ues * 2 * fas);
    ComplexMatrix h(B * users, fas);
    for (std::size_t b = 0; b < B; ++b) {
      if (!(batch[b].layout() == layout)) throw InputError("batch samples differ in UE layout");
      const FeatureMatrix f = make_features(batch[b], j, feature_scale);
      stacked.insert(stacked.end(), f.data().begin(), f.data().end());
      for (std::size_t i = 0; i < cells; ++i)
        for (std::size_t k = 0; k < layout.num_ues(i); ++k) {
          const auto v = batch[b].vec(i, k, j);
          std::copy(v.begin(), v.end(), h.row(b * users + layout.flat(i, k)).begin());
        }
    }
    const ad::Tensor w = gnn_forward_stacked(
        params[j], ad::Tensor::from(B * ues, 2 * fas, std::move(stacked)), ues, power);
    received.push_back(ad::square_magnitude_paired(ad::paired_conj_inner(w, h, ues, users)));
  }
  // Row (b, u), column v: power UE u receives from the beam of UE v.
  const ad::Tensor gains = ad::concat_cols(received);
  const ad::Tensor total = ad::row_sum(gains);
  std::vector<std::size_t> own(B * users);
  std::vector<double> weights(B * users);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < cells; ++i)
      for (std::size_t k = 0; k < layout.num_ues(i); ++k) {
        const std::size_t u = layout.flat(i, k);
        own[b * users + u] = u;
        weights[b * users + u] = cfg.weight(i, k);
      }
  const ad::Tensor signal = ad::select_per_row(gains, own);
  const ad::Tensor rate = ad::sub(ad::log2(ad::add_scalar(total, noise)),
                                  ad::log2(ad::add_scalar(ad::sub(total, signal), noise)));
  const ad::Tensor weighted = ad::mul(rate, ad::Tensor::from(B * users, 1, std::move(weights)));
  return ad::scale(ad::sum(weighted), -1.0 / static_cast<double>(B));
}

double mean_wsr(const GnnBeamformer& model, std::span<const EffectiveChannels> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& h : samples) acc += compute_rates(h, model(h), model.config()).wsr;
  return acc / static_cast<double>(samples.size());
}

TrainResult train(const NetworkConfig& cfg, const GnnDims& dims, const TrainSpec& spec) {
  cfg.validate();
  dims.validate();
  spec.validate();
  if (dims.num_fas != cfg.fas_per_bs)
    throw ConfigError("GNN dims are for N = " + std::to_string(dims.num_fas) +
                      " but the network has N = " + std::to_string(cfg.fas_per_bs));

  const CorrelationFactors corr = build_correlation(cfg.ports_per_fa, cfg.fa_length_wavelengths);
  const double feature_scale = input_scale(cfg);
  const std::uint64_t init_seed = derive_seed(spec.seed, "init");
  const std::uint64_t train_seed = derive_seed(spec.seed, "train");
  const std::uint64_t eval_seed = derive_seed(spec.seed, "eval");

  TrainResult result;
  std::vector<ad::Tensor> all;
  for (std::size_t i = 0; i < cfg.num_cells; ++i) {
    result.params.push_back(GnnParams::init(dims, i, derive_seed(init_seed, i)));
    result.params.back().set_requires_grad(true);
    for (const auto& t : result.params.back().tensors()) all.push_back(t);
  }
  ad::Adam adam(all, spec.adam);
  const auto eval_set = generate_samples(cfg, corr, spec.eval_samples, eval_seed);

  for (std::size_t epoch = 1; epoch <= spec.epochs; ++epoch) {
    const auto samples =
        generate_samples(cfg, corr, spec.samples_per_epoch, derive_seed(train_seed, epoch));
    double loss_acc = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < samples.size(); start += spec.batch_size) {
      const std::size_t n = std::min(spec.batch_size, samples.size() - start);
      const std::span<const EffectiveChannels> batch(samples.data() + start, n);
      adam.zero_grad();
      const ad::Tensor loss = wsr_loss(result.params, batch, cfg, feature_scale);
      const double value = loss.item();
      if (!std::isfinite(value))
        throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                               ", batch starting at sample " + std::to_string(start) +
                               ": loss = " + std::to_string(value) +
                               ", lr = " + std::to_string(adam.lr()));
      ad::backward(loss);
      adam.step();
      loss_acc += value * static_cast<double>(n);
      seen += n;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_acc / static_cast<double>(seen);
    stats.train_wsr = -stats.loss;
    {
      ad::NoGradGuard no_grad;
      double eval_acc = 0.0;
      for (std::size_t start = 0; start < eval_set.size(); start += spec.batch_size) {
        const std::size_t n = std::min(spec.batch_size, eval_set.size() - start);
        eval_acc += -wsr_loss(result.params, {eval_set.data() + start, n}, cfg, feature_scale)
                         .item() *
                    static_cast<double>(n);
      }
      stats.eval_wsr = eval_acc / static_cast<double>(eval_set.size());
    }
    stats.lr = adam.lr();
    result.history.push_back(stats);
    if (spec.on_epoch) spec.on_epoch(stats);
  }
  for (auto& p : result.params) p.set_requires_grad(false);
  return result;
}

}  // namespace fasbeam
