#include <gtest/gtest.h>

#include <cmath>

#include "fasbeam/errors.hpp"
#include "fasbeam/gnn.hpp"
#include "test_util.hpp"

using namespace fasbeam;
using fasbeam::testutil::random_features;
using fasbeam::testutil::random_params;

namespace {

double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double frob2(const RealMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return s;
}

const GnnDims kSmall = GnnDims::scaled(3, 16, 8);

}  // namespace

TEST(GnnDims, PaperParameterCounts) {
  const GnnDims d = GnnDims::paper(4);
  EXPECT_EQ(d.weight_count(), 3158016u);
  EXPECT_EQ(d.bias_count(), 5640u);
  EXPECT_EQ(d.layer_shapes().size(), 11u);
  EXPECT_EQ(d.layer_shapes().front(), (std::pair<std::size_t, std::size_t>{8, 1024}));
  EXPECT_EQ(d.layer_shapes().back(), (std::pair<std::size_t, std::size_t>{512, 8}));
}

TEST(GnnDims, DeskKeepsTopology) {
  const GnnDims d = GnnDims::desk(4);
  EXPECT_EQ(d.mlp_in, (std::vector<std::size_t>{8, 64, 32}));
  EXPECT_EQ(d.mlp2, (std::vector<std::size_t>{64, 32, 32}));
  EXPECT_NO_THROW(d.validate());
  EXPECT_EQ(make_dims(GnnPreset::kDesk, 4), d);
  EXPECT_EQ(parse_preset("paper"), GnnPreset::kPaper);
  EXPECT_THROW(parse_preset("huge"), ConfigError);
}

TEST(GnnDims, RejectsBrokenChains) {
  GnnDims d = GnnDims::desk(4);
  d.mlp2[0] = 33;
  EXPECT_THROW(d.validate(), ConfigError);
  d = GnnDims::desk(4);
  d.mlp_in[0] = 6;
  EXPECT_THROW(d.validate(), ConfigError);
}

TEST(GnnInit, GlorotBoundsZeroBiasesDeterministic) {
  const GnnDims d = GnnDims::desk(4);
  const GnnParams a = GnnParams::init(d, 1, 7), b = GnnParams::init(d, 1, 7);
  const auto shapes = d.layer_shapes();
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(shapes[l].first + shapes[l].second));
    EXPECT_EQ(a.layers[l].weight.rows(), shapes[l].first);
    for (double v : a.layers[l].weight.data()) EXPECT_LE(std::abs(v), bound);
    for (double v : a.layers[l].bias.data()) EXPECT_EQ(v, 0.0);
    EXPECT_TRUE(std::equal(a.layers[l].weight.data().begin(), a.layers[l].weight.data().end(),
                           b.layers[l].weight.data().begin()));
  }
  EXPECT_EQ(a.cell, 1u);
}

TEST(GnnForward, ShapeAndPower) {
  const GnnParams p = random_params(kSmall, 1);
  for (std::size_t K : {1u, 2u, 5u}) {
    const auto y = gnn_forward(p, random_features(K, 6, K), 2.5);
    EXPECT_EQ(y.rows(), K);
    EXPECT_EQ(y.cols(), 6u);
    EXPECT_NEAR(frob2(y), 2.5, 2.5e-9);
  }
}

TEST(GnnForward, PermutationEquivariant) {
  const GnnParams p = random_params(kSmall, 2);
  const auto x = random_features(4, 6, 3);
  const std::size_t perm[] = {2, 0, 3, 1};
  FeatureMatrix xp(4, 6);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 6; ++c) xp(r, c) = x(perm[r], c);
  const auto y = gnn_forward(p, x, 1.0), yp = gnn_forward(p, xp, 1.0);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 6; ++c) EXPECT_NEAR(yp(r, c), y(perm[r], c), 1e-9);
}

TEST(GnnForward, SingleUeUsesZeroPool) {
  const GnnParams p = random_params(kSmall, 4);
  const auto y = gnn_forward(p, random_features(1, 6, 5), 1.0);
  for (double v : y.data()) EXPECT_TRUE(std::isfinite(v));
  const FeatureMatrix x = random_features(1, 6, 5);
  const std::vector<FeatureMatrix> in = {x};
  EXPECT_EQ(gnn_forward_batched(p, in, 1.0)[0], gnn_forward(p, x, 1.0));
}

TEST(GnnForward, RejectsWrongWidth) {
  const GnnParams p = random_params(kSmall, 4);
  EXPECT_THROW(gnn_forward(p, random_features(2, 5, 1), 1.0), InputError);
  EXPECT_THROW(gnn_forward(p, FeatureMatrix(0, 6), 1.0), InputError);
}

TEST(GnnBatched, MatchesSequential) {
  for (std::size_t K : {2u, 4u}) {
    const GnnParams p = random_params(GnnDims::desk(4), 10 + K);
    for (std::size_t B : {1u, 2u, 4u, 8u}) {
      std::vector<FeatureMatrix> in;
      for (std::size_t b = 0; b < B; ++b) in.push_back(random_features(K, 8, 100 * B + b));
      const auto out = gnn_forward_batched(p, in, 2.0);
      ASSERT_EQ(out.size(), B);
      for (std::size_t b = 0; b < B; ++b) {
        const auto ref = gnn_forward(p, in[b], 2.0);
        EXPECT_LT(max_abs_diff(out[b], ref), 1e-9);
        if (B == 1) EXPECT_EQ(out[b], ref);
      }
    }
  }
}

TEST(GnnBatched, OrderIndependent) {
  const GnnParams p = random_params(kSmall, 20);
  std::vector<FeatureMatrix> in;
  for (std::size_t b = 0; b < 4; ++b) in.push_back(random_features(3, 6, 200 + b));
  const std::vector<FeatureMatrix> rev(in.rbegin(), in.rend());
  const auto a = gnn_forward_batched(p, in, 1.0), r = gnn_forward_batched(p, rev, 1.0);
  for (std::size_t b = 0; b < 4; ++b) EXPECT_LT(max_abs_diff(a[b], r[3 - b]), 1e-12);
}

TEST(GnnBatched, RejectsEmptyAndMixed) {
  const GnnParams p = random_params(kSmall, 20);
  EXPECT_THROW(gnn_forward_batched(p, {}, 1.0), InputError);
  const std::vector<FeatureMatrix> mixed = {random_features(2, 6, 1), random_features(3, 6, 2)};
  EXPECT_THROW(gnn_forward_batched(p, mixed, 1.0), InputError);
}

TEST(GnnBeamformer, PowerPerCellAndScalability) {
  const GnnDims d = GnnDims::desk(4);
  std::vector<GnnParams> cells = {random_params(d, 1), random_params(d, 2)};
  for (std::size_t K : {2u, 3u, 4u}) {
    const NetworkConfig cfg = make_network(2, K, 4, 6);
    const GnnBeamformer model(cells, cfg);
    const auto h = testutil::random_channels(cfg, K);
    const auto w = model(h);
    const auto pc = check_power(w, cfg);
    for (double pw : pc.power_mw) EXPECT_NEAR(pw, cfg.tx_power_mw(), 1e-9 * cfg.tx_power_mw());
    const std::vector<EffectiveChannels> hs = {h, testutil::random_channels(cfg, 99)};
    EXPECT_EQ(model.batch(hs)[0], w);
  }
}

TEST(GnnBeamformer, UsesOnlyServingCellChannels) {
  const GnnDims d = GnnDims::desk(4);
  const NetworkConfig cfg = make_network(2, 2, 4, 6);
  const GnnBeamformer model({random_params(d, 1), random_params(d, 2)}, cfg);
  auto h = testutil::random_channels(cfg, 3);
  const auto w = model(h);
  for (auto& v : h.vec(0, 1, 1)) v *= 5.0;  // cross-cell channel only
  EXPECT_EQ(model(h), w);
}

TEST(GnnBeamformer, RejectsMismatchedModels) {
  const NetworkConfig cfg = make_network(2, 2, 4, 6);
  EXPECT_THROW(GnnBeamformer({random_params(GnnDims::desk(4), 1)}, cfg), ConfigError);
  EXPECT_THROW(GnnBeamformer({random_params(GnnDims::desk(3), 1), random_params(GnnDims::desk(3), 2)}, cfg),
               ConfigError);
}

TEST(GnnFeatures, RowsAreScaledServingChannels) {
  const NetworkConfig cfg;
  const auto h = testutil::random_channels(cfg, 5);
  const auto x = make_features(h, 1, 2.0);
  EXPECT_EQ(x.rows(), 4u);
  EXPECT_EQ(x(2, 3), 2.0 * h.at(1, 2, 1, 3).real());
  EXPECT_EQ(x(2, 7), 2.0 * h.at(1, 2, 1, 3).imag());
  EXPECT_NEAR(input_scale(cfg), 1.0 / std::sqrt(std::pow(10.0, pathloss_db(25.0, cfg) / 10.0)),
              1e-9);
}
