#include <gtest/gtest.h>

#include <set>

#include "fasbeam/baselines.hpp"
#include "fasbeam/errors.hpp"
#include "fasbeam/portsel.hpp"
#include "test_util.hpp"

using namespace fasbeam;

namespace {

ChannelTensor tensor_for(const NetworkConfig& cfg, std::uint64_t seed) {
  return sample_channels(cfg, build_correlation(cfg.ports_per_fa, cfg.fa_length_wavelengths),
                         seed);
}

// Counts solver calls.
Solver counting(const NetworkConfig& cfg, std::size_t& calls) {
  return {"count", [cfg, &calls](const EffectiveChannels& h) {
            ++calls;
            return mrt(h, cfg);
          }, {}};
}

}  // namespace

TEST(RpsSingle, SinglePortHasOneSelection) {
  const NetworkConfig cfg = make_network(2, 2, 3, 1);
  const auto t = tensor_for(cfg, 1);
  const auto o = rps_single(t, cfg, mrt_solver(cfg), 5);
  for (std::size_t p : o.selection.flat()) EXPECT_EQ(p, 0u);
}

TEST(RpsSingle, SeedsGiveDistinctSelections) {
  const NetworkConfig cfg;
  const auto t = tensor_for(cfg, 1);
  int distinct = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = rps_single(t, cfg, mrt_solver(cfg), 2 * s);
    const auto b = rps_single(t, cfg, mrt_solver(cfg), 2 * s + 1);
    distinct += a.selection != b.selection;
  }
  EXPECT_GE(distinct, 19);
}

TEST(RpsSingle, WsrReproducesComputeRates) {
  const NetworkConfig cfg;
  const auto t = tensor_for(cfg, 2);
  const auto o = rps_single(t, cfg, mmse_solver(cfg), 3);
  const double again = compute_rates(select_ports(t, o.selection), o.beams, cfg).wsr;
  EXPECT_NEAR(o.wsr, again, 1e-12 * again);
  EXPECT_EQ(o.trial, 0u);
}

TEST(RpsBestOf, OneTrialIsSingle) {
  const NetworkConfig cfg;
  const auto t = tensor_for(cfg, 3);
  const auto a = rps_best_of(t, cfg, zf_solver(cfg), 1, 8);
  const auto b = rps_single(t, cfg, zf_solver(cfg), 8);
  EXPECT_EQ(a.selection, b.selection);
  EXPECT_EQ(a.wsr, b.wsr);
  EXPECT_THROW(rps_best_of(t, cfg, zf_solver(cfg), 0, 8), InputError);
}

TEST(RpsBestOf, NestedSeedsAreMonotone) {
  const NetworkConfig cfg;
  const auto t = tensor_for(cfg, 4);
  double prev = -1.0;
  for (std::size_t T : {1u, 20u, 500u, 2000u}) {
    const auto o = rps_best_of(t, cfg, mrt_solver(cfg), T, 77);
    EXPECT_GE(o.wsr, prev);
    EXPECT_LT(o.trial, T);
    prev = o.wsr;
  }
}

TEST(RpsBestOf, ReturnsArgmaxOfTrials) {
  const NetworkConfig cfg;
  const auto t = tensor_for(cfg, 5);
  const auto w = trial_wsrs(t, cfg, mrt_solver(cfg), 50, 3);
  const auto o = rps_best_of(t, cfg, mrt_solver(cfg), 50, 3);
  const auto best = std::max_element(w.begin(), w.end());
  EXPECT_EQ(o.wsr, *best);
  EXPECT_EQ(o.trial, static_cast<std::size_t>(best - w.begin()));
  EXPECT_EQ(o.selection, trial_selection(t, 3, o.trial));
}

TEST(RpsBestOf, TiesKeepLowestTrial) {
  const NetworkConfig cfg = make_network(1, 1, 1, 1);
  const auto t = tensor_for(cfg, 5);
  EXPECT_EQ(rps_best_of(t, cfg, mrt_solver(cfg), 10, 1).trial, 0u);
}

TEST(RpsBestOf, FindsExhaustiveOptimumOnTinyGrid) {
  const NetworkConfig cfg = make_network(1, 1, 1, 3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto t = tensor_for(cfg, s);
    const auto ex = exhaustive(t, cfg, mrt_solver(cfg));
    EXPECT_EQ(rps_best_of(t, cfg, mrt_solver(cfg), 50, s).wsr, ex.wsr);
  }
}

TEST(Exhaustive, CountsEvaluations) {
  std::size_t calls = 0;
  NetworkConfig cfg = make_network(1, 2, 2, 2);
  exhaustive(tensor_for(cfg, 1), cfg, counting(cfg, calls));
  EXPECT_EQ(calls, 4u);
  calls = 0;
  cfg = make_network(2, 1, 2, 1);
  exhaustive(tensor_for(cfg, 1), cfg, counting(cfg, calls));
  EXPECT_EQ(calls, 1u);
}

TEST(Exhaustive, LexicographicOrderAndTies) {
  const NetworkConfig cfg = make_network(1, 1, 2, 3);
  const auto t = tensor_for(cfg, 2);
  std::vector<PortSelection> seen;
  Solver record{"rec", [&](const EffectiveChannels& h) { return mrt(h, cfg); }, {}};
  const auto o = exhaustive(t, cfg, record);
  // Enumeration index i maps to ports (i / 3, i % 3).
  EXPECT_EQ(o.selection.at(0, 0), o.trial / 3);
  EXPECT_EQ(o.selection.at(0, 1), o.trial % 3);
  // All-equal objective: the first selection wins.
  Solver flat{"zero", [&](const EffectiveChannels& h) { return BeamformingSet(h.layout(), 2); },
              {}};
  const auto z = exhaustive(t, cfg, flat);
  EXPECT_EQ(z.trial, 0u);
  EXPECT_EQ(z.selection, PortSelection(1, 2));
}

TEST(Exhaustive, DominatesSampling) {
  const NetworkConfig cfg = make_network(1, 2, 2, 3);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto t = tensor_for(cfg, 10 + s);
    const auto ex = exhaustive(t, cfg, zf_solver(cfg));
    for (std::size_t T : {1u, 5u, 30u}) EXPECT_GE(ex.wsr, rps_best_of(t, cfg, zf_solver(cfg), T, s).wsr);
  }
}

TEST(Exhaustive, RefusesHugeGrids) {
  const NetworkConfig cfg;  // 6^8 selections
  const auto t = tensor_for(cfg, 1);
  EXPECT_DOUBLE_EQ(selection_count(t), 1679616.0);
  try {
    exhaustive(t, cfg, mrt_solver(cfg));
    FAIL();
  } catch (const SelectionError& e) {
    EXPECT_NE(std::string(e.what()).find("1.67962e+06"), std::string::npos) << e.what();
  }
}

TEST(Solvers, GnnBatchAgreesWithSingle) {
  const NetworkConfig cfg;
  const GnnDims d = GnnDims::desk(4);
  const GnnBeamformer model({testutil::random_params(d, 1), testutil::random_params(d, 2)}, cfg);
  const Solver s = gnn_solver(model);
  const auto t = tensor_for(cfg, 6);
  const auto w = trial_wsrs(t, cfg, s, 5, 1);
  Solver single_only{"g", s.single, {}};
  const auto w2 = trial_wsrs(t, cfg, single_only, 5, 1);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(w[i], w2[i], 1e-12 * w[i]);
}
