#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fasbeam/bessel.hpp"
#include "fasbeam/channel.hpp"
#include "fasbeam/errors.hpp"

using namespace fasbeam;

TEST(Correlation, UnitDiagonalAndAdjacentEntry) {
  const auto c = build_correlation(6, 0.5);
  for (std::size_t l = 0; l < 6; ++l) EXPECT_EQ(c.corr(l, l), 1.0);
  EXPECT_NEAR(c.corr(0, 1), 0.9037, 5e-5);
  EXPECT_NEAR(c.corr(0, 1), std::cyl_bessel_j(0.0, 2 * std::numbers::pi * 0.5 / 5), 1e-13);
}

TEST(Correlation, SymmetricAndReconstructed) {
  for (std::size_t L : {2u, 6u, 10u}) {
    for (double W : {0.0, 0.5, 2.0}) {
      const auto c = build_correlation(L, W);
      for (double v : c.eigvals) EXPECT_GE(v, 0.0);
      for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = 0; b < L; ++b) {
          EXPECT_EQ(c.corr(a, b), c.corr(b, a));
          double acc = 0.0;
          for (std::size_t k = 0; k < L; ++k)
            acc += c.eigvecs(a, k) * c.eigvals[k] * c.eigvecs(b, k);
          EXPECT_NEAR(acc, c.corr(a, b), 1e-10) << L << " " << W;
        }
    }
  }
}

TEST(Correlation, SinglePortIsIdentity) {
  const auto c = build_correlation(1, 0.5);
  ASSERT_EQ(c.ports(), 1u);
  EXPECT_EQ(c.corr(0, 0), 1.0);
  EXPECT_EQ(c.eigvals[0], 1.0);
}

TEST(Correlation, ZeroPortsRejected) { EXPECT_THROW(build_correlation(0, 0.5), ConfigError); }

TEST(Correlation, ZeroLengthIsFullyCorrelated) {
  const auto c = build_correlation(4, 0.0);
  for (double v : c.corr.data()) EXPECT_EQ(v, 1.0);
}

TEST(Pathloss, ReferenceValues) {
  const NetworkConfig cfg;
  EXPECT_DOUBLE_EQ(pathloss_db(1.0, cfg), -30.0);
  EXPECT_DOUBLE_EQ(pathloss_db(10.0, cfg), -55.0);
  EXPECT_NEAR(pathloss_db(20.0, cfg), -62.526, 5e-4);
  EXPECT_NEAR(pathloss_db(20.0, cfg), -30.0 - 25.0 * std::log10(20.0), 1e-12);
  EXPECT_THROW(pathloss_db(0.0, cfg), InputError);
  EXPECT_THROW(pathloss_db(-3.0, cfg), InputError);
}

TEST(Sampling, DeterministicPerSeed) {
  const NetworkConfig cfg;
  const auto corr = build_correlation(cfg.ports_per_fa, cfg.fa_length_wavelengths);
  const auto a = sample_channels(cfg, corr, 5);
  const auto b = sample_channels(cfg, corr, 5);
  const auto c = sample_channels(cfg, corr, 6);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.coeffs()[0], c.coeffs()[0]);
}

TEST(Sampling, ShapeFiniteAndDistancesInRange) {
  NetworkConfig cfg = make_network(3, 2, 4, 5);
  cfg.ues_per_cell = {1, 2, 3};
  const auto corr = build_correlation(cfg.ports_per_fa, cfg.fa_length_wavelengths);
  const auto t = sample_channels(cfg, corr, 9);
  EXPECT_EQ(t.coeffs().size(), 6u * 3 * 4 * 5);
  for (const Complex& v : t.coeffs()) EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < cfg.num_ues(i); ++k)
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_GE(t.distance(i, k, j), 20.0);
        EXPECT_LE(t.distance(i, k, j), 30.0);
      }
}

TEST(Sampling, CorrelationMatchesAtFixedDistance) {
  NetworkConfig cfg = make_network(1, 1, 1, 4);
  cfg.ue_distance_range = {15.0, 15.0};
  const auto corr = build_correlation(4, 0.5);
  const double gain = std::pow(10.0, pathloss_db(15.0, cfg) / 10.0);
  const int draws = 20000;
  std::vector<Complex> acc(16);
  for (int d = 0; d < draws; ++d) {
    const auto t = sample_channels(cfg, corr, static_cast<std::uint64_t>(d));
    const auto h = t.port_vector(0, 0, 0, 0);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) acc[a * 4 + b] += h[a] * std::conj(h[b]);
  }
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const Complex e = acc[a * 4 + b] / (draws * gain);
      EXPECT_NEAR(e.real(), corr.corr(a, b), 0.05);
      EXPECT_NEAR(e.imag(), 0.0, 0.05);
    }
}

TEST(Selection, GathersExactly) {
  const NetworkConfig cfg;
  const auto corr = build_correlation(cfg.ports_per_fa, cfg.fa_length_wavelengths);
  const auto t = sample_channels(cfg, corr, 3);
  const auto s = random_selection(2, 4, 6, 8);
  const auto h = select_ports(t, s);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t n = 0; n < 4; ++n) EXPECT_EQ(h.at(i, k, j, n), t.at(i, k, j, n, s.at(j, n)));
}

TEST(Selection, SinglePortIsTheOnlySlice) {
  const NetworkConfig cfg = make_network(2, 2, 3, 1);
  const auto corr = build_correlation(1, 0.5);
  const auto t = sample_channels(cfg, corr, 1);
  const auto h = select_ports(t, random_selection(2, 3, 1, 77));
  for (std::size_t n = 0; n < h.data().size(); ++n) EXPECT_EQ(h.data()[n], t.coeffs()[n]);
}

TEST(Selection, RejectsBadIndices) {
  const NetworkConfig cfg;
  const auto corr = build_correlation(cfg.ports_per_fa, cfg.fa_length_wavelengths);
  const auto t = sample_channels(cfg, corr, 3);
  PortSelection s(2, 4);
  s.at(1, 2) = 6;
  EXPECT_THROW(select_ports(t, s), SelectionError);
  EXPECT_THROW(select_ports(t, PortSelection(1, 4)), SelectionError);
}

TEST(Selection, RandomIsUniformPerFa) {
  std::vector<int> counts(6);
  for (std::uint64_t s = 0; s < 6000; ++s) ++counts[random_selection(1, 1, 6, s).at(0, 0)];
  for (int c : counts) EXPECT_NEAR(c, 1000, 150);
}

TEST(NetworkConfig, RejectsInvalid) {
  NetworkConfig cfg;
  cfg.ues_per_cell = {4, 0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = NetworkConfig{};
  cfg.ue_distance_range = {30.0, 20.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = NetworkConfig{};
  cfg.rate_weights = {{0, 0, 0, 0}, {0, 0, 0, 0}};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = NetworkConfig{};
  cfg.fa_length_wavelengths = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = NetworkConfig{};
  cfg.noise_dbm = -INFINITY;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.noise_mw(), 0.0);
}

TEST(NetworkConfig, UnitConversions) {
  const NetworkConfig cfg;
  EXPECT_NEAR(cfg.tx_power_mw(), std::pow(10.0, 0.3), 1e-12);
  EXPECT_NEAR(cfg.noise_mw(), 1e-9, 1e-21);
  EXPECT_EQ(cfg.total_ues(), 8u);
  EXPECT_EQ(cfg.weight(1, 3), 1.0);
}
