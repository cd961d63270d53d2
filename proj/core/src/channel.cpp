#include "fasbeam/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fasbeam/bessel.hpp"
#include "fasbeam/errors.hpp"
#include "fasbeam/rng.hpp"

namespace fasbeam {

namespace {
constexpr double kEigenClamp = 1e-9;
}

UeLayout::UeLayout(const std::vector<std::size_t>& ues_per_cell) : counts_(ues_per_cell) {
  offsets_.reserve(counts_.size());
  for (std::size_t k : counts_) {
    offsets_.push_back(total_);
    total_ += k;
  }
}

RealMatrix CorrelationFactors::colouring() const {
  const std::size_t n = ports();
  RealMatrix f(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) f(r, c) = eigvecs(r, c) * std::sqrt(eigvals[c]);
  return f;
}

CorrelationFactors build_correlation(std::size_t ports, double fa_length_wavelengths) {
  if (ports == 0) throw ConfigError("ports_per_fa must be >= 1");
  if (!(fa_length_wavelengths >= 0.0)) throw ConfigError("fa_length_wavelengths must be >= 0");
  CorrelationFactors out;
  out.corr = RealMatrix(ports, ports);
  if (ports == 1) {
    out.corr(0, 0) = 1.0;
    out.eigvecs = RealMatrix::identity(1);
    out.eigvals = {1.0};
    return out;
  }
  const double step =
      2.0 * std::numbers::pi * fa_length_wavelengths / static_cast<double>(ports - 1);
  for (std::size_t l = 0; l < ports; ++l) {
    for (std::size_t m = l; m < ports; ++m) {
      const double v = bessel_j0(step * static_cast<double>(m - l));
      out.corr(l, m) = v;
      out.corr(m, l) = v;
    }
  }
  SymmetricEigen eig = jacobi_eigen(out.corr);
  for (double& v : eig.values) {
    if (v < -kEigenClamp)
      throw Error("correlation matrix has eigenvalue " + std::to_string(v) + " < -1e-9");
    if (v < 0.0) v = 0.0;
  }
  out.eigvecs = std::move(eig.vectors);
  out.eigvals = std::move(eig.values);
  return out;
}

double pathloss_db(double distance_m, const NetworkConfig& cfg) {
  if (!(distance_m > 0.0)) throw InputError("distance must be positive");
  return cfg.ref_pathloss_db -
         cfg.pathloss_exponent_coeff * std::log10(distance_m / cfg.ref_distance_m);
}

ChannelTensor::ChannelTensor(UeLayout layout, std::size_t num_bs, std::size_t fas,
                             std::size_t ports, std::uint64_t seed)
    : layout_(std::move(layout)),
      num_bs_(num_bs),
      fas_(fas),
      ports_(ports),
      seed_(seed),
      coeffs_(layout_.total() * num_bs * fas * ports),
      distances_(layout_.total() * num_bs) {}

ChannelTensor sample_channels(const NetworkConfig& cfg, const CorrelationFactors& corr,
                              std::uint64_t seed) {
  cfg.validate();
  if (corr.ports() != cfg.ports_per_fa)
    throw ConfigError("correlation factors built for " + std::to_string(corr.ports()) +
                      " ports, config has " + std::to_string(cfg.ports_per_fa));
  const std::size_t num_ports = cfg.ports_per_fa;
  ChannelTensor t(UeLayout(cfg.ues_per_cell), cfg.num_cells, cfg.fas_per_bs, num_ports, seed);
  Rng rng(seed);

  // Distances first, in (cell, UE, BS) order, then Gaussians in
  // (cell, UE, BS, FA, port) order.
  for (std::size_t i = 0; i < cfg.num_cells; ++i)
    for (std::size_t k = 0; k < cfg.ues_per_cell[i]; ++k)
      for (std::size_t j = 0; j < cfg.num_cells; ++j)
        t.distance(i, k, j) =
            rng.uniform(cfg.ue_distance_range.min_m, cfg.ue_distance_range.max_m);

  const RealMatrix colour = corr.colouring();
  std::vector<Complex> z(num_ports);
  for (std::size_t i = 0; i < cfg.num_cells; ++i) {
    for (std::size_t k = 0; k < cfg.ues_per_cell[i]; ++k) {
      for (std::size_t j = 0; j < cfg.num_cells; ++j) {
        const double amplitude =
            std::sqrt(db_to_linear(pathloss_db(t.distance(i, k, j), cfg)));
        for (std::size_t n = 0; n < cfg.fas_per_bs; ++n) {
          for (auto& v : z) v = rng.complex_normal();
          auto out = t.port_vector(i, k, j, n);
          for (std::size_t l = 0; l < num_ports; ++l) {
            Complex acc{};
            for (std::size_t m = 0; m < num_ports; ++m) acc += colour(l, m) * z[m];
            out[l] = amplitude * acc;
          }
        }
      }
    }
  }
  return t;
}

EffectiveChannels::EffectiveChannels(UeLayout layout, std::size_t num_bs, std::size_t fas)
    : layout_(std::move(layout)), num_bs_(num_bs), fas_(fas), h_(layout_.total() * num_bs * fas) {}

EffectiveChannels select_ports(const ChannelTensor& t, const PortSelection& s) {
  if (s.num_bs() != t.num_bs() || s.fas() != t.fas())
    throw SelectionError("selection shape " + std::to_string(s.num_bs()) + "x" +
                         std::to_string(s.fas()) + " does not match channel " +
                         std::to_string(t.num_bs()) + "x" + std::to_string(t.fas()));
  for (std::size_t p : s.flat())
    if (p >= t.ports())
      throw SelectionError("port index " + std::to_string(p) + " out of range [0, " +
                           std::to_string(t.ports()) + ")");
  const UeLayout& layout = t.layout();
  EffectiveChannels h(layout, t.num_bs(), t.fas());
  for (std::size_t i = 0; i < layout.num_cells(); ++i)
    for (std::size_t k = 0; k < layout.num_ues(i); ++k)
      for (std::size_t j = 0; j < t.num_bs(); ++j)
        for (std::size_t n = 0; n < t.fas(); ++n) h.at(i, k, j, n) = t.at(i, k, j, n, s.at(j, n));
  return h;
}

PortSelection random_selection(std::size_t num_bs, std::size_t fas, std::size_t ports,
                               std::uint64_t seed) {
  PortSelection s(num_bs, fas);
  Rng rng(seed);
  for (auto& p : s.flat()) p = static_cast<std::size_t>(rng.uniform_index(ports));
  return s;
}

}  // namespace fasbeam
