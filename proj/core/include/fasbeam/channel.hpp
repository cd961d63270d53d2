#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fasbeam/linalg.hpp"
#include "fasbeam/network_config.hpp"

namespace fasbeam {

// Maps (cell, UE) pairs onto a flat UE index in cell-major order.
class UeLayout {
 public:
  UeLayout() = default;
  explicit UeLayout(const std::vector<std::size_t>& ues_per_cell);

  std::size_t num_cells() const { return counts_.size(); }
  std::size_t num_ues(std::size_t cell) const { return counts_[cell]; }
  std::size_t total() const { return total_; }
  std::size_t flat(std::size_t cell, std::size_t ue) const { return offsets_[cell] + ue; }
  std::size_t offset(std::size_t cell) const { return offsets_[cell]; }
  const std::vector<std::size_t>& counts() const { return counts_; }

  bool operator==(const UeLayout&) const = default;

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

// Port correlation of one fluid antenna, unit diagonal, with its
// eigendecomposition corr = eigvecs * diag(eigvals) * eigvecs^T.
struct CorrelationFactors {
  RealMatrix corr;
  RealMatrix eigvecs;
  std::vector<double> eigvals;  // clamped to >= 0

  std::size_t ports() const { return corr.rows(); }
  // eigvecs * diag(sqrt(eigvals)), the colouring transform applied to z.
  RealMatrix colouring() const;
};

// Jakes correlation J[l][l'] = J0(2 pi W |l - l'| / (L - 1)).
// Throws ConfigError for L = 0; L = 1 yields the 1x1 identity.
CorrelationFactors build_correlation(std::size_t ports, double fa_length_wavelengths);

// delta0 - coeff * log10(d / d0), in dB. Throws InputError for d <= 0.
double pathloss_db(double distance_m, const NetworkConfig& cfg);

// Per-port complex gains for every (UE, BS, FA, port).
class ChannelTensor {
 public:
  ChannelTensor(UeLayout layout, std::size_t num_bs, std::size_t fas, std::size_t ports,
                std::uint64_t seed);

  const UeLayout& layout() const { return layout_; }
  std::size_t num_bs() const { return num_bs_; }
  std::size_t fas() const { return fas_; }
  std::size_t ports() const { return ports_; }
  std::uint64_t seed() const { return seed_; }

  Complex& at(std::size_t cell, std::size_t ue, std::size_t bs, std::size_t fa, std::size_t port) {
    return coeffs_[index(layout_.flat(cell, ue), bs, fa, port)];
  }
  const Complex& at(std::size_t cell, std::size_t ue, std::size_t bs, std::size_t fa,
                    std::size_t port) const {
    return coeffs_[index(layout_.flat(cell, ue), bs, fa, port)];
  }
  // All L ports of one fluid antenna.
  std::span<const Complex> port_vector(std::size_t cell, std::size_t ue, std::size_t bs,
                                       std::size_t fa) const {
    return {coeffs_.data() + index(layout_.flat(cell, ue), bs, fa, 0), ports_};
  }
  std::span<Complex> port_vector(std::size_t cell, std::size_t ue, std::size_t bs,
                                 std::size_t fa) {
    return {coeffs_.data() + index(layout_.flat(cell, ue), bs, fa, 0), ports_};
  }

  double& distance(std::size_t cell, std::size_t ue, std::size_t bs) {
    return distances_[layout_.flat(cell, ue) * num_bs_ + bs];
  }
  double distance(std::size_t cell, std::size_t ue, std::size_t bs) const {
    return distances_[layout_.flat(cell, ue) * num_bs_ + bs];
  }

  std::span<const Complex> coeffs() const { return coeffs_; }
  bool operator==(const ChannelTensor&) const = default;

 private:
  std::size_t index(std::size_t u, std::size_t bs, std::size_t fa, std::size_t port) const {
    return ((u * num_bs_ + bs) * fas_ + fa) * ports_ + port;
  }

  UeLayout layout_;
  std::size_t num_bs_;
  std::size_t fas_;
  std::size_t ports_;
  std::uint64_t seed_;
  std::vector<Complex> coeffs_;
  std::vector<double> distances_;
};

// Draws distances uniformly in the configured range for every (UE, BS) pair,
// then for every (UE, BS, FA) a port vector delta * Q Lambda^{1/2} z with
// z ~ CN(0, I_L). Deterministic in `seed`.
ChannelTensor sample_channels(const NetworkConfig& cfg, const CorrelationFactors& corr,
                              std::uint64_t seed);

// One port index per (BS, FA).
class PortSelection {
 public:
  PortSelection() = default;
  PortSelection(std::size_t num_bs, std::size_t fas, std::size_t fill = 0)
      : num_bs_(num_bs), fas_(fas), ports_(num_bs * fas, fill) {}

  std::size_t num_bs() const { return num_bs_; }
  std::size_t fas() const { return fas_; }
  std::size_t& at(std::size_t bs, std::size_t fa) { return ports_[bs * fas_ + fa]; }
  std::size_t at(std::size_t bs, std::size_t fa) const { return ports_[bs * fas_ + fa]; }
  std::span<std::size_t> flat() { return ports_; }
  std::span<const std::size_t> flat() const { return ports_; }

  auto operator<=>(const PortSelection&) const = default;

 private:
  std::size_t num_bs_ = 0;
  std::size_t fas_ = 0;
  std::vector<std::size_t> ports_;
};

// Channels h_{ik,j} in C^N after substituting the selected ports.
class EffectiveChannels {
 public:
  EffectiveChannels(UeLayout layout, std::size_t num_bs, std::size_t fas);

  const UeLayout& layout() const { return layout_; }
  std::size_t num_bs() const { return num_bs_; }
  std::size_t fas() const { return fas_; }

  Complex& at(std::size_t cell, std::size_t ue, std::size_t bs, std::size_t fa) {
    return h_[(layout_.flat(cell, ue) * num_bs_ + bs) * fas_ + fa];
  }
  const Complex& at(std::size_t cell, std::size_t ue, std::size_t bs, std::size_t fa) const {
    return h_[(layout_.flat(cell, ue) * num_bs_ + bs) * fas_ + fa];
  }
  // h_{ik,j} as a length-N vector.
  std::span<const Complex> vec(std::size_t cell, std::size_t ue, std::size_t bs) const {
    return {h_.data() + (layout_.flat(cell, ue) * num_bs_ + bs) * fas_, fas_};
  }
  std::span<Complex> vec(std::size_t cell, std::size_t ue, std::size_t bs) {
    return {h_.data() + (layout_.flat(cell, ue) * num_bs_ + bs) * fas_, fas_};
  }
  std::span<const Complex> data() const { return h_; }

  bool operator==(const EffectiveChannels&) const = default;

 private:
  UeLayout layout_;
  std::size_t num_bs_;
  std::size_t fas_;
  std::vector<Complex> h_;
};

// Gather h[i][k][j][n] = t.coeffs[i][k][j][n][s.ports[j][n]].
// Throws SelectionError if the selection shape or any index is invalid.
EffectiveChannels select_ports(const ChannelTensor& t, const PortSelection& s);

// Draws every port uniformly and independently.
PortSelection random_selection(std::size_t num_bs, std::size_t fas, std::size_t ports,
                               std::uint64_t seed);

}  // namespace fasbeam
