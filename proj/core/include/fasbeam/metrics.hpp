#pragma once

#include <span>
#include <vector>

#include "fasbeam/channel.hpp"
#include "fasbeam/network_config.hpp"

namespace fasbeam {

// Beamforming vectors w_ik in C^N for every UE of every cell.
class BeamformingSet {
 public:
  BeamformingSet() = default;
  BeamformingSet(UeLayout layout, std::size_t fas)
      : layout_(std::move(layout)), fas_(fas), w_(layout_.total() * fas) {}

  const UeLayout& layout() const { return layout_; }
  std::size_t fas() const { return fas_; }

  Complex& at(std::size_t cell, std::size_t ue, std::size_t fa) {
    return w_[layout_.flat(cell, ue) * fas_ + fa];
  }
  const Complex& at(std::size_t cell, std::size_t ue, std::size_t fa) const {
    return w_[layout_.flat(cell, ue) * fas_ + fa];
  }
  std::span<Complex> vec(std::size_t cell, std::size_t ue) {
    return {w_.data() + layout_.flat(cell, ue) * fas_, fas_};
  }
  std::span<const Complex> vec(std::size_t cell, std::size_t ue) const {
    return {w_.data() + layout_.flat(cell, ue) * fas_, fas_};
  }
  std::span<Complex> data() { return w_; }
  std::span<const Complex> data() const { return w_; }

  bool operator==(const BeamformingSet&) const = default;

 private:
  UeLayout layout_;
  std::size_t fas_ = 0;
  std::vector<Complex> w_;
};

struct RateReport {
  std::vector<std::vector<double>> per_ue_rate;  // bits/s/Hz, [cell][ue]
  double wsr = 0.0;
  std::vector<double> per_bs_power;  // mW
};

struct PowerCheck {
  std::vector<double> power_mw;
  std::vector<bool> within_budget;
  bool all_within() const;
};

// <a, b> = a^H b.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
double squared_norm(std::span<const Complex> a);

// SINR_ik = |h_{ik,i}^H w_ik|^2 / (sum_{(j,r) != (i,k)} |h_{ik,j}^H w_jr|^2 + sigma^2),
// R_ik = log2(1 + SINR_ik), WSR = sum of weighted rates.
RateReport compute_rates(const EffectiveChannels& h, const BeamformingSet& w,
                         const NetworkConfig& cfg);

// Per-BS transmit power sum_k ||w_ik||^2 against P (relative tolerance 1e-9).
PowerCheck check_power(const BeamformingSet& w, const NetworkConfig& cfg);

}  // namespace fasbeam
