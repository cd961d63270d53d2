#pragma once

#include <vector>

#include "fasbeam/channel.hpp"
#include "fasbeam/metrics.hpp"
#include "fasbeam/network_config.hpp"

namespace fasbeam {

// Maximum ratio transmission: w_ik = sqrt(P / K') h_{ik,i} / ||h_{ik,i}||, where
// K' counts the UEs of cell i with a non-zero serving channel.
BeamformingSet mrt(const EffectiveChannels& h, const NetworkConfig& cfg);

struct ZfResult {
  BeamformingSet beams;
  // True for every BS that was rank deficient (or had K_i > N) and used MMSE.
  std::vector<bool> mmse_fallback;
};

// Zero forcing H_i^H (H_i H_i^H)^{-1}, each column scaled to ||w_ik||^2 = P / K_i.
ZfResult zf(const EffectiveChannels& h, const NetworkConfig& cfg);

// Regularised ZF (H_i^H H_i + (K_i sigma^2 / P) I)^{-1} H_i^H with a single
// per-BS rescale to total power P. sigma^2 = 0 reduces to ZF.
BeamformingSet mmse(const EffectiveChannels& h, const NetworkConfig& cfg);

}  // namespace fasbeam
