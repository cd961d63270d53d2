#include "fasbeam/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fasbeam/errors.hpp"

namespace fasbeam {

namespace {
constexpr double kPowerTolerance = 1e-9;

void check_shapes(const EffectiveChannels& h, const BeamformingSet& w, const NetworkConfig& cfg) {
  const UeLayout expected(cfg.ues_per_cell);
  if (!(h.layout() == expected) || !(w.layout() == expected))
    throw InputError("UE layout of channels/beams does not match the network config");
  if (h.num_bs() != cfg.num_cells) throw InputError("channel BS count does not match config");
  if (h.fas() != cfg.fas_per_bs || w.fas() != cfg.fas_per_bs)
    throw InputError("FA count of channels/beams does not match config");
}
}  // namespace

bool PowerCheck::all_within() const {
  return std::all_of(within_budget.begin(), within_budget.end(), [](bool b) { return b; });
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex acc{};
  for (std::size_t n = 0; n < a.size(); ++n) acc += std::conj(a[n]) * b[n];
  return acc;
}

double squared_norm(std::span<const Complex> a) {
  double acc = 0.0;
  for (const auto& x : a) acc += std::norm(x);
  return acc;
}

RateReport compute_rates(const EffectiveChannels& h, const BeamformingSet& w,
                         const NetworkConfig& cfg) {
  check_shapes(h, w, cfg);
  const double noise = cfg.noise_mw();
  RateReport report;
  report.per_ue_rate.resize(cfg.num_cells);
  for (std::size_t i = 0; i < cfg.num_cells; ++i) {
    report.per_ue_rate[i].resize(cfg.ues_per_cell[i]);
    for (std::size_t k = 0; k < cfg.ues_per_cell[i]; ++k) {
      double signal = 0.0;
      double interference = 0.0;
      for (std::size_t j = 0; j < cfg.num_cells; ++j) {
        const auto hj = h.vec(i, k, j);
        for (std::size_t r = 0; r < cfg.ues_per_cell[j]; ++r) {
          const double p = std::norm(inner(hj, w.vec(j, r)));
          if (j == i && r == k)
            signal = p;
          else
            interference += p;
        }
      }
      const double rate = std::log2(1.0 + signal / (interference + noise));
      report.per_ue_rate[i][k] = rate;
      report.wsr += cfg.weight(i, k) * rate;
    }
  }
  report.per_bs_power = check_power(w, cfg).power_mw;
  return report;
}

PowerCheck check_power(const BeamformingSet& w, const NetworkConfig& cfg) {
  if (!(w.layout() == UeLayout(cfg.ues_per_cell)) || w.fas() != cfg.fas_per_bs)
    throw InputError("beamforming set shape does not match the network config");
  const double budget = cfg.tx_power_mw() * (1.0 + kPowerTolerance);
  PowerCheck out;
  for (std::size_t i = 0; i < cfg.num_cells; ++i) {
    double p = 0.0;
    for (std::size_t k = 0; k < cfg.ues_per_cell[i]; ++k) p += squared_norm(w.vec(i, k));
    out.power_mw.push_back(p);
    out.within_budget.push_back(p <= budget);
  }
  return out;
}

}  // namespace fasbeam
