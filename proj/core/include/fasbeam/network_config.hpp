#pragma once

#include <cstddef>
#include <vector>

namespace fasbeam {

struct DistanceRange {
  double min_m = 20.0;
  double max_m = 30.0;
};

// Scenario description. Defaults reproduce the reference two-cell setup:
// 2 cells x 4 UEs, 4 fluid antennas per BS with 6 ports over half a
// wavelength, 3 dBm per BS, -90 dBm noise, unit weights, UEs 20-30 m away.
struct NetworkConfig {
  std::size_t num_cells = 2;
  std::vector<std::size_t> ues_per_cell = {4, 4};
  std::size_t fas_per_bs = 4;
  std::size_t ports_per_fa = 6;
  double fa_length_wavelengths = 0.5;
  double tx_power_dbm = 3.0;  // per BS
  double noise_dbm = -90.0;
  // Per (cell, UE) weights; empty means every weight is 1.
  std::vector<std::vector<double>> rate_weights;
  DistanceRange ue_distance_range;
  double ref_distance_m = 1.0;
  double ref_pathloss_db = -30.0;
  double pathloss_exponent_coeff = 25.0;  // dB per decade

  // Throws ConfigError on any violated invariant.
  void validate() const;

  std::size_t num_ues(std::size_t cell) const { return ues_per_cell.at(cell); }
  std::size_t total_ues() const;
  double weight(std::size_t cell, std::size_t ue) const;

  double tx_power_mw() const;
  double noise_mw() const;
};

// Uniform helper: `cells` cells with `ues` UEs each, everything else default.
NetworkConfig make_network(std::size_t cells, std::size_t ues, std::size_t fas,
                           std::size_t ports, double tx_power_dbm = 3.0);

double dbm_to_mw(double dbm);
double db_to_linear(double db);

}  // namespace fasbeam
