#include "fasbeam/network_config.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fasbeam/errors.hpp"

namespace fasbeam {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

void NetworkConfig::validate() const {
  if (num_cells < 1) throw ConfigError("num_cells must be >= 1");
  if (ues_per_cell.size() != num_cells)
    throw ConfigError("ues_per_cell has " + std::to_string(ues_per_cell.size()) +
                      " entries, expected " + std::to_string(num_cells));
  for (std::size_t k : ues_per_cell)
    if (k < 1) throw ConfigError("every cell needs at least one UE");
  if (fas_per_bs < 1) throw ConfigError("fas_per_bs must be >= 1");
  if (ports_per_fa < 1) throw ConfigError("ports_per_fa must be >= 1");
  if (!(fa_length_wavelengths >= 0.0)) throw ConfigError("fa_length_wavelengths must be >= 0");
  if (!(ue_distance_range.min_m > 0.0) || !(ue_distance_range.max_m > 0.0))
    throw ConfigError("UE distances must be positive");
  if (ue_distance_range.min_m > ue_distance_range.max_m)
    throw ConfigError("ue_distance_range.min exceeds max");
  if (!(ref_distance_m > 0.0)) throw ConfigError("ref_distance must be positive");
  if (!std::isfinite(tx_power_dbm)) throw ConfigError("tx_power_dbm must be finite");
  // -inf dBm is accepted and means a noiseless receiver.
  if (std::isnan(noise_dbm) || noise_dbm == HUGE_VAL) throw ConfigError("noise_dbm must be < +inf");
  if (!rate_weights.empty()) {
    if (rate_weights.size() != num_cells) throw ConfigError("rate_weights must have one row per cell");
    bool any_positive = false;
    for (std::size_t i = 0; i < num_cells; ++i) {
      if (rate_weights[i].size() != ues_per_cell[i])
        throw ConfigError("rate_weights row " + std::to_string(i) + " has wrong length");
      for (double w : rate_weights[i]) {
        if (!(w >= 0.0)) throw ConfigError("rate weights must be >= 0");
        any_positive = any_positive || w > 0.0;
      }
    }
    if (!any_positive) throw ConfigError("at least one rate weight must be positive");
  }
}

std::size_t NetworkConfig::total_ues() const {
  return std::accumulate(ues_per_cell.begin(), ues_per_cell.end(), std::size_t{0});
}

double NetworkConfig::weight(std::size_t cell, std::size_t ue) const {
  if (rate_weights.empty()) return 1.0;
  return rate_weights[cell][ue];
}

double NetworkConfig::tx_power_mw() const { return dbm_to_mw(tx_power_dbm); }
double NetworkConfig::noise_mw() const { return dbm_to_mw(noise_dbm); }

NetworkConfig make_network(std::size_t cells, std::size_t ues, std::size_t fas,
                           std::size_t ports, double tx_power_dbm) {
  NetworkConfig cfg;
  cfg.num_cells = cells;
  cfg.ues_per_cell.assign(cells, ues);
  cfg.fas_per_bs = fas;
  cfg.ports_per_fa = ports;
  cfg.tx_power_dbm = tx_power_dbm;
  return cfg;
}

}  // namespace fasbeam
