#include "fasbeam/baselines.hpp"

#include <cmath>
#include <optional>

#include "fasbeam/errors.hpp"
#include "fasbeam/linalg.hpp"

namespace fasbeam {

namespace {

constexpr double kRankTolerance = 1e-12;

void check_shape(const EffectiveChannels& h, const NetworkConfig& cfg) {
  cfg.validate();
  if (!(h.layout() == UeLayout(cfg.ues_per_cell)) || h.num_bs() != cfg.num_cells ||
      h.fas() != cfg.fas_per_bs)
    throw InputError("effective channel shape does not match the network config");
}

// Rows are h_{ik,i}^H, so H w_ik stacks the received amplitudes of cell i.
ComplexMatrix serving_matrix(const EffectiveChannels& h, std::size_t cell) {
  const std::size_t users = h.layout().num_ues(cell);
  ComplexMatrix m(users, h.fas());
  for (std::size_t k = 0; k < users; ++k) {
    const auto v = h.vec(cell, k, cell);
    for (std::size_t n = 0; n < h.fas(); ++n) m(k, n) = std::conj(v[n]);
  }
  return m;
}

double column_norm(const ComplexMatrix& m, std::size_t c) {
  double acc = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) acc += std::norm(m(r, c));
  return std::sqrt(acc);
}

void store_columns(const ComplexMatrix& w, std::size_t cell, double scale, BeamformingSet& out) {
  for (std::size_t k = 0; k < w.cols(); ++k)
    for (std::size_t n = 0; n < w.rows(); ++n) out.at(cell, k, n) = scale * w(n, k);
}

// Unnormalised ZF directions, nullopt when H H^H is singular or K > N.
std::optional<ComplexMatrix> zf_directions(const ComplexMatrix& hm) {
  if (hm.rows() > hm.cols()) return std::nullopt;
  const ComplexMatrix hh = conj_transpose(hm);
  const ComplexMatrix gram = multiply(hm, hh);
  auto inv = solve(gram, ComplexMatrix::identity(gram.rows()), kRankTolerance);
  if (!inv) return std::nullopt;
  return multiply(hh, *inv);
}

// (H^H H + aI)^{-1} H^H, evaluated as H^H (H H^H + aI)^{-1} when K <= N so
// the solve stays K x K and well conditioned as the loading vanishes.
ComplexMatrix mmse_directions(const ComplexMatrix& hm, double loading) {
  const ComplexMatrix hh = conj_transpose(hm);
  if (hm.rows() <= hm.cols()) {
    ComplexMatrix a = multiply(hm, hh);
    for (std::size_t k = 0; k < a.rows(); ++k) a(k, k) += loading;
    auto inv = solve(a, ComplexMatrix::identity(a.rows()), kRankTolerance);
    if (!inv) return ComplexMatrix(hm.cols(), hm.rows());
    return multiply(hh, *inv);
  }
  ComplexMatrix a = multiply(hh, hm);
  for (std::size_t n = 0; n < a.rows(); ++n) a(n, n) += loading;
  auto w = solve(a, hh, kRankTolerance);
  if (!w) return ComplexMatrix(hm.cols(), hm.rows());
  return *w;
}

void mmse_cell(const ComplexMatrix& hm, double loading, double power, std::size_t cell,
               BeamformingSet& out) {
  const ComplexMatrix w = mmse_directions(hm, loading);
  double fro = 0.0;
  for (const auto& x : w.data()) fro += std::norm(x);
  if (fro == 0.0) return;
  store_columns(w, cell, std::sqrt(power / fro), out);
}

// Loading used when MMSE is reached from a ZF fallback at sigma^2 = 0.
double fallback_loading(const ComplexMatrix& hm) {
  const double m = max_abs(hm);
  return 1e-9 * m * m;
}

}  // namespace

BeamformingSet mrt(const EffectiveChannels& h, const NetworkConfig& cfg) {
  check_shape(h, cfg);
  BeamformingSet w(h.layout(), h.fas());
  const double power = cfg.tx_power_mw();
  for (std::size_t i = 0; i < cfg.num_cells; ++i) {
    std::size_t active = 0;
    for (std::size_t k = 0; k < cfg.ues_per_cell[i]; ++k)
      if (squared_norm(h.vec(i, k, i)) > 0.0) ++active;
    if (active == 0) continue;
    const double per_user = std::sqrt(power / static_cast<double>(active));
    for (std::size_t k = 0; k < cfg.ues_per_cell[i]; ++k) {
      const auto v = h.vec(i, k, i);
      const double norm = std::sqrt(squared_norm(v));
      if (norm == 0.0) continue;
      for (std::size_t n = 0; n < h.fas(); ++n) w.at(i, k, n) = per_user * v[n] / norm;
    }
  }
  return w;
}

ZfResult zf(const EffectiveChannels& h, const NetworkConfig& cfg) {
  check_shape(h, cfg);
  ZfResult out{BeamformingSet(h.layout(), h.fas()), std::vector<bool>(cfg.num_cells, false)};
  const double power = cfg.tx_power_mw();
  const double loading_base = cfg.noise_mw() / power;
  for (std::size_t i = 0; i < cfg.num_cells; ++i) {
    const ComplexMatrix hm = serving_matrix(h, i);
    const auto dirs = zf_directions(hm);
    bool degenerate = !dirs.has_value();
    if (dirs) {
      for (std::size_t k = 0; k < dirs->cols(); ++k)
        if (column_norm(*dirs, k) == 0.0 || !std::isfinite(column_norm(*dirs, k)))
          degenerate = true;
    }
    if (degenerate) {
      out.mmse_fallback[i] = true;
      double loading = static_cast<double>(hm.rows()) * loading_base;
      if (loading == 0.0) loading = fallback_loading(hm);
      mmse_cell(hm, loading, power, i, out.beams);
      continue;
    }
    const double per_user = std::sqrt(power / static_cast<double>(hm.rows()));
    for (std::size_t k = 0; k < dirs->cols(); ++k) {
      const double norm = column_norm(*dirs, k);
      for (std::size_t n = 0; n < dirs->rows(); ++n)
        out.beams.at(i, k, n) = per_user * (*dirs)(n, k) / norm;
    }
  }
  return out;
}

BeamformingSet mmse(const EffectiveChannels& h, const NetworkConfig& cfg) {
  check_shape(h, cfg);
  if (cfg.noise_mw() == 0.0) return zf(h, cfg).beams;
  BeamformingSet w(h.layout(), h.fas());
  const double power = cfg.tx_power_mw();
  for (std::size_t i = 0; i < cfg.num_cells; ++i) {
    const ComplexMatrix hm = serving_matrix(h, i);
    const double loading = static_cast<double>(hm.rows()) * cfg.noise_mw() / power;
    mmse_cell(hm, loading, power, i, w);
  }
  return w;
}

}  // namespace fasbeam
