#include "fasbeam/harness/outcome_log.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "fasbeam/errors.hpp"

namespace fasbeam::harness {

namespace {

using nlohmann::json;

json network_json(const NetworkConfig& n) {
  json j;
  j["cells"] = n.num_cells;
  j["ues"] = n.ues_per_cell;
  j["fas"] = n.fas_per_bs;
  j["ports"] = n.ports_per_fa;
  j["fa_length_wavelengths"] = n.fa_length_wavelengths;
  j["tx_power_dbm"] = n.tx_power_dbm;
  // JSON has no infinities; null stands for a noiseless receiver.
  j["noise_dbm"] = std::isfinite(n.noise_dbm) ? json(n.noise_dbm) : json(nullptr);
  j["weights"] = n.rate_weights;
  j["distance_m"] = {n.ue_distance_range.min_m, n.ue_distance_range.max_m};
  j["ref_distance_m"] = n.ref_distance_m;
  j["ref_pathloss_db"] = n.ref_pathloss_db;
  j["pathloss_db_per_decade"] = n.pathloss_exponent_coeff;
  return j;
}

NetworkConfig network_from(const json& j) {
  NetworkConfig n;
  n.num_cells = j.at("cells").get<std::size_t>();
  n.ues_per_cell = j.at("ues").get<std::vector<std::size_t>>();
  n.fas_per_bs = j.at("fas").get<std::size_t>();
  n.ports_per_fa = j.at("ports").get<std::size_t>();
  n.fa_length_wavelengths = j.at("fa_length_wavelengths").get<double>();
  n.tx_power_dbm = j.at("tx_power_dbm").get<double>();
  n.noise_dbm = j.at("noise_dbm").is_null() ? -INFINITY : j.at("noise_dbm").get<double>();
  n.rate_weights = j.at("weights").get<std::vector<std::vector<double>>>();
  n.ue_distance_range.min_m = j.at("distance_m").at(0).get<double>();
  n.ue_distance_range.max_m = j.at("distance_m").at(1).get<double>();
  n.ref_distance_m = j.at("ref_distance_m").get<double>();
  n.ref_pathloss_db = j.at("ref_pathloss_db").get<double>();
  n.pathloss_exponent_coeff = j.at("pathloss_db_per_decade").get<double>();
  return n;
}

}  // namespace

std::string to_json_line(const OutcomeRecord& r) {
  json j;
  j["scheme"] = r.scheme;
  j["sweep_value"] = r.sweep_value;
  j["draw"] = r.draw;
  j["channel_seed"] = r.channel_seed;
  j["network"] = network_json(r.network);
  j["selection"] = std::vector<std::size_t>(r.selection.flat().begin(), r.selection.flat().end());
  std::vector<double> re, im;
  for (const Complex& w : r.beams.data()) {
    re.push_back(w.real());
    im.push_back(w.imag());
  }
  j["beams_re"] = re;
  j["beams_im"] = im;
  j["wsr"] = r.wsr;
  return j.dump();
}

OutcomeRecord from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    OutcomeRecord r;
    r.scheme = j.at("scheme").get<std::string>();
    r.sweep_value = j.at("sweep_value").get<double>();
    r.draw = j.at("draw").get<std::size_t>();
    r.channel_seed = j.at("channel_seed").get<std::uint64_t>();
    r.network = network_from(j.at("network"));
    r.network.validate();
    const auto ports = j.at("selection").get<std::vector<std::size_t>>();
    r.selection = PortSelection(r.network.num_cells, r.network.fas_per_bs);
    if (ports.size() != r.selection.flat().size())
      throw InputError("selection has " + std::to_string(ports.size()) + " entries");
    std::copy(ports.begin(), ports.end(), r.selection.flat().begin());
    const auto re = j.at("beams_re").get<std::vector<double>>();
    const auto im = j.at("beams_im").get<std::vector<double>>();
    r.beams = BeamformingSet(UeLayout(r.network.ues_per_cell), r.network.fas_per_bs);
    if (re.size() != r.beams.data().size() || im.size() != re.size())
      throw InputError("beam vector has the wrong length");
    for (std::size_t n = 0; n < re.size(); ++n) r.beams.data()[n] = {re[n], im[n]};
    r.wsr = j.at("wsr").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed outcome record: ") + e.what());
  }
}

void append_records(const std::filesystem::path& path, const std::vector<OutcomeRecord>& records) {
  std::ofstream f(path, std::ios::app);
  if (!f) throw InputError("cannot open '" + path.string() + "' for writing");
  for (const auto& r : records) f << to_json_line(r) << '\n';
}

std::vector<OutcomeRecord> read_records(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open outcome log '" + path.string() + "'");
  std::vector<OutcomeRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(from_json_line(line));
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

VerifyResult verify_records(const std::vector<OutcomeRecord>& records, double rel_tol) {
  VerifyResult v;
  for (const auto& r : records) {
    ++v.checked;
    const auto corr = build_correlation(r.network.ports_per_fa, r.network.fa_length_wavelengths);
    const auto tensor = sample_channels(r.network, corr, r.channel_seed);
    const auto h = select_ports(tensor, r.selection);
    const double wsr = compute_rates(h, r.beams, r.network).wsr;
    const double err = std::abs(wsr - r.wsr) / std::max(std::abs(r.wsr), 1e-300);
    v.max_rel_error = std::max(v.max_rel_error, err);
    const bool power_ok = check_power(r.beams, r.network).all_within();
    if (err > rel_tol || !power_ok) {
      ++v.failed;
      v.failures.push_back(r.scheme + " draw " + std::to_string(r.draw) + ": logged " +
                           std::to_string(r.wsr) + ", recomputed " + std::to_string(wsr) +
                           (power_ok ? "" : ", power budget exceeded"));
    }
  }
  return v;
}

}  // namespace fasbeam::harness
