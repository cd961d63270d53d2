#include "fasbeam/harness/config_file.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "fasbeam/errors.hpp"

namespace fasbeam::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("bad value '" + value + "' for " + key + " (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "-inf") return -INFINITY;
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad(key, raw, "a number");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    bad(key, raw, "a non-negative integer");
  return out;
}

std::size_t to_size(const std::string& key, const std::string& raw) {
  return static_cast<std::size_t>(to_u64(key, raw));
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad(key, raw, "true or false");
}

std::vector<std::string> split(const std::string& raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = raw.find(',', start);
    const std::string item = trim(raw.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename F>
auto to_list(const std::string& key, const std::string& raw, F convert) {
  std::vector<decltype(convert(key, raw))> out;
  for (const auto& item : split(raw)) out.push_back(convert(key, item));
  if (out.empty()) bad(key, raw, "a comma-separated list");
  return out;
}

using Handler = std::function<void(ExperimentSpec&, const std::string&, const std::string&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = [] {
    std::map<std::string, Handler> t;
    // experiment
    t["experiment.scenario"] = [](auto& s, auto&, auto& v) { s.scenario = trim(v); };
    t["experiment.preset"] = [](auto& s, auto&, auto& v) { apply_preset(s, parse_preset(trim(v))); };
    t["experiment.schemes"] = [](auto& s, auto& k, auto& v) {
      s.schemes.clear();
      for (const auto& name : split(v)) s.schemes.push_back(parse_scheme(name));
      if (s.schemes.empty()) bad(k, v, "a list of schemes");
    };
    t["experiment.trials_random_max"] = [](auto& s, auto& k, auto& v) {
      s.trials_random_max = to_size(k, v);
    };
    t["experiment.trials_exhaustive"] = [](auto& s, auto& k, auto& v) {
      s.trials_exhaustive = to_size(k, v);
    };
    t["experiment.sweep"] = [](auto& s, auto&, auto& v) { s.sweep = parse_sweep(trim(v)); };
    t["experiment.sweep_values"] = [](auto& s, auto& k, auto& v) {
      s.sweep_values = to_list(k, v, to_double);
    };
    t["experiment.draws"] = [](auto& s, auto& k, auto& v) { s.draws = to_size(k, v); };
    t["experiment.seed"] = [](auto& s, auto& k, auto& v) { s.seed = to_u64(k, v); };
    t["experiment.out"] = [](auto& s, auto&, auto& v) { s.out = trim(v); };
    t["experiment.model_dir"] = [](auto& s, auto&, auto& v) { s.model_dir = trim(v); };
    t["experiment.log_outcomes"] = [](auto& s, auto& k, auto& v) {
      s.log_outcomes = to_bool(k, v);
    };
    // network
    t["network.cells"] = [](auto& s, auto& k, auto& v) {
      s.network.num_cells = to_size(k, v);
      if (s.network.ues_per_cell.size() != s.network.num_cells && !s.network.ues_per_cell.empty())
        s.network.ues_per_cell.assign(s.network.num_cells, s.network.ues_per_cell.front());
    };
    t["network.ues"] = [](auto& s, auto& k, auto& v) {
      auto list = to_list(k, v, to_size);
      if (list.size() == 1) list.assign(s.network.num_cells, list.front());
      s.network.ues_per_cell = list;
    };
    t["network.fas"] = [](auto& s, auto& k, auto& v) { s.network.fas_per_bs = to_size(k, v); };
    t["network.ports"] = [](auto& s, auto& k, auto& v) { s.network.ports_per_fa = to_size(k, v); };
    t["network.fa_length_wavelengths"] = [](auto& s, auto& k, auto& v) {
      s.network.fa_length_wavelengths = to_double(k, v);
    };
    t["network.tx_power_dbm"] = [](auto& s, auto& k, auto& v) {
      s.network.tx_power_dbm = to_double(k, v);
    };
    t["network.noise_dbm"] = [](auto& s, auto& k, auto& v) {
      s.network.noise_dbm = to_double(k, v);
    };
    t["network.weights"] = [](auto& s, auto& k, auto& v) {
      const auto flat = to_list(k, v, to_double);
      const auto& n = s.network;
      if (flat.size() != n.total_ues()) bad(k, v, "one weight per UE, cell by cell");
      s.network.rate_weights.clear();
      std::size_t pos = 0;
      for (std::size_t i = 0; i < n.num_cells; ++i) {
        s.network.rate_weights.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                                            flat.begin() +
                                                static_cast<std::ptrdiff_t>(pos + n.num_ues(i)));
        pos += n.num_ues(i);
      }
    };
    t["network.distance_min_m"] = [](auto& s, auto& k, auto& v) {
      s.network.ue_distance_range.min_m = to_double(k, v);
    };
    t["network.distance_max_m"] = [](auto& s, auto& k, auto& v) {
      s.network.ue_distance_range.max_m = to_double(k, v);
    };
    t["network.ref_distance_m"] = [](auto& s, auto& k, auto& v) {
      s.network.ref_distance_m = to_double(k, v);
    };
    t["network.ref_pathloss_db"] = [](auto& s, auto& k, auto& v) {
      s.network.ref_pathloss_db = to_double(k, v);
    };
    t["network.pathloss_db_per_decade"] = [](auto& s, auto& k, auto& v) {
      s.network.pathloss_exponent_coeff = to_double(k, v);
    };
    // train
    t["train.epochs"] = [](auto& s, auto& k, auto& v) { s.train.epochs = to_size(k, v); };
    t["train.samples_per_epoch"] = [](auto& s, auto& k, auto& v) {
      s.train.samples_per_epoch = to_size(k, v);
    };
    t["train.batch_size"] = [](auto& s, auto& k, auto& v) { s.train.batch_size = to_size(k, v); };
    t["train.eval_samples"] = [](auto& s, auto& k, auto& v) {
      s.train.eval_samples = to_size(k, v);
    };
    t["train.lr"] = [](auto& s, auto& k, auto& v) { s.train.adam.lr = to_double(k, v); };
    t["train.lr_decay"] = [](auto& s, auto& k, auto& v) { s.train.adam.decay = to_double(k, v); };
    t["train.lr_decay_interval"] = [](auto& s, auto& k, auto& v) {
      s.train.adam.decay_interval = to_size(k, v);
    };
    // rps
    t["rps.trials"] = [](auto& s, auto& k, auto& v) { s.rps_trials = to_list(k, v, to_size); };
    t["rps.draws"] = [](auto& s, auto& k, auto& v) { s.rps_draws = to_size(k, v); };
    // sched
    t["sched.tasks"] = [](auto& s, auto& k, auto& v) { s.sched_tasks = to_list(k, v, to_size); };
    t["sched.ues"] = [](auto& s, auto& k, auto& v) { s.sched_ues = to_size(k, v); };
    t["sched.preset"] = [](auto& s, auto&, auto& v) { s.sched_preset = parse_preset(trim(v)); };
    t["sched.bus_bits"] = [](auto& s, auto& k, auto& v) {
      s.accel.offchip_bus_bits = to_size(k, v);
    };
    t["sched.weight_bytes"] = [](auto& s, auto& k, auto& v) {
      s.accel.weight_bytes_per_value = to_size(k, v);
    };
    t["sched.activation_bytes"] = [](auto& s, auto& k, auto& v) {
      s.accel.activation_bytes_per_value = to_size(k, v);
    };
    t["sched.macs_per_cycle"] = [](auto& s, auto& k, auto& v) {
      s.accel.macs_per_cycle = to_double(k, v);
    };
    t["sched.onchip_buffer_bytes"] = [](auto& s, auto& k, auto& v) {
      s.accel.onchip_buffer_bytes = to_size(k, v);
    };
    t["sched.clock_period_ns"] = [](auto& s, auto& k, auto& v) {
      s.accel.clock_period_ns = to_double(k, v);
    };
    t["sched.phase_overhead_cycles"] = [](auto& s, auto& k, auto& v) {
      s.accel.phase_overhead_cycles = to_size(k, v);
    };
    t["sched.instruction_bytes"] = [](auto& s, auto& k, auto& v) {
      s.accel.instruction_bytes = to_size(k, v);
    };
    return t;
  }();
  return table;
}

}  // namespace

Settings read_settings(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  Settings out;
  for (const auto& [name, node] : tree) {
    if (node.empty() && !node.data().empty())
      throw ConfigError(path.string() + ": key '" + name + "' must sit inside a [section]");
    for (const auto& [key, leaf] : node) out.emplace_back(name + "." + key, leaf.data());
  }
  return out;
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("expected section.key=value, got '" + text + "'");
  const std::string key = trim(text.substr(0, eq));
  if (key.find('.') == std::string::npos)
    throw ConfigError("setting '" + key + "' needs a section prefix, e.g. network." + key);
  return {key, trim(text.substr(eq + 1))};
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  const auto& t = handlers();
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError("unknown setting '" + key + "'");
  it->second(spec, key, value);
}

ExperimentSpec build_spec(const Settings& settings, std::optional<GnnPreset> preset_flag) {
  ExperimentSpec spec;
  GnnPreset preset = GnnPreset::kDesk;
  for (const auto& [k, v] : settings)
    if (k == "experiment.preset") preset = parse_preset(trim(v));
  if (preset_flag) preset = *preset_flag;
  apply_preset(spec, preset);
  for (const auto& [k, v] : settings)
    if (k != "experiment.preset") apply_setting(spec, k, v);
  spec.validate();
  return spec;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& [k, h] : handlers()) out.push_back(k);
  return out;
}

}  // namespace fasbeam::harness
