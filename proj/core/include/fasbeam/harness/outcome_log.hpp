#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fasbeam/channel.hpp"
#include "fasbeam/metrics.hpp"
#include "fasbeam/network_config.hpp"

namespace fasbeam::harness {

// One evaluated (scheme, draw): enough to regenerate the channel and recheck
// the rate without the model.
struct OutcomeRecord {
  std::string scheme;
  double sweep_value = 0.0;
  std::size_t draw = 0;
  std::uint64_t channel_seed = 0;
  NetworkConfig network;
  PortSelection selection;
  BeamformingSet beams;
  double wsr = 0.0;
};

std::string to_json_line(const OutcomeRecord& r);
OutcomeRecord from_json_line(const std::string& line);

void append_records(const std::filesystem::path& path, const std::vector<OutcomeRecord>& records);
std::vector<OutcomeRecord> read_records(const std::filesystem::path& path);

struct VerifyResult {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double max_rel_error = 0.0;
  std::vector<std::string> failures;
};

// Regenerates each channel from its seed and recomputes rate and power.
VerifyResult verify_records(const std::vector<OutcomeRecord>& records, double rel_tol = 1e-9);

}  // namespace fasbeam::harness
