#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "appraisal/protocol.hpp"

namespace appraisal {

inline constexpr const char* kToolVersion = "1.0.0";

nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const CvResult& result);

// Transfer report without the embedded checkpoint.
nlohmann::json transfer_report_json(const TransferResult& result, std::size_t k);

// Every run writes one of these next to its outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  nlohmann::json config;
  std::uint64_t seed = 0;
  double duration_seconds = 0.0;
};

nlohmann::json to_json(const RunManifest& manifest);

}  // namespace appraisal
