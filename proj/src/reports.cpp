#include "appraisal/reports.hpp"

namespace appraisal {

using json = nlohmann::json;

json to_json(const MetricsReport& report) {
  return json{{"rmse", report.rmse}, {"mape", report.mape}, {"r2", report.r2}, {"n", report.n}};
}

json to_json(const CvResult& result) {
  json folds = json::array();
  for (const auto& f : result.folds) folds.push_back(to_json(f));
  return json{{"folds", folds}, {"mean", to_json(result.mean)}};
}

json transfer_report_json(const TransferResult& result, std::size_t k) {
  json j{{"k", k},
         {"fine_tune_size", result.fine_tune_size},
         {"test_size", result.test_size},
         {"transfer", to_json(result.transfer)}};
  if (result.scratch) j["scratch"] = to_json(*result.scratch);
  return j;
}

json to_json(const RunManifest& manifest) {
  return json{{"command", manifest.command},
              {"inputs", manifest.inputs},
              {"outputs", manifest.outputs},
              {"config", manifest.config},
              {"seed", manifest.seed},
              {"tool_version", kToolVersion},
              {"duration_seconds", manifest.duration_seconds}};
}

}  // namespace appraisal
