#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "appraisal/csv.hpp"
#include "appraisal/errors.hpp"
#include "appraisal/protocol.hpp"
#include "appraisal/reports.hpp"
#include "appraisal/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace appraisal;

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitDataError = 3;
constexpr int kExitTrainingFailure = 4;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::bad_spec:
    case Errc::bad_dim:
      return kExitBadArgs;
    default:
      return kExitDataError;
  }
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_manifest(const fs::path& out_dir, RunManifest manifest, const Timer& timer) {
  manifest.duration_seconds = timer.seconds();
  write_text_file((out_dir / "manifest.json").string(), to_json(manifest).dump(2) + "\n");
}

std::vector<PropertyRecord> load_clean_csv(const std::string& path) {
  auto [raws, parse_errors] = parse_records(read_text_file(path));
  for (const auto& e : parse_errors) {
    std::cerr << path << ": row " << e.row_index << ": " << e.cause << "\n";
  }
  auto [records, report] = clean(raws);
  if (report.dropped() > 0) {
    std::cerr << path << ": dropped " << report.dropped() << "/" << report.total << " rows (";
    bool first = true;
    for (const auto& [cause, count] : report.dropped_by_cause) {
      if (!first) std::cerr << ", ";
      std::cerr << drop_cause_name(cause) << "=" << count;
      first = false;
    }
    std::cerr << ")\n";
  }
  if (records.empty()) throw Error(Errc::empty_dataset, "no valid rows in '" + path + "'");
  return records;
}

bool checkpoint_is_finite(const ModelCheckpoint& ckpt) {
  auto refs = std::visit([](const auto& m) { return all_state(m); }, ckpt.model);
  for (const auto& ref : refs) {
    for (Index i = 0; i < ref.size; ++i) {
      if (!std::isfinite(ref.data[i])) return false;
    }
  }
  return true;
}

ModelKind parse_kind(const std::string& name) {
  if (name == "hft_hlf") return ModelKind::hft_hlf;
  if (name == "traditional") return ModelKind::traditional;
  throw Error(Errc::bad_spec, "unknown model kind '" + name + "'");
}

int cmd_synth(const std::string& spec_path, const std::string& out, std::uint64_t seed,
              bool seed_given) {
  Timer timer;
  UniverseSpec spec =
      spec_path.empty() ? default_universe_spec() : universe_spec_from_json(read_text_file(spec_path));
  if (seed_given) spec.seed = seed;

  fs::create_directories(out);
  Universe uni = generate_universe(spec);

  std::vector<std::string> outputs;
  for (const auto& [city, records] : uni.cities) {
    fs::path path = fs::path(out) / (city + ".csv");
    write_text_file(path.string(), records_to_csv(records));
    outputs.push_back(path.string());
    std::cout << "wrote " << path.string() << " (" << records.size() << " records)\n";
  }

  RunManifest manifest;
  manifest.command = "synth";
  if (!spec_path.empty()) manifest.inputs.push_back(spec_path);
  manifest.outputs = outputs;
  manifest.config = json::parse(universe_spec_to_json(spec));
  manifest.seed = spec.seed;
  write_manifest(out, manifest, timer);
  return 0;
}

int cmd_train(const std::string& csv_path, const std::string& model_name, int tier, int cv_folds,
              std::uint64_t seed, const std::string& out) {
  Timer timer;
  ModelKind kind = parse_kind(model_name);
  TrainConfig config = TrainConfig::tier(tier);
  config.seed = seed;

  auto records = load_clean_csv(csv_path);
  fs::create_directories(out);

  json report;
  report["command"] = "train";
  report["config"] = json{{"model", model_name},
                          {"tier", tier},
                          {"learning_rate", config.learning_rate},
                          {"batch_size", config.batch_size},
                          {"epochs", config.epochs},
                          {"seed", seed}};

  if (cv_folds > 0) {
    CvResult cv = monte_carlo_cv(records, kind, config, cv_folds);
    report["cv"] = to_json(cv);
  } else {
    auto [train_recs, test_recs] = split_train_test(records, 0.1, seed);
    TrainConfig fold_config = config;
    ModelCheckpoint fold_ckpt = fit_supervised(train_recs, kind, fold_config);
    MetricsReport metrics = evaluate(fold_ckpt, test_recs);
    report["holdout"] = to_json(metrics);
  }

  // The shipped checkpoint is refit on every cleaned record.
  ModelCheckpoint final_ckpt = fit_supervised(records, kind, config);
  if (!checkpoint_is_finite(final_ckpt)) {
    std::cerr << "training diverged: non-finite parameters\n";
    return kExitTrainingFailure;
  }

  fs::path ckpt_path = fs::path(out) / "model.hfthlf.json";
  fs::path report_path = fs::path(out) / "report.json";
  save_checkpoint(final_ckpt, ckpt_path.string());
  write_text_file(report_path.string(), report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";

  RunManifest manifest;
  manifest.command = "train";
  manifest.inputs = {csv_path};
  manifest.outputs = {ckpt_path.string(), report_path.string()};
  manifest.config = report["config"];
  manifest.seed = seed;
  write_manifest(out, manifest, timer);
  return 0;
}

int cmd_transfer(const std::string& source_path, const std::string& target_csv, std::size_t k,
                 int tier, std::uint64_t seed, const std::string& out) {
  Timer timer;
  ModelCheckpoint source = load_checkpoint(source_path);
  TrainConfig config = TrainConfig::tier(tier);
  config.seed = seed;

  auto target = load_clean_csv(target_csv);
  fs::create_directories(out);

  TransferOptions opts;
  opts.k = k;
  TransferResult result = transfer_from_checkpoint(source, target, opts, config, seed);
  if (!checkpoint_is_finite(result.fine_tuned)) {
    std::cerr << "fine-tuning diverged: non-finite parameters\n";
    return kExitTrainingFailure;
  }

  json report;
  report["command"] = "transfer";
  report["config"] = json{{"k", k},
                          {"tier", tier},
                          {"learning_rate", config.learning_rate},
                          {"batch_size", config.batch_size},
                          {"epochs", config.epochs},
                          {"seed", seed},
                          {"source_checkpoint", source_path}};
  report["result"] = transfer_report_json(result, k);

  fs::path ckpt_path = fs::path(out) / "model.hfthlf.json";
  fs::path report_path = fs::path(out) / "report.json";
  save_checkpoint(result.fine_tuned, ckpt_path.string());
  write_text_file(report_path.string(), report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";

  RunManifest manifest;
  manifest.command = "transfer";
  manifest.inputs = {source_path, target_csv};
  manifest.outputs = {ckpt_path.string(), report_path.string()};
  manifest.config = report["config"];
  manifest.seed = seed;
  write_manifest(out, manifest, timer);
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& csv_path, std::uint64_t seed,
             const std::string& out) {
  Timer timer;
  ModelCheckpoint ckpt = load_checkpoint(ckpt_path);
  auto records = load_clean_csv(csv_path);
  MetricsReport metrics = evaluate(ckpt, records);

  json report;
  report["command"] = "eval";
  report["config"] = json{{"checkpoint", ckpt_path}, {"csv", csv_path}};
  report["metrics"] = to_json(metrics);
  std::cout << report.dump(2) << "\n";

  fs::create_directories(out);
  fs::path report_path = fs::path(out) / "report.json";
  write_text_file(report_path.string(), report.dump(2) + "\n");

  RunManifest manifest;
  manifest.command = "eval";
  manifest.inputs = {ckpt_path, csv_path};
  manifest.outputs = {report_path.string()};
  manifest.config = report["config"];
  manifest.seed = seed;
  write_manifest(out, manifest, timer);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-city property appraisal: transferable backbone over "
               "city-invariant features, per-city fine-tuning head"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic multi-city dataset");
  std::string synth_spec, synth_out;
  synth->add_option("--spec", synth_spec, "Universe spec JSON (defaults built in)");
  synth->add_option("--out", synth_out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train a supervised single-city model");
  std::string train_csv, train_model = "hft_hlf", train_out;
  int train_tier = 3, train_cv = 0;
  train->add_option("csv", train_csv, "Listings CSV")->required();
  train->add_option("--model", train_model, "hft_hlf | traditional")->capture_default_str();
  train->add_option("--tier", train_tier, "City tier preset (1, 2 or 3)")->capture_default_str();
  train->add_option("--cv", train_cv, "Monte-Carlo cross-validation fold count");
  train->add_option("--out", train_out, "Output directory")->required();

  auto* transfer = app.add_subcommand("transfer", "Fine-tune a pre-trained model on a new city");
  std::string transfer_source, transfer_csv, transfer_out;
  std::size_t transfer_k = 10;
  int transfer_tier = 3;
  transfer->add_option("--source", transfer_source, "Source checkpoint (.hfthlf.json)")->required();
  transfer->add_option("--target", transfer_csv, "Target city CSV")->required();
  transfer->add_option("--k", transfer_k, "Records per residence")->capture_default_str();
  transfer->add_option("--tier", transfer_tier, "Target tier preset")->capture_default_str();
  transfer->add_option("--out", transfer_out, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a CSV");
  std::string eval_ckpt, eval_csv, eval_out = ".";
  eval->add_option("--ckpt", eval_ckpt, "Checkpoint path")->required();
  eval->add_option("--csv", eval_csv, "Listings CSV")->required();
  eval->add_option("--out", eval_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadArgs;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(synth_spec, synth_out, seed, app.count("--seed") > 0);
    }
    if (train->parsed()) {
      return cmd_train(train_csv, train_model, train_tier, train_cv, seed, train_out);
    }
    if (transfer->parsed()) {
      return cmd_transfer(transfer_source, transfer_csv, transfer_k, transfer_tier, seed,
                          transfer_out);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_ckpt, eval_csv, seed, eval_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitBadArgs;
}
