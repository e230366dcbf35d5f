#pragma once

#include <stdexcept>
#include <string>

namespace appraisal {

enum class Errc {
  // csv / ingest
  missing_column,
  duplicate_column,
  non_utf8,
  empty_input,
  mixed_cities,
  // neural / model
  shape_mismatch,
  batch_too_small,
  length_mismatch,
  bad_dim,
  // encode
  non_positive_price,
  // protocol
  empty_dataset,
  too_few_samples,
  zero_variance_targets,
  fine_tune_set_empty,
  // checkpoint / io
  kind_mismatch,
  version_mismatch,
  corrupt_checkpoint,
  io_error,
  // synth / cli
  bad_spec,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace appraisal
