#include "appraisal/errors.hpp"

namespace appraisal {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::missing_column: return "MissingColumn";
    case Errc::duplicate_column: return "DuplicateColumn";
    case Errc::non_utf8: return "NonUtf8";
    case Errc::empty_input: return "EmptyInput";
    case Errc::mixed_cities: return "MixedCities";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::batch_too_small: return "BatchTooSmall";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::bad_dim: return "BadDim";
    case Errc::non_positive_price: return "NonPositivePrice";
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::zero_variance_targets: return "ZeroVarianceTargets";
    case Errc::fine_tune_set_empty: return "FineTuneSetEmpty";
    case Errc::kind_mismatch: return "KindMismatch";
    case Errc::version_mismatch: return "VersionMismatch";
    case Errc::corrupt_checkpoint: return "CorruptCheckpoint";
    case Errc::io_error: return "IoError";
    case Errc::bad_spec: return "BadSpec";
  }
  return "Unknown";
}

}  // namespace appraisal
