#include "adaudit/common/error.hpp"

namespace adaudit {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_record: return "MalformedRecord";
    case Errc::snapshot_finalized: return "SnapshotFinalized";
    case Errc::window_violation: return "WindowViolation";
    case Errc::service_unavailable: return "ServiceUnavailable";
    case Errc::quota_exceeded: return "QuotaExceeded";
    case Errc::cassette_miss: return "CassetteMiss";
    case Errc::no_labels: return "NoLabels";
    case Errc::unknown_false_positive: return "UnknownFalsePositive";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::precondition: return "PreconditionFailed";
    case Errc::undefined_for_single_cluster: return "UndefinedForSingleCluster";
    case Errc::no_surviving_runs: return "NoSurvivingRuns";
    case Errc::sample_too_small: return "SampleTooSmall";
    case Errc::duplicate_session: return "DuplicateSession";
    case Errc::unknown_session: return "UnknownSession";
    case Errc::already_labeled: return "AlreadyLabeled";
    case Errc::unknown_task: return "UnknownTask";
    case Errc::label_not_in_choice_set: return "LabelNotInChoiceSet";
    case Errc::incomplete: return "Incomplete";
    case Errc::kappa_undefined: return "KappaUndefined";
    case Errc::inconsistent_counts: return "InconsistentCounts";
    case Errc::missing_upstream: return "MissingUpstream";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::io: return "IoError";
  }
  return "Unknown";
}

void fail(Errc code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace adaudit
