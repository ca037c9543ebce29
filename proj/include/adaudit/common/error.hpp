#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adaudit {

/// Error categories surfaced by the toolkit. Every failure that crosses a
/// module boundary is an adaudit::Error carrying one of these codes.
enum class Errc {
  malformed_record,
  snapshot_finalized,
  window_violation,
  service_unavailable,
  quota_exceeded,
  cassette_miss,
  no_labels,
  unknown_false_positive,
  too_few_points,
  dimension_mismatch,
  precondition,
  undefined_for_single_cluster,
  no_surviving_runs,
  sample_too_small,
  duplicate_session,
  unknown_session,
  already_labeled,
  unknown_task,
  label_not_in_choice_set,
  incomplete,
  kappa_undefined,
  inconsistent_counts,
  missing_upstream,
  config_invalid,
  io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(Errc::precondition, what);
}

}  // namespace adaudit
