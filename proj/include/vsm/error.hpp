#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vsm {

enum class ErrorCode {
  malformed_request,
  bad_measure,
  bad_parameter,
  unknown_classification,
  unknown_document,
  unknown_run,
  doc_not_in_run,
  empty_corpus,
  zero_total_relevant,
  inconsistent_counts,
  integrity,
  unresolvable_document,
  empty_qrels,
  io,
  format,
  version_mismatch,
  locked,
};

/// Stable machine-readable name, e.g. "unknown_run".
std::string_view to_string(ErrorCode code) noexcept;

/// Every failure the engine reports carries one of the codes above; the
/// service maps each code to a single HTTP status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vsm
