#include "vsm/error.hpp"

namespace vsm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::malformed_request: return "malformed_request";
    case ErrorCode::bad_measure: return "bad_measure";
    case ErrorCode::bad_parameter: return "bad_parameter";
    case ErrorCode::unknown_classification: return "unknown_classification";
    case ErrorCode::unknown_document: return "unknown_document";
    case ErrorCode::unknown_run: return "unknown_run";
    case ErrorCode::doc_not_in_run: return "doc_not_in_run";
    case ErrorCode::empty_corpus: return "empty_corpus";
    case ErrorCode::zero_total_relevant: return "zero_total_relevant";
    case ErrorCode::inconsistent_counts: return "inconsistent_counts";
    case ErrorCode::integrity: return "integrity";
    case ErrorCode::unresolvable_document: return "unresolvable_document";
    case ErrorCode::empty_qrels: return "empty_qrels";
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::locked: return "locked";
  }
  return "unknown";
}

}  // namespace vsm
