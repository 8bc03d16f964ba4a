#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/index.hpp"
#include "vsm/similarity.hpp"

namespace vsm {

struct RunId {
  std::uint64_t value = 0;

  friend auto operator<=>(const RunId&, const RunId&) = default;
};

struct SearchRequest {
  std::string query_text;
  Measure measure = Measure::cosine;
  std::set<std::string, std::less<>> classifications;  // empty = all
  double threshold = 0.0;                               // strict: score > threshold
  std::optional<std::size_t> limit;
  CosineMode cosine_mode = CosineMode::consistent;

  /// Throws Error{bad_parameter} for a negative/non-finite threshold or a
  /// zero limit.
  void validate() const;

  friend bool operator==(const SearchRequest&, const SearchRequest&) = default;
};

struct SearchResult {
  std::size_t rank = 0;  // 1-based
  DocumentId doc_id;
  std::string name;
  std::string classification;
  double score = 0.0;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

/// A ranked list bound to an id so judgments can refer to it after the
/// index changes.
struct QueryRun {
  RunId run_id;
  SearchRequest request;
  std::vector<SearchResult> results;
  std::string timestamp;  // UTC, ISO 8601

  bool contains(DocumentId id) const noexcept;
  friend bool operator==(const QueryRun&, const QueryRun&) = default;
};

/// Pipelines the query text with the index's config and weights each
/// surviving term. Out-of-vocabulary terms are dropped. Throws
/// Error{empty_corpus}.
QueryVector build_query_vector(const Index& index, std::string_view query_text);

/// Scores the union of the query terms' postings (term-at-a-time),
/// filters by classification and threshold, and ranks by descending score
/// with ascending doc id breaking ties. Throws Error{empty_corpus},
/// Error{unknown_classification} or Error{bad_parameter}.
std::vector<SearchResult> execute(const Index& index, const SearchRequest& request);

/// Current time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp();

}  // namespace vsm
