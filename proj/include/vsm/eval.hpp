#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsm/index.hpp"
#include "vsm/search.hpp"

namespace vsm {

struct RelevanceJudgment {
  RunId run_id;
  DocumentId doc_id;
  bool relevant = false;
  std::string judged_at;

  friend bool operator==(const RelevanceJudgment&, const RelevanceJudgment&) = default;
};

struct EvalMetrics {
  double precision = 0.0;
  std::optional<double> recall;
  std::size_t judged_count = 0;
  std::size_t retrieved_count = 0;
  std::size_t relevant_retrieved_count = 0;

  friend bool operator==(const EvalMetrics&, const EvalMetrics&) = default;
};

/// relevant_retrieved / retrieved, 0 when nothing was retrieved.
double precision_of(std::size_t relevant_retrieved, std::size_t retrieved) noexcept;
/// Throws Error{zero_total_relevant} or Error{inconsistent_counts}.
double recall_of(std::size_t relevant_retrieved, std::size_t total_relevant);

/// Query runs and the relevance judgments attached to them. Unjudged
/// results count as not relevant. Not synchronized; the owner serializes
/// writers.
class JudgmentBook {
 public:
  /// Throws Error{integrity} when the run id is already present.
  void add_run(QueryRun run);

  /// Upserts the verdict for (run, doc). Throws Error{unknown_run} or
  /// Error{doc_not_in_run}.
  EvalMetrics judge(RunId run, DocumentId doc, bool relevant, std::string judged_at = {});
  void apply(const RelevanceJudgment& j) {
    judge(j.run_id, j.doc_id, j.relevant, j.judged_at);
  }

  EvalMetrics metrics(RunId run) const;
  double precision(RunId run) const { return metrics(run).precision; }
  double recall(RunId run, std::size_t total_relevant) const;

  const QueryRun& run(RunId run) const;
  bool contains(RunId run) const noexcept { return runs_.contains(run); }
  std::vector<RelevanceJudgment> judgments(RunId run) const;
  const std::map<RunId, QueryRun>& runs() const noexcept { return runs_; }

 private:
  std::map<RunId, QueryRun> runs_;
  std::map<RunId, std::map<DocumentId, RelevanceJudgment>> judgments_;
};

// Batch evaluation against external relevance files.

struct Qrel {
  std::string query_id;
  std::string doc_name;
  bool relevant = false;
};

struct QueryEntry {
  std::string query_id;
  std::string text;
};

/// `query_id<TAB>doc_name<TAB>0|1` per line, '#' comments, blank lines
/// skipped. Throws Error{format} naming the offending line.
std::vector<Qrel> parse_qrels(std::istream& in);
std::vector<Qrel> read_qrels(const std::filesystem::path& path);

/// `query_id<TAB>query text` per line, '#' comments, blank lines skipped.
std::vector<QueryEntry> parse_queries(std::istream& in);
std::vector<QueryEntry> read_queries(const std::filesystem::path& path);

struct QueryEval {
  std::string query_id;
  EvalMetrics metrics;
  std::size_t total_relevant = 0;
  std::vector<std::string> ranking;  // retrieved document names in rank order
};

struct BatchEval {
  std::vector<QueryEval> per_query;
  double mean_precision = 0.0;
  std::optional<double> mean_recall;  // over queries with known recall
  std::vector<std::string> warnings;  // skipped queries
};

/// Evaluates each query id's run against the qrels. A query whose qrels
/// name a document missing from the index is skipped with a warning.
/// Throws Error{empty_qrels}.
BatchEval batch_eval(std::span<const Qrel> qrels, const std::map<std::string, QueryRun>& runs,
                     const Index& index);

}  // namespace vsm
