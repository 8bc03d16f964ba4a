#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "vsm/eval.hpp"
#include "vsm/index.hpp"
#include "vsm/search.hpp"

namespace vsm {

struct NewDocument {
  std::string name;
  std::string classification;
  std::string text;
};

struct RepositoryOptions {
  /// Pipeline for a repository created by open(); an existing repository
  /// keeps the pipeline recorded in its index file.
  Pipeline pipeline;
  ClassificationPolicy classification_policy = ClassificationPolicy::register_on_first_use;
};

/// Durable home of the index, query runs and judgments:
///
///   <root>/index.vsm        versioned JSON lines, rewritten via temp + rename
///   <root>/runs.jsonl       append-only, one QueryRun per line
///   <root>/judgments.jsonl  append-only, one RelevanceJudgment per line
///   <root>/LOCK             held (flock) for the lifetime of the object
///
/// Searches share the index; writes are exclusive, so a search never
/// observes a half-applied write.
class Repository {
 public:
  static constexpr int kFormatVersion = Index::kFormatVersion;

  /// Creates an empty repository when `root` has no index file. Throws
  /// Error{locked}, Error{version_mismatch}, Error{format} or Error{io}.
  explicit Repository(std::filesystem::path root, RepositoryOptions options = {});
  ~Repository();

  Repository(const Repository&) = delete;
  Repository& operator=(const Repository&) = delete;

  AddResult add_document(NewDocument doc);
  /// Adds all documents and writes the index once.
  std::vector<AddResult> add_documents(std::span<const NewDocument> docs);
  Document remove_document(DocumentId id);
  void register_classification(std::string label);
  void reconfigure(Pipeline pipeline);

  /// Executes the request against a read snapshot and journals the run.
  QueryRun search(const SearchRequest& request);
  /// Ranks without creating a run.
  std::vector<SearchResult> preview(const SearchRequest& request) const;

  /// Throws Error{integrity} when the run id is not fresh or a result
  /// names a document the index does not hold.
  void append_run(const QueryRun& run);
  /// Throws Error{integrity} when the run is unknown or the document is not
  /// in it.
  void append_judgment(const RelevanceJudgment& judgment);
  EvalMetrics judge(RunId run, DocumentId doc, bool relevant);

  EvalMetrics metrics(RunId run) const;
  QueryRun run(RunId run) const;
  std::vector<RelevanceJudgment> judgments(RunId run) const;
  std::size_t run_count() const;

  /// Calls fn(const Index&) under a shared lock.
  template <typename Fn>
  decltype(auto) read(Fn&& fn) const {
    std::shared_lock lock(index_mutex_);
    return std::forward<Fn>(fn)(std::as_const(index_));
  }

  /// Copy of the index as of now.
  Index snapshot() const { return read([](const Index& ix) { return ix; }); }

  const std::filesystem::path& root() const noexcept { return root_; }
  /// Recoverable problems met while opening (e.g. a torn journal tail).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  void save_index_locked() const;
  void replay_runs();
  void replay_judgments();
  void append_line(const std::filesystem::path& path, const std::string& line);
  void append_run_locked(const QueryRun& run);

  std::filesystem::path root_;
  ClassificationPolicy policy_;
  int lock_fd_ = -1;

  mutable std::shared_mutex index_mutex_;
  Index index_;

  mutable std::mutex eval_mutex_;
  JudgmentBook book_;
  std::atomic<std::uint64_t> next_run_id_{1};

  std::vector<std::string> warnings_;
};

}  // namespace vsm
