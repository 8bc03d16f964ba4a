#include "vsm/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "vsm/error.hpp"
#include "vsm/serialize.hpp"

namespace vsm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kIndexFile = "index.vsm";
constexpr const char* kRunsFile = "runs.jsonl";
constexpr const char* kJudgmentsFile = "judgments.jsonl";
constexpr const char* kLockFile = "LOCK";

// Reads a journal and returns its records. A final line without a
// terminating newline that fails to parse is a torn write: it is dropped,
// the file is truncated back to the last complete record and a warning is
// recorded. Any other bad line is corruption.
template <typename T>
std::vector<T> read_journal(const fs::path& path, std::vector<std::string>& warnings) {
  std::vector<T> records;
  if (!fs::exists(path)) return records;
  std::string content;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
    content.assign(std::istreambuf_iterator<char>(in), {});
  }

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    ++line_no;
    const auto nl = content.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const auto line = content.substr(pos, terminated ? nl - pos : std::string::npos);
    try {
      if (!line.empty()) records.push_back(json::parse(line).get<T>());
    } catch (const std::exception& e) {
      if (terminated) {
        throw Error(ErrorCode::format,
                    path.string() + ":" + std::to_string(line_no) + ": corrupt record: " + e.what());
      }
      warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                         ": dropped truncated final record");
      fs::resize_file(path, pos);
      return records;
    }
    if (!terminated) {
      // Complete record missing only its newline.
      std::ofstream(path, std::ios::binary | std::ios::app) << '\n';
      break;
    }
    pos = nl + 1;
  }
  return records;
}

}  // namespace

Repository::Repository(fs::path root, RepositoryOptions options)
    : root_(std::move(root)), policy_(options.classification_policy) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + root_.string() + ": " + ec.message());

  const auto lock_path = root_ / kLockFile;
  lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) throw Error(ErrorCode::io, "cannot open " + lock_path.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw Error(ErrorCode::locked, root_.string() + " is in use by another process");
  }

  try {
    const auto index_path = root_ / kIndexFile;
    if (fs::exists(index_path)) {
      index_ = Index::load(index_path);
    } else {
      index_ = Index(std::move(options.pipeline));
      save_index_locked();
    }
    replay_runs();
    replay_judgments();
  } catch (...) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw;
  }
}

Repository::~Repository() {
  if (lock_fd_ >= 0) ::close(lock_fd_);  // releases the flock
}

void Repository::save_index_locked() const { index_.save(root_ / kIndexFile); }

void Repository::replay_runs() {
  std::uint64_t last = 0;
  for (auto& run : read_journal<QueryRun>(root_ / kRunsFile, warnings_)) {
    if (run.run_id.value <= last) {
      throw Error(ErrorCode::format, "runs journal ids are not strictly increasing at run " +
                                         std::to_string(run.run_id.value));
    }
    last = run.run_id.value;
    book_.add_run(std::move(run));
  }
  next_run_id_ = last + 1;
}

void Repository::replay_judgments() {
  for (const auto& j : read_journal<RelevanceJudgment>(root_ / kJudgmentsFile, warnings_)) {
    try {
      book_.apply(j);
    } catch (const Error& e) {
      throw Error(ErrorCode::integrity, "judgments journal: " + std::string(e.what()));
    }
  }
}

void Repository::append_line(const fs::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::io, "cannot append to " + path.string());
}

AddResult Repository::add_document(NewDocument doc) {
  std::unique_lock lock(index_mutex_);
  auto result = index_.add_document(std::move(doc.name), std::move(doc.classification),
                                    std::move(doc.text), policy_);
  try {
    save_index_locked();
  } catch (...) {
    index_.remove_document(result.id);
    throw;
  }
  return result;
}

std::vector<AddResult> Repository::add_documents(std::span<const NewDocument> docs) {
  std::unique_lock lock(index_mutex_);
  Index next = index_;
  std::vector<AddResult> results;
  results.reserve(docs.size());
  for (const auto& d : docs) results.push_back(next.add_document(d.name, d.classification, d.text, policy_));
  next.save(root_ / kIndexFile);
  index_ = std::move(next);
  return results;
}

Document Repository::remove_document(DocumentId id) {
  std::unique_lock lock(index_mutex_);
  Index next = index_;
  auto removed = next.remove_document(id);
  next.save(root_ / kIndexFile);
  index_ = std::move(next);
  return removed;
}

void Repository::register_classification(std::string label) {
  std::unique_lock lock(index_mutex_);
  if (index_.has_classification(label)) return;
  Index next = index_;
  next.register_classification(std::move(label));
  next.save(root_ / kIndexFile);
  index_ = std::move(next);
}

void Repository::reconfigure(Pipeline pipeline) {
  std::unique_lock lock(index_mutex_);
  Index next = index_;
  next.reconfigure(std::move(pipeline));
  next.save(root_ / kIndexFile);
  index_ = std::move(next);
}

std::vector<SearchResult> Repository::preview(const SearchRequest& request) const {
  std::shared_lock lock(index_mutex_);
  return execute(index_, request);
}

QueryRun Repository::search(const SearchRequest& request) {
  // The shared lock spans ranking and journaling so the run's documents
  // are guaranteed to exist when it is appended.
  std::shared_lock lock(index_mutex_);
  QueryRun run;
  run.request = request;
  run.results = execute(index_, request);
  run.timestamp = utc_timestamp();
  std::lock_guard eval_lock(eval_mutex_);
  run.run_id = RunId{next_run_id_.load()};
  append_run_locked(run);
  return run;
}

void Repository::append_run(const QueryRun& run) {
  std::shared_lock lock(index_mutex_);
  std::lock_guard eval_lock(eval_mutex_);
  append_run_locked(run);
}

void Repository::append_run_locked(const QueryRun& run) {
  if (run.run_id.value < next_run_id_.load()) {
    throw Error(ErrorCode::integrity,
                "run id " + std::to_string(run.run_id.value) + " is not fresh");
  }
  for (const auto& r : run.results) {
    if (!index_.contains(r.doc_id)) {
      throw Error(ErrorCode::integrity, "run " + std::to_string(run.run_id.value) +
                                            " references unknown document " +
                                            std::to_string(r.doc_id.value));
    }
  }
  append_line(root_ / kRunsFile, json(run).dump());
  book_.add_run(run);
  next_run_id_ = run.run_id.value + 1;
}

void Repository::append_judgment(const RelevanceJudgment& judgment) {
  std::lock_guard eval_lock(eval_mutex_);
  if (!book_.contains(judgment.run_id)) {
    throw Error(ErrorCode::integrity,
                "judgment references unknown run " + std::to_string(judgment.run_id.value));
  }
  if (!book_.run(judgment.run_id).contains(judgment.doc_id)) {
    throw Error(ErrorCode::integrity, "judgment references document " +
                                          std::to_string(judgment.doc_id.value) +
                                          " outside run " + std::to_string(judgment.run_id.value));
  }
  append_line(root_ / kJudgmentsFile, json(judgment).dump());
  book_.apply(judgment);
}

EvalMetrics Repository::judge(RunId run, DocumentId doc, bool relevant) {
  std::lock_guard eval_lock(eval_mutex_);
  const auto& r = book_.run(run);  // unknown_run
  if (!r.contains(doc)) {
    throw Error(ErrorCode::doc_not_in_run, "document " + std::to_string(doc.value) +
                                               " is not in run " + std::to_string(run.value));
  }
  RelevanceJudgment j{run, doc, relevant, utc_timestamp()};
  append_line(root_ / kJudgmentsFile, json(j).dump());
  return book_.judge(j.run_id, j.doc_id, j.relevant, j.judged_at);
}

EvalMetrics Repository::metrics(RunId run) const {
  std::lock_guard eval_lock(eval_mutex_);
  return book_.metrics(run);
}

QueryRun Repository::run(RunId run) const {
  std::lock_guard eval_lock(eval_mutex_);
  return book_.run(run);
}

std::vector<RelevanceJudgment> Repository::judgments(RunId run) const {
  std::lock_guard eval_lock(eval_mutex_);
  return book_.judgments(run);
}

std::size_t Repository::run_count() const {
  std::lock_guard eval_lock(eval_mutex_);
  return book_.runs().size();
}

}  // namespace vsm
