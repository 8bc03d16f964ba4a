#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/textpipe.hpp"

namespace vsm {

struct DocumentId {
  std::uint64_t value = 0;

  friend auto operator<=>(const DocumentId&, const DocumentId&) = default;
};

/// Normalized index term -> occurrences in one document.
using TermCounts = std::map<std::string, std::uint32_t, std::less<>>;

struct Document {
  DocumentId id;
  std::string name;
  std::string classification;
  std::string text;
  TermCounts terms;

  std::size_t term_count() const noexcept { return terms.size(); }
  friend bool operator==(const Document&, const Document&) = default;
};

struct Posting {
  DocumentId doc;
  std::uint32_t tf = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

/// Postings sorted ascending by document id, no duplicates, every tf >= 1.
struct PostingsList {
  std::string term;
  std::vector<Posting> postings;

  std::size_t df() const noexcept { return postings.size(); }
  friend bool operator==(const PostingsList&, const PostingsList&) = default;
};

struct CorpusStats {
  std::size_t n_docs = 0;
  std::size_t n_terms = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// Sparse term -> weight map. Zero weights are never stored.
class WeightedVector {
 public:
  using Entries = std::map<std::string, double, std::less<>>;

  WeightedVector() = default;
  WeightedVector(std::initializer_list<Entries::value_type> entries);

  /// Throws Error{bad_parameter} for negative or non-finite weights; a zero
  /// weight erases the entry.
  void set(std::string term, double weight);
  double get(std::string_view term) const noexcept;

  const Entries& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  friend bool operator==(const WeightedVector&, const WeightedVector&) = default;

 private:
  Entries entries_;
};

enum class ClassificationPolicy { register_on_first_use, strict };

struct AddResult {
  DocumentId id;
  std::size_t term_count = 0;  // distinct index terms
  bool empty = false;          // nothing survived the pipeline
};

/// Inverted file plus the stored documents it was built from. Weights are
/// derived on demand from (tf, df, N) so they never go stale.
///
/// Const member functions do not mutate and may run concurrently; mutation
/// requires exclusive access.
class Index {
 public:
  static constexpr int kFormatVersion = 1;

  Index();
  explicit Index(Pipeline pipeline);

  AddResult add_document(std::string name, std::string classification, std::string text,
                         ClassificationPolicy policy = ClassificationPolicy::register_on_first_use);
  Document remove_document(DocumentId id);

  void register_classification(std::string label);
  bool has_classification(std::string_view label) const;
  const std::set<std::string, std::less<>>& classifications() const noexcept {
    return classifications_;
  }

  /// Rebuilds every document's terms and all postings under a new pipeline.
  void reconfigure(Pipeline pipeline);

  std::uint32_t tf(std::string_view term, DocumentId id) const;
  std::size_t df(std::string_view term) const noexcept;
  /// log10(N / df); 0 for terms not in the vocabulary. Throws
  /// Error{empty_corpus} when N = 0.
  double idf(std::string_view term) const;
  double weight(std::string_view term, DocumentId id) const;
  WeightedVector doc_vector(DocumentId id) const;
  /// Sum of squared weights of the document's vector.
  double squared_norm(DocumentId id) const;

  CorpusStats stats() const noexcept { return {documents_.size(), postings_.size()}; }
  const PostingsList* postings(std::string_view term) const noexcept;
  const std::map<std::string, PostingsList, std::less<>>& all_postings() const noexcept {
    return postings_;
  }
  const std::map<DocumentId, Document>& documents() const noexcept { return documents_; }
  const Document& document(DocumentId id) const;
  bool contains(DocumentId id) const noexcept { return documents_.contains(id); }
  /// Lowest id whose document carries `name`, if any.
  std::optional<DocumentId> find_by_name(std::string_view name) const noexcept;

  const Pipeline& pipeline() const noexcept { return pipeline_; }
  std::uint64_t next_id() const noexcept { return next_id_; }

  /// Writes a versioned JSON-lines file via temp file + rename.
  void save(const std::filesystem::path& path) const;
  /// Throws Error{io}, Error{format} or Error{version_mismatch}; never
  /// returns a partially loaded index.
  static Index load(const std::filesystem::path& path);

  friend bool operator==(const Index&, const Index&) = default;

 private:
  TermCounts count_terms(std::string_view text) const;
  void insert_postings(const Document& doc);
  const Document& require(DocumentId id) const;

  Pipeline pipeline_;
  std::map<DocumentId, Document> documents_;
  std::map<std::string, PostingsList, std::less<>> postings_;
  std::set<std::string, std::less<>> classifications_;
  std::uint64_t next_id_ = 1;
};

}  // namespace vsm
