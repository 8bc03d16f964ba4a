#include "vsm/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <unordered_map>

#include "vsm/error.hpp"

namespace vsm {

void SearchRequest::validate() const {
  if (!std::isfinite(threshold) || threshold < 0.0) {
    throw Error(ErrorCode::bad_parameter, "threshold must be a finite value >= 0");
  }
  if (limit && *limit == 0) throw Error(ErrorCode::bad_parameter, "limit must be >= 1");
}

bool QueryRun::contains(DocumentId id) const noexcept {
  return std::any_of(results.begin(), results.end(),
                     [id](const SearchResult& r) { return r.doc_id == id; });
}

QueryVector build_query_vector(const Index& index, std::string_view query_text) {
  if (index.stats().n_docs == 0) throw Error(ErrorCode::empty_corpus, "corpus is empty");
  TermCounts counts;
  for (auto& t : index.pipeline().run(query_text)) ++counts[std::move(t.surface)];

  QueryVector q;
  for (const auto& [term, tf] : counts) q.max_tf = std::max(q.max_tf, tf);
  for (const auto& [term, tf] : counts) {
    const double idf = index.idf(term);
    if (idf == 0.0) continue;
    q.raw.set(term, idf);
    q.cosine_normalized.set(term, static_cast<double>(tf) / q.max_tf * idf);
  }
  return q;
}

namespace {

struct Accumulator {
  double inner_raw = 0.0;
  double inner_normalized = 0.0;
};

struct IdHash {
  std::size_t operator()(DocumentId id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};

}  // namespace

std::vector<SearchResult> execute(const Index& index, const SearchRequest& request) {
  request.validate();
  for (const auto& label : request.classifications) {
    if (!index.has_classification(label)) {
      throw Error(ErrorCode::unknown_classification, "unknown classification '" + label + "'");
    }
  }
  const QueryVector q = build_query_vector(index, request.query_text);

  // Term-at-a-time accumulation over the query terms' postings. Terms are
  // visited in sorted order so sums are reproducible.
  std::unordered_map<DocumentId, Accumulator, IdHash> acc;
  for (const auto& [term, q_raw] : q.raw) {
    const auto* list = index.postings(term);
    if (list == nullptr) continue;
    const double idf = index.idf(term);
    const double q_norm = q.cosine_normalized.get(term);
    for (const auto& p : list->postings) {
      const double w = p.tf * idf;
      auto& a = acc[p.doc];
      a.inner_raw += w * q_raw;
      a.inner_normalized += w * q_norm;
    }
  }

  const double q_raw_sq = squared_norm(q.raw);
  const double q_norm_sq = squared_norm(q.cosine_normalized);

  std::vector<SearchResult> results;
  results.reserve(acc.size());
  for (const auto& [id, a] : acc) {
    const auto& doc = index.document(id);
    if (!request.classifications.empty() &&
        !request.classifications.contains(doc.classification)) {
      continue;
    }
    double s = 0.0;
    switch (request.measure) {
      case Measure::inner_product:
        s = a.inner_raw;
        break;
      case Measure::cosine:
        s = cosine_from_parts(request.cosine_mode == CosineMode::paper_compat
                                  ? a.inner_raw
                                  : a.inner_normalized,
                              index.squared_norm(id), q_norm_sq);
        break;
      case Measure::jaccard:
        s = jaccard_from_parts(a.inner_raw, index.squared_norm(id), q_raw_sq);
        break;
      case Measure::dice:
        s = dice_from_parts(a.inner_raw, index.squared_norm(id), q_raw_sq);
        break;
    }
    if (s > request.threshold) {
      results.push_back({0, id, doc.name, doc.classification, s});
    }
  }

  std::sort(results.begin(), results.end(), [](const SearchResult& x, const SearchResult& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.doc_id < y.doc_id;
  });
  if (request.limit && results.size() > *request.limit) results.resize(*request.limit);
  for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = i + 1;
  return results;
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace vsm
