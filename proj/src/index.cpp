#include "vsm/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "vsm/error.hpp"

namespace vsm {
namespace {

using nlohmann::json;

std::string id_text(DocumentId id) { return std::to_string(id.value); }

}  // namespace

WeightedVector::WeightedVector(std::initializer_list<Entries::value_type> entries) {
  for (const auto& [term, w] : entries) set(term, w);
}

void WeightedVector::set(std::string term, double weight) {
  if (!std::isfinite(weight) || weight < 0.0) {
    throw Error(ErrorCode::bad_parameter, "weight for '" + term + "' must be finite and >= 0");
  }
  if (weight == 0.0) {
    entries_.erase(term);
  } else {
    entries_.insert_or_assign(std::move(term), weight);
  }
}

double WeightedVector::get(std::string_view term) const noexcept {
  auto it = entries_.find(term);
  return it == entries_.end() ? 0.0 : it->second;
}

Index::Index() = default;

Index::Index(Pipeline pipeline) : pipeline_(std::move(pipeline)) {}

TermCounts Index::count_terms(std::string_view text) const {
  TermCounts counts;
  for (auto& t : pipeline_.run(text)) ++counts[std::move(t.surface)];
  return counts;
}

void Index::insert_postings(const Document& doc) {
  for (const auto& [term, tf] : doc.terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) it = postings_.emplace(term, PostingsList{term, {}}).first;
    auto& list = it->second.postings;
    auto pos = std::lower_bound(list.begin(), list.end(), doc.id,
                                [](const Posting& p, DocumentId id) { return p.doc < id; });
    list.insert(pos, Posting{doc.id, tf});
  }
}

void Index::register_classification(std::string label) {
  if (label.empty()) throw Error(ErrorCode::bad_parameter, "classification label is empty");
  classifications_.insert(std::move(label));
}

bool Index::has_classification(std::string_view label) const {
  return classifications_.find(label) != classifications_.end();
}

AddResult Index::add_document(std::string name, std::string classification, std::string text,
                              ClassificationPolicy policy) {
  if (!has_classification(classification)) {
    if (policy == ClassificationPolicy::strict) {
      throw Error(ErrorCode::unknown_classification,
                  "unknown classification '" + classification + "'");
    }
    register_classification(classification);
  }
  Document doc{DocumentId{next_id_}, std::move(name), std::move(classification),
               std::move(text), {}};
  doc.terms = count_terms(doc.text);
  ++next_id_;
  insert_postings(doc);
  AddResult result{doc.id, doc.terms.size(), doc.terms.empty()};
  documents_.emplace(doc.id, std::move(doc));
  return result;
}

Document Index::remove_document(DocumentId id) {
  auto it = documents_.find(id);
  if (it == documents_.end()) {
    throw Error(ErrorCode::unknown_document, "unknown document id " + id_text(id));
  }
  Document doc = std::move(it->second);
  documents_.erase(it);
  for (const auto& [term, tf] : doc.terms) {
    auto pit = postings_.find(term);
    if (pit == postings_.end()) continue;
    std::erase_if(pit->second.postings, [id](const Posting& p) { return p.doc == id; });
    if (pit->second.postings.empty()) postings_.erase(pit);
  }
  return doc;
}

void Index::reconfigure(Pipeline pipeline) {
  pipeline_ = std::move(pipeline);
  postings_.clear();
  for (auto& [id, doc] : documents_) {
    doc.terms = count_terms(doc.text);
    insert_postings(doc);
  }
}

const Document& Index::require(DocumentId id) const {
  auto it = documents_.find(id);
  if (it == documents_.end()) {
    throw Error(ErrorCode::unknown_document, "unknown document id " + id_text(id));
  }
  return it->second;
}

const Document& Index::document(DocumentId id) const { return require(id); }

std::optional<DocumentId> Index::find_by_name(std::string_view name) const noexcept {
  for (const auto& [id, doc] : documents_) {
    if (doc.name == name) return id;
  }
  return std::nullopt;
}

const PostingsList* Index::postings(std::string_view term) const noexcept {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

std::uint32_t Index::tf(std::string_view term, DocumentId id) const {
  const auto& doc = require(id);
  auto it = doc.terms.find(term);
  return it == doc.terms.end() ? 0 : it->second;
}

std::size_t Index::df(std::string_view term) const noexcept {
  const auto* list = postings(term);
  return list ? list->df() : 0;
}

double Index::idf(std::string_view term) const {
  if (documents_.empty()) throw Error(ErrorCode::empty_corpus, "corpus is empty");
  const auto n = df(term);
  if (n == 0) return 0.0;
  return std::log10(static_cast<double>(documents_.size()) / static_cast<double>(n));
}

double Index::weight(std::string_view term, DocumentId id) const {
  const auto count = tf(term, id);
  return count == 0 ? 0.0 : count * idf(term);
}

WeightedVector Index::doc_vector(DocumentId id) const {
  WeightedVector v;
  for (const auto& [term, count] : require(id).terms) v.set(term, count * idf(term));
  return v;
}

double Index::squared_norm(DocumentId id) const {
  double sum = 0.0;
  for (const auto& [term, count] : require(id).terms) {
    const double w = count * idf(term);
    sum += w * w;
  }
  return sum;
}

// Persistence: one header record, then documents, then postings lists.

void Index::save(const std::filesystem::path& path) const {
  const auto& norm = pipeline_.normalizer();
  json header = {
      {"type", "header"},
      {"format", "vsm-index"},
      {"version", kFormatVersion},
      {"next_id", next_id_},
      {"stats", {{"n_docs", documents_.size()}, {"n_terms", postings_.size()}}},
      {"pipeline",
       {{"normalizer",
         {{"strip_diacritics", norm.strip_diacritics},
          {"unify_alef_forms", norm.unify_alef_forms},
          {"strip_tatweel", norm.strip_tatweel},
          {"case_fold", norm.case_fold}}},
        {"stoplist",
         {{"source", pipeline_.stoplist().source()}, {"words", pipeline_.stoplist().words()}}}}},
      {"classifications", classifications_},
  };

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    out << header.dump() << '\n';
    for (const auto& [id, doc] : documents_) {
      out << json{{"type", "document"},
                  {"id", id.value},
                  {"name", doc.name},
                  {"classification", doc.classification},
                  {"text", doc.text}}
                 .dump()
          << '\n';
    }
    for (const auto& [term, list] : postings_) {
      json entries = json::array();
      for (const auto& p : list.postings) entries.push_back({p.doc.value, p.tf});
      out << json{{"type", "postings"}, {"term", term}, {"df", list.df()}, {"postings", entries}}
                 .dump()
          << '\n';
    }
    out.flush();
    if (!out) throw Error(ErrorCode::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot replace " + path.string() + ": " + ec.message());
}

Index Index::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());

  auto fail = [&](std::size_t line_no, const std::string& what) -> Error {
    return Error(ErrorCode::format,
                 path.string() + ":" + std::to_string(line_no) + ": " + what);
  };

  std::string line;
  std::size_t line_no = 0;
  std::vector<json> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) throw fail(line_no, "not a JSON object");
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw fail(0, "missing header");

  try {
    const auto& header = records.front();
    if (header.value("type", "") != "header" || header.value("format", "") != "vsm-index") {
      throw fail(1, "not a vsm index header");
    }
    const int version = header.at("version").get<int>();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::version_mismatch,
                  path.string() + ": index format version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kFormatVersion) + ")");
    }

    const auto& pj = header.at("pipeline");
    const auto& nj = pj.at("normalizer");
    NormalizerConfig norm{nj.at("strip_diacritics").get<bool>(),
                          nj.at("unify_alef_forms").get<bool>(),
                          nj.at("strip_tatweel").get<bool>(), nj.at("case_fold").get<bool>()};
    const auto words = pj.at("stoplist").at("words").get<std::vector<std::string>>();
    Index ix(Pipeline(
        norm, StopList::from_words(words, pj.at("stoplist").at("source").get<std::string>(), norm)));
    for (const auto& label : header.at("classifications")) {
      ix.register_classification(label.get<std::string>());
    }

    std::map<std::string, PostingsList, std::less<>> stored;
    for (std::size_t i = 1; i < records.size(); ++i) {
      const auto& rec = records[i];
      const auto type = rec.at("type").get<std::string>();
      if (type == "document") {
        Document doc{DocumentId{rec.at("id").get<std::uint64_t>()},
                     rec.at("name").get<std::string>(),
                     rec.at("classification").get<std::string>(),
                     rec.at("text").get<std::string>(),
                     {}};
        if (!ix.has_classification(doc.classification)) {
          throw fail(i + 1, "document uses unregistered classification");
        }
        doc.terms = ix.count_terms(doc.text);
        ix.insert_postings(doc);
        if (!ix.documents_.emplace(doc.id, std::move(doc)).second) {
          throw fail(i + 1, "duplicate document id");
        }
      } else if (type == "postings") {
        PostingsList list{rec.at("term").get<std::string>(), {}};
        for (const auto& p : rec.at("postings")) {
          list.postings.push_back({DocumentId{p.at(0).get<std::uint64_t>()},
                                   p.at(1).get<std::uint32_t>()});
        }
        if (rec.at("df").get<std::size_t>() != list.df()) throw fail(i + 1, "df mismatch");
        auto term = list.term;
        stored.emplace(std::move(term), std::move(list));
      } else {
        throw fail(i + 1, "unknown record type '" + type + "'");
      }
    }

    // The stored postings must agree with a recount of the stored texts.
    if (stored != ix.postings_) throw fail(0, "postings do not match document texts");
    const auto& stats = header.at("stats");
    if (stats.at("n_docs").get<std::size_t>() != ix.documents_.size() ||
        stats.at("n_terms").get<std::size_t>() != ix.postings_.size()) {
      throw fail(1, "corpus statistics do not match contents");
    }
    ix.next_id_ = header.at("next_id").get<std::uint64_t>();
    if (!ix.documents_.empty() && ix.documents_.rbegin()->first.value >= ix.next_id_) {
      throw fail(1, "id counter behind stored documents");
    }
    return ix;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, path.string() + ": " + e.what());
  }
}

}  // namespace vsm
