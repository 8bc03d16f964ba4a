#include "vsm/serialize.hpp"

namespace vsm {

using nlohmann::json;

void to_json(json& j, const SearchRequest& r) {
  j = json{{"query", r.query_text},
           {"measure", to_string(r.measure)},
           {"cosine_mode", to_string(r.cosine_mode)},
           {"classifications", r.classifications},
           {"threshold", r.threshold},
           {"limit", r.limit ? json(*r.limit) : json(nullptr)}};
}

void from_json(const json& j, SearchRequest& r) {
  r.query_text = j.at("query").get<std::string>();
  r.measure = parse_measure(j.at("measure").get<std::string>());
  r.cosine_mode = parse_cosine_mode(j.at("cosine_mode").get<std::string>());
  r.classifications.clear();
  for (const auto& c : j.at("classifications")) r.classifications.insert(c.get<std::string>());
  r.threshold = j.at("threshold").get<double>();
  const auto& limit = j.at("limit");
  r.limit = limit.is_null() ? std::nullopt : std::optional<std::size_t>(limit.get<std::size_t>());
}

void to_json(json& j, const SearchResult& r) {
  j = json{{"rank", r.rank},
           {"doc_id", r.doc_id.value},
           {"name", r.name},
           {"classification", r.classification},
           {"score", r.score}};
}

void from_json(const json& j, SearchResult& r) {
  r.rank = j.at("rank").get<std::size_t>();
  r.doc_id = DocumentId{j.at("doc_id").get<std::uint64_t>()};
  r.name = j.at("name").get<std::string>();
  r.classification = j.at("classification").get<std::string>();
  r.score = j.at("score").get<double>();
}

void to_json(json& j, const QueryRun& r) {
  j = json{{"run_id", r.run_id.value},
           {"timestamp", r.timestamp},
           {"request", r.request},
           {"results", r.results}};
}

void from_json(const json& j, QueryRun& r) {
  r.run_id = RunId{j.at("run_id").get<std::uint64_t>()};
  r.timestamp = j.at("timestamp").get<std::string>();
  r.request = j.at("request").get<SearchRequest>();
  r.results = j.at("results").get<std::vector<SearchResult>>();
}

void to_json(json& j, const RelevanceJudgment& r) {
  j = json{{"run_id", r.run_id.value},
           {"doc_id", r.doc_id.value},
           {"relevant", r.relevant},
           {"judged_at", r.judged_at}};
}

void from_json(const json& j, RelevanceJudgment& r) {
  r.run_id = RunId{j.at("run_id").get<std::uint64_t>()};
  r.doc_id = DocumentId{j.at("doc_id").get<std::uint64_t>()};
  r.relevant = j.at("relevant").get<bool>();
  r.judged_at = j.at("judged_at").get<std::string>();
}

void to_json(json& j, const EvalMetrics& m) {
  j = json{{"precision", m.precision},
           {"recall", m.recall ? json(*m.recall) : json(nullptr)},
           {"judged_count", m.judged_count},
           {"retrieved_count", m.retrieved_count},
           {"relevant_retrieved_count", m.relevant_retrieved_count}};
}

json document_summary(const Document& doc) {
  return {{"id", doc.id.value},
          {"name", doc.name},
          {"classification", doc.classification},
          {"term_count", doc.term_count()}};
}

json results_json(const SearchRequest& request, const std::vector<SearchResult>& results) {
  return {{"request", request}, {"results", results}};
}

}  // namespace vsm
