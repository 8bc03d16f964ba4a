#pragma once

// JSON views of engine values, shared by the journals, the HTTP service and
// `vsm --json` output so all three agree byte for byte.

#include <json.hpp>

#include "vsm/eval.hpp"
#include "vsm/index.hpp"
#include "vsm/search.hpp"

namespace vsm {

void to_json(nlohmann::json& j, const SearchRequest& r);
void from_json(const nlohmann::json& j, SearchRequest& r);

void to_json(nlohmann::json& j, const SearchResult& r);
void from_json(const nlohmann::json& j, SearchResult& r);

void to_json(nlohmann::json& j, const QueryRun& r);
void from_json(const nlohmann::json& j, QueryRun& r);

void to_json(nlohmann::json& j, const RelevanceJudgment& r);
void from_json(const nlohmann::json& j, RelevanceJudgment& r);

void to_json(nlohmann::json& j, const EvalMetrics& m);

/// Collection listing entry: id, name, classification, term_count.
nlohmann::json document_summary(const Document& doc);

/// Ranked results without run identity, for diffable CLI output.
nlohmann::json results_json(const SearchRequest& request,
                            const std::vector<SearchResult>& results);

}  // namespace vsm
