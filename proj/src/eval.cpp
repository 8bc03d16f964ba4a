#include "vsm/eval.hpp"

#include <fstream>
#include <istream>
#include <set>

#include "vsm/error.hpp"

namespace vsm {

double precision_of(std::size_t relevant_retrieved, std::size_t retrieved) noexcept {
  return retrieved == 0 ? 0.0
                        : static_cast<double>(relevant_retrieved) / static_cast<double>(retrieved);
}

double recall_of(std::size_t relevant_retrieved, std::size_t total_relevant) {
  if (total_relevant == 0) {
    throw Error(ErrorCode::zero_total_relevant, "recall is undefined with zero relevant documents");
  }
  if (relevant_retrieved > total_relevant) {
    throw Error(ErrorCode::inconsistent_counts,
                std::to_string(relevant_retrieved) + " relevant retrieved exceeds total relevant " +
                    std::to_string(total_relevant));
  }
  return static_cast<double>(relevant_retrieved) / static_cast<double>(total_relevant);
}

void JudgmentBook::add_run(QueryRun run) {
  const auto id = run.run_id;
  if (!runs_.emplace(id, std::move(run)).second) {
    throw Error(ErrorCode::integrity, "duplicate run id " + std::to_string(id.value));
  }
}

const QueryRun& JudgmentBook::run(RunId id) const {
  auto it = runs_.find(id);
  if (it == runs_.end()) {
    throw Error(ErrorCode::unknown_run, "unknown run " + std::to_string(id.value));
  }
  return it->second;
}

EvalMetrics JudgmentBook::judge(RunId id, DocumentId doc, bool relevant, std::string judged_at) {
  const auto& r = run(id);
  if (!r.contains(doc)) {
    throw Error(ErrorCode::doc_not_in_run, "document " + std::to_string(doc.value) +
                                               " is not in run " + std::to_string(id.value));
  }
  judgments_[id].insert_or_assign(doc, RelevanceJudgment{id, doc, relevant, std::move(judged_at)});
  return metrics(id);
}

EvalMetrics JudgmentBook::metrics(RunId id) const {
  const auto& r = run(id);
  EvalMetrics m;
  m.retrieved_count = r.results.size();
  if (auto it = judgments_.find(id); it != judgments_.end()) {
    m.judged_count = it->second.size();
    for (const auto& [doc, j] : it->second) m.relevant_retrieved_count += j.relevant ? 1 : 0;
  }
  m.precision = precision_of(m.relevant_retrieved_count, m.retrieved_count);
  return m;
}

double JudgmentBook::recall(RunId id, std::size_t total_relevant) const {
  return recall_of(metrics(id).relevant_retrieved_count, total_relevant);
}

std::vector<RelevanceJudgment> JudgmentBook::judgments(RunId id) const {
  run(id);
  std::vector<RelevanceJudgment> out;
  if (auto it = judgments_.find(id); it != judgments_.end()) {
    for (const auto& [doc, j] : it->second) out.push_back(j);
  }
  return out;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line, std::size_t max_fields) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (fields.size() + 1 < max_fields) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) break;
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  fields.push_back(line.substr(start));
  return fields;
}

bool skip_line(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto first = line.find_first_not_of(" \t");
  return first == std::string::npos || line[first] == '#';
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  return in;
}

}  // namespace

std::vector<Qrel> parse_qrels(std::istream& in) {
  std::vector<Qrel> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto f = split_tabs(line, 3);
    if (f.size() != 3 || f[0].empty() || f[1].empty() || (f[2] != "0" && f[2] != "1")) {
      throw Error(ErrorCode::format, "qrels line " + std::to_string(line_no) +
                                         ": expected query_id<TAB>doc_name<TAB>0|1");
    }
    out.push_back({std::move(f[0]), std::move(f[1]), f[2] == "1"});
  }
  return out;
}

std::vector<Qrel> read_qrels(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_qrels(in);
}

std::vector<QueryEntry> parse_queries(std::istream& in) {
  std::vector<QueryEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto f = split_tabs(line, 2);
    if (f.size() != 2 || f[0].empty()) {
      throw Error(ErrorCode::format,
                  "queries line " + std::to_string(line_no) + ": expected query_id<TAB>text");
    }
    out.push_back({std::move(f[0]), std::move(f[1])});
  }
  return out;
}

std::vector<QueryEntry> read_queries(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_queries(in);
}

BatchEval batch_eval(std::span<const Qrel> qrels, const std::map<std::string, QueryRun>& runs,
                     const Index& index) {
  if (qrels.empty()) throw Error(ErrorCode::empty_qrels, "qrels are empty");

  struct Truth {
    std::set<std::string, std::less<>> relevant;
    std::set<std::string, std::less<>> judged;
    std::vector<std::string> missing;
  };
  std::map<std::string, Truth, std::less<>> truth;
  for (const auto& q : qrels) {
    auto& t = truth[q.query_id];
    t.judged.insert(q.doc_name);
    if (q.relevant) t.relevant.insert(q.doc_name);
    if (!index.find_by_name(q.doc_name)) t.missing.push_back(q.doc_name);
  }

  BatchEval out;
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  std::size_t recall_count = 0;
  for (const auto& [query_id, run] : runs) {
    static const Truth kNoTruth;
    auto it = truth.find(query_id);
    const Truth& t = it == truth.end() ? kNoTruth : it->second;
    if (!t.missing.empty()) {
      out.warnings.push_back("query " + query_id + " skipped: qrels name unknown document '" +
                             t.missing.front() + "'");
      continue;
    }
    QueryEval qe;
    qe.query_id = query_id;
    qe.total_relevant = t.relevant.size();
    qe.metrics.retrieved_count = run.results.size();
    for (const auto& r : run.results) {
      qe.ranking.push_back(r.name);
      if (t.judged.contains(r.name)) ++qe.metrics.judged_count;
      if (t.relevant.contains(r.name)) ++qe.metrics.relevant_retrieved_count;
    }
    qe.metrics.precision =
        precision_of(qe.metrics.relevant_retrieved_count, qe.metrics.retrieved_count);
    if (qe.total_relevant > 0) {
      qe.metrics.recall = recall_of(qe.metrics.relevant_retrieved_count, qe.total_relevant);
      recall_sum += *qe.metrics.recall;
      ++recall_count;
    }
    precision_sum += qe.metrics.precision;
    out.per_query.push_back(std::move(qe));
  }
  if (!out.per_query.empty()) {
    out.mean_precision = precision_sum / static_cast<double>(out.per_query.size());
  }
  if (recall_count > 0) out.mean_recall = recall_sum / static_cast<double>(recall_count);
  return out;
}

}  // namespace vsm
