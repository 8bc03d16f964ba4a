// vsm: command-line front end over a repository directory.
//
// Exit codes: 0 success, 1 failure or partial failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

#include "vsm/error.hpp"
#include "vsm/eval.hpp"
#include "vsm/serialize.hpp"
#include "vsm/service.hpp"
#include "vsm/store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::size_t display_width(std::string_view s) {
  // Count codepoints: continuation bytes do not start a new column.
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

/// Text table; numeric columns are right-aligned.
class Table {
 public:
  Table(std::vector<std::string> header, std::vector<bool> numeric)
      : header_(std::move(header)), numeric_(std::move(numeric)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  bool empty() const { return rows_.empty(); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width(header_.size());
    for (std::size_t c = 0; c < header_.size(); ++c) width[c] = display_width(header_[c]);
    for (const auto& row : rows_)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_width(row[c]));
    auto line = [&](const std::vector<std::string>& row) {
      std::string text;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const std::string pad(width[c] - display_width(row[c]), ' ');
        if (c > 0) text += "  ";
        text += numeric_[c] ? pad + row[c] : row[c] + (c + 1 < row.size() ? pad : "");
      }
      out << text << '\n';
    };
    line(header_);
    for (const auto& row : rows_) line(row);
  }

 private:
  std::vector<std::string> header_;
  std::vector<bool> numeric_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fixed3(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

void print_warnings(const vsm::Repository& repo) {
  for (const auto& w : repo.warnings()) std::cerr << "warning: " << w << '\n';
}

vsm::RepositoryOptions options_for(const std::string& stoplist) {
  vsm::RepositoryOptions opts;
  if (!stoplist.empty()) opts.pipeline = vsm::Pipeline({}, vsm::StopList::resolve(stoplist));
  return opts;
}

// ---- index ---------------------------------------------------------------

struct IndexArgs {
  std::string dir;
  std::string repo;
  std::string classification = "general";
  std::string stoplist;
  bool json = false;
};

int run_index(const IndexArgs& args) {
  std::error_code ec;
  if (!fs::is_directory(args.dir, ec)) {
    std::cerr << "error: cannot read directory " << args.dir << '\n';
    return kExitFailure;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(args.dir, ec)) {
    if (entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (ec) {
    std::cerr << "error: cannot list " << args.dir << ": " << ec.message() << '\n';
    return kExitFailure;
  }
  std::sort(files.begin(), files.end());

  vsm::Repository repo(args.repo, options_for(args.stoplist));
  print_warnings(repo);
  if (!args.stoplist.empty()) {
    vsm::Pipeline wanted(repo.read([](const vsm::Index& ix) { return ix.pipeline().normalizer(); }),
                         vsm::StopList::resolve(args.stoplist));
    if (!(repo.read([](const vsm::Index& ix) { return ix.pipeline(); }) == wanted)) {
      std::cerr << "note: stop list changed; reindexing existing documents\n";
      repo.reconfigure(std::move(wanted));
    }
  }

  std::vector<vsm::NewDocument> docs;
  std::vector<std::string> failures;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::string text;
    if (in) text.assign(std::istreambuf_iterator<char>(in), {});
    if (!in.is_open() || in.bad()) {
      failures.push_back(path.string() + ": unreadable");
      continue;
    }
    if (!vsm::is_valid_utf8(text)) {
      failures.push_back(path.string() + ": not valid UTF-8");
      continue;
    }
    docs.push_back({path.stem().string(), args.classification, std::move(text)});
  }
  if (files.empty()) std::cerr << "warning: no .txt files in " << args.dir << '\n';

  const auto added = repo.add_documents(docs);
  const auto n_docs = repo.read([](const vsm::Index& ix) { return ix.stats().n_docs; });

  if (args.json) {
    json out = {{"added", json::array()}, {"failures", failures}, {"n_docs", n_docs}};
    for (std::size_t i = 0; i < added.size(); ++i) {
      out["added"].push_back({{"name", docs[i].name},
                              {"doc_id", added[i].id.value},
                              {"term_count", added[i].term_count},
                              {"empty", added[i].empty}});
    }
    std::cout << out.dump(2) << '\n';
  } else {
    Table table({"Doc ID", "Document Name", "Terms"}, {true, false, true});
    for (std::size_t i = 0; i < added.size(); ++i) {
      table.add({std::to_string(added[i].id.value), docs[i].name,
                 std::to_string(added[i].term_count)});
    }
    if (!table.empty()) table.print(std::cout);
    for (const auto& f : failures) std::cerr << "failed: " << f << '\n';
    std::cout << "N=" << n_docs << '\n';
  }
  return failures.empty() ? kExitOk : kExitFailure;
}

// ---- search --------------------------------------------------------------

struct SearchArgs {
  std::string query;
  std::string repo;
  std::string measure = "cosine";
  double threshold = 0.0;
  std::vector<std::string> classes;
  std::string cosine_mode = "consistent";
  std::size_t limit = 0;
  bool json = false;
};

void print_results(const std::vector<vsm::SearchResult>& results) {
  Table table({"Rank", "Document Name", "Classification", "Similarity"},
              {true, false, false, true});
  for (const auto& r : results) {
    table.add({std::to_string(r.rank), r.name, r.classification, fixed3(r.score)});
  }
  table.print(std::cout);
}

int run_search(const SearchArgs& args) {
  vsm::SearchRequest request;
  request.query_text = args.query;
  request.measure = vsm::parse_measure(args.measure);
  request.cosine_mode = vsm::parse_cosine_mode(args.cosine_mode);
  request.threshold = args.threshold;
  request.classifications.insert(args.classes.begin(), args.classes.end());
  if (args.limit > 0) request.limit = args.limit;
  request.validate();

  vsm::Repository repo(args.repo);
  print_warnings(repo);
  const auto results = repo.preview(request);
  if (args.json) {
    std::cout << vsm::results_json(request, results).dump(2) << '\n';
  } else {
    print_results(results);
  }
  return kExitOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string repo;
  std::string queries;
  std::string qrels;
  std::vector<std::string> measures{"cosine"};
  std::string cosine_mode = "consistent";
  double threshold = 0.0;
  bool json = false;
};

int run_eval(const EvalArgs& args) {
  std::vector<vsm::Measure> measures;
  for (const auto& m : args.measures) {
    if (m == "all") {
      measures.assign(std::begin(vsm::kAllMeasures), std::end(vsm::kAllMeasures));
    } else {
      measures.push_back(vsm::parse_measure(m));
    }
  }
  const auto mode = vsm::parse_cosine_mode(args.cosine_mode);
  const auto queries = vsm::read_queries(args.queries);
  const auto qrels = vsm::read_qrels(args.qrels);

  vsm::Repository repo(args.repo);
  print_warnings(repo);
  const auto index = repo.snapshot();

  bool skipped = false;
  json out = json::array();
  for (auto measure : measures) {
    std::map<std::string, vsm::QueryRun> runs;
    for (const auto& q : queries) {
      vsm::QueryRun run;
      run.request.query_text = q.text;
      run.request.measure = measure;
      run.request.cosine_mode = mode;
      run.request.threshold = args.threshold;
      run.results = vsm::execute(index, run.request);
      runs.emplace(q.query_id, std::move(run));
    }
    const auto report = vsm::batch_eval(qrels, runs, index);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    skipped = skipped || !report.warnings.empty();

    if (args.json) {
      json per_query = json::array();
      for (const auto& qe : report.per_query) {
        per_query.push_back({{"query_id", qe.query_id},
                             {"metrics", qe.metrics},
                             {"total_relevant", qe.total_relevant},
                             {"ranking", qe.ranking}});
      }
      out.push_back({{"measure", vsm::to_string(measure)},
                     {"per_query", per_query},
                     {"mean_precision", report.mean_precision},
                     {"mean_recall", report.mean_recall ? json(*report.mean_recall) : json(nullptr)},
                     {"warnings", report.warnings}});
      continue;
    }
    std::cout << "measure: " << vsm::to_string(measure) << '\n';
    Table table({"Query", "Retrieved", "Relevant Retrieved", "Total Relevant", "Precision",
                 "Recall", "Ranking"},
                {false, true, true, true, true, true, false});
    for (const auto& qe : report.per_query) {
      std::string ranking;
      for (const auto& name : qe.ranking) ranking += (ranking.empty() ? "" : " ") + name;
      table.add({qe.query_id, std::to_string(qe.metrics.retrieved_count),
                 std::to_string(qe.metrics.relevant_retrieved_count),
                 std::to_string(qe.total_relevant), fixed3(qe.metrics.precision),
                 qe.metrics.recall ? fixed3(*qe.metrics.recall) : "-", ranking});
    }
    table.add({"mean", "", "", "", fixed3(report.mean_precision),
               report.mean_recall ? fixed3(*report.mean_recall) : "-", ""});
    table.print(std::cout);
    std::cout << '\n';
  }
  if (args.json) std::cout << out.dump(2) << '\n';
  return skipped ? kExitFailure : kExitOk;
}

// ---- show ----------------------------------------------------------------

struct ShowArgs {
  std::string repo;
  std::string term;
  std::string doc;
  bool json = false;
};

vsm::DocumentId resolve_doc(const vsm::Index& ix, const std::string& ref) {
  if (auto by_name = ix.find_by_name(ref)) return *by_name;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), value);
  if (ec == std::errc{} && ptr == ref.data() + ref.size()) return vsm::DocumentId{value};
  throw vsm::Error(vsm::ErrorCode::unknown_document, "no document named '" + ref + "'");
}

int run_show(const ShowArgs& args) {
  vsm::Repository repo(args.repo);
  print_warnings(repo);
  return repo.read([&](const vsm::Index& ix) {
    const auto stats = ix.stats();
    json out = {{"n_docs", stats.n_docs}, {"n_terms", stats.n_terms}};
    auto idf_or_zero = [&](std::string_view t) { return stats.n_docs == 0 ? 0.0 : ix.idf(t); };

    if (!args.term.empty()) {
      const auto term = vsm::normalize(args.term, ix.pipeline().normalizer());
      json postings = json::array();
      if (const auto* list = ix.postings(term)) {
        for (const auto& p : list->postings) {
          postings.push_back({{"doc_id", p.doc.value},
                              {"name", ix.document(p.doc).name},
                              {"tf", p.tf},
                              {"weight", ix.weight(term, p.doc)}});
        }
      }
      out["term"] = {{"term", term}, {"df", ix.df(term)}, {"idf", idf_or_zero(term)},
                     {"postings", postings}};
    }
    if (!args.doc.empty()) {
      const auto id = resolve_doc(ix, args.doc);
      const auto& doc = ix.document(id);
      json terms = json::array();
      for (const auto& [term, tf] : doc.terms) {
        terms.push_back({{"term", term}, {"tf", tf}, {"idf", ix.idf(term)},
                         {"weight", ix.weight(term, id)}});
      }
      out["doc"] = vsm::document_summary(doc);
      out["doc"]["terms"] = terms;
    }
    if (args.term.empty() && args.doc.empty()) out["classifications"] = ix.classifications();

    if (args.json) {
      std::cout << out.dump(2) << '\n';
      return kExitOk;
    }
    std::cout << "N=" << stats.n_docs << " vocabulary=" << stats.n_terms << '\n';
    if (out.contains("term")) {
      const auto& t = out["term"];
      std::cout << "term " << t["term"].get<std::string>() << "  df " << t["df"].get<std::size_t>()
                << "  idf " << fixed3(t["idf"].get<double>()) << '\n';
      Table table({"Doc ID", "Document Name", "TF", "Weight"}, {true, false, true, true});
      for (const auto& p : t["postings"]) {
        table.add({std::to_string(p["doc_id"].get<std::uint64_t>()), p["name"].get<std::string>(),
                   std::to_string(p["tf"].get<std::uint32_t>()), fixed3(p["weight"].get<double>())});
      }
      table.print(std::cout);
    }
    if (out.contains("doc")) {
      const auto& d = out["doc"];
      std::cout << "document " << d["id"].get<std::uint64_t>() << "  " << d["name"].get<std::string>()
                << "  [" << d["classification"].get<std::string>() << "]  "
                << d["term_count"].get<std::size_t>() << " terms\n";
      Table table({"Term", "TF", "IDF", "Weight"}, {false, true, true, true});
      for (const auto& t : d["terms"]) {
        table.add({t["term"].get<std::string>(), std::to_string(t["tf"].get<std::uint32_t>()),
                   fixed3(t["idf"].get<double>()), fixed3(t["weight"].get<double>())});
      }
      table.print(std::cout);
    }
    if (out.contains("classifications")) {
      for (const auto& c : out["classifications"]) std::cout << "class " << c.get<std::string>() << '\n';
    }
    return kExitOk;
  });
}

// ---- serve ---------------------------------------------------------------

struct ServeArgs {
  std::string repo;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cosine_mode = "consistent";
  bool strict = false;
  std::vector<std::string> classes;
  std::string static_dir;
  std::string stoplist;
};

vsm::Service* g_service = nullptr;

int run_serve(const ServeArgs& args) {
  auto opts = options_for(args.stoplist);
  opts.classification_policy = args.strict ? vsm::ClassificationPolicy::strict
                                           : vsm::ClassificationPolicy::register_on_first_use;
  vsm::Repository repo(args.repo, std::move(opts));
  print_warnings(repo);
  for (const auto& c : args.classes) repo.register_classification(c);

  vsm::ServiceConfig config;
  config.default_cosine_mode = vsm::parse_cosine_mode(args.cosine_mode);
  if (!args.static_dir.empty()) config.static_dir = args.static_dir;
  vsm::Service service(repo, config);
  if (!service.bind(args.host, args.port)) {
    std::cerr << "error: cannot listen on " << args.host << ':' << args.port << '\n';
    return kExitFailure;
  }
  g_service = &service;
  std::signal(SIGINT, [](int) { if (g_service) g_service->stop(); });
  std::signal(SIGTERM, [](int) { if (g_service) g_service->stop(); });
  std::cerr << "listening on http://" << args.host << ':' << args.port << '\n';
  service.listen_after_bind();
  g_service = nullptr;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector space model retrieval engine"};
  app.require_subcommand(1);

  IndexArgs index_args;
  auto* index_cmd = app.add_subcommand("index", "Ingest every *.txt file in a directory");
  index_cmd->add_option("dir", index_args.dir, "Directory of .txt documents")->required();
  index_cmd->add_option("--repo", index_args.repo, "Repository directory")->required()->envname("VSM_REPO");
  index_cmd->add_option("--class", index_args.classification, "Classification label")->capture_default_str();
  index_cmd->add_option("--stoplist", index_args.stoplist,
                        "Stop list file or built-in name (arabic, english, none, arabic+english)");
  index_cmd->add_flag("--json", index_args.json, "JSON output");

  SearchArgs search_args;
  auto* search_cmd = app.add_subcommand("search", "Rank documents against a query");
  search_cmd->add_option("query", search_args.query, "Query text")->required();
  search_cmd->add_option("--repo", search_args.repo, "Repository directory")->required()->envname("VSM_REPO");
  search_cmd->add_option("--measure", search_args.measure, "inner_product | cosine | jaccard | dice")
      ->capture_default_str();
  search_cmd->add_option("--threshold", search_args.threshold, "Keep scores strictly above this")
      ->capture_default_str();
  search_cmd->add_option("--class", search_args.classes, "Restrict to classification (repeatable)");
  search_cmd->add_option("--cosine-mode", search_args.cosine_mode, "paper_compat | consistent")
      ->capture_default_str();
  search_cmd->add_option("--limit", search_args.limit, "Maximum results (0 = all)");
  search_cmd->add_flag("--json", search_args.json, "JSON output");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Precision/recall of queries against qrels");
  eval_cmd->add_option("--repo", eval_args.repo, "Repository directory")->required()->envname("VSM_REPO");
  eval_cmd->add_option("--queries", eval_args.queries, "query_id<TAB>text per line")->required();
  eval_cmd->add_option("--qrels", eval_args.qrels, "query_id<TAB>doc_name<TAB>0|1 per line")->required();
  eval_cmd->add_option("--measure", eval_args.measures, "Measure(s) to evaluate, or 'all'")
      ->capture_default_str();
  eval_cmd->add_option("--cosine-mode", eval_args.cosine_mode, "paper_compat | consistent")
      ->capture_default_str();
  eval_cmd->add_option("--threshold", eval_args.threshold, "Retrieval threshold")->capture_default_str();
  eval_cmd->add_flag("--json", eval_args.json, "JSON output");

  ShowArgs show_args;
  auto* show_cmd = app.add_subcommand("show", "Dump postings, tf, idf and weights");
  show_cmd->add_option("--repo", show_args.repo, "Repository directory")->required()->envname("VSM_REPO");
  show_cmd->add_option("--term", show_args.term, "Term to inspect");
  show_cmd->add_option("--doc", show_args.doc, "Document name or id");
  show_cmd->add_flag("--json", show_args.json, "JSON output");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--repo", serve_args.repo, "Repository directory")->required()->envname("VSM_REPO");
  serve_cmd->add_option("--host", serve_args.host, "Listen address")->capture_default_str()->envname("VSM_HOST");
  serve_cmd->add_option("--port", serve_args.port, "Listen port")->capture_default_str()->envname("VSM_PORT");
  serve_cmd->add_option("--cosine-mode", serve_args.cosine_mode, "Default cosine mode")
      ->capture_default_str()
      ->envname("VSM_COSINE_MODE");
  serve_cmd->add_flag("--strict", serve_args.strict, "Reject unregistered classifications")
      ->envname("VSM_STRICT");
  serve_cmd->add_option("--classes", serve_args.classes, "Classifications to register")->delimiter(',');
  serve_cmd->add_option("--static-dir", serve_args.static_dir, "Web client directory served at /")
      ->envname("VSM_STATIC_DIR");
  serve_cmd->add_option("--stoplist", serve_args.stoplist, "Stop list for a new repository");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*index_cmd) return run_index(index_args);
    if (*search_cmd) return run_search(search_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*show_cmd) return run_show(show_args);
    if (*serve_cmd) return run_serve(serve_args);
  } catch (const vsm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case vsm::ErrorCode::bad_measure:
      case vsm::ErrorCode::bad_parameter:
      case vsm::ErrorCode::malformed_request:
        return kExitUsage;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
