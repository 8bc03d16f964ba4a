// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check recomputes its evidence from the engine directly.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/golden.hpp"
#include "support/live_service.hpp"
#include "support/oracle.hpp"
#include "vsm/error.hpp"
#include "vsm/eval.hpp"
#include "vsm/search.hpp"
#include "vsm/similarity.hpp"

using namespace vsm;
using nlohmann::json;

namespace {

/// Collects failed expectations for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << ": got " << got << ", want " << want << " ±" << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
  void rel(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << ": got " << got << ", want " << want;
    expect(std::abs(got - want) <= tol * std::max(std::abs(want), 1e-300), s.str());
  }
  bool ok() const { return failed_ == 0; }
  std::size_t total() const { return total_; }
  const std::vector<std::string>& failures() const { return failures_; }
  std::size_t failed() const { return failed_; }

 private:
  std::size_t total_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
};

std::vector<std::string> names(const std::vector<SearchResult>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.name);
  return out;
}

std::vector<DocumentId> ids(const std::vector<SearchResult>& rs) {
  std::vector<DocumentId> out;
  for (const auto& r : rs) out.push_back(r.doc_id);
  return out;
}

SearchRequest request(const std::string& q, Measure m, CosineMode mode = CosineMode::consistent) {
  SearchRequest r;
  r.query_text = q;
  r.measure = m;
  r.cosine_mode = mode;
  return r;
}

Index build(const oracle::Corpus& c) {
  Index ix;
  for (std::size_t i = 0; i < c.texts.size(); ++i) ix.add_document("doc" + std::to_string(i), c.classes[i], c.texts[i]);
  return ix;
}

const std::vector<std::string> kRanking{"D2", "D3", "D1"};

void golden_scores(Check& c, Measure m, CosineMode mode, const double (&want)[3], double tol) {
  const auto ix = golden::make_index();
  const auto results = execute(ix, request(golden::kQuery, m, mode));
  c.expect(names(results) == kRanking, std::string(to_string(m)) + " ranking D2 > D3 > D1");
  const DocumentId order[] = {golden::D1, golden::D2, golden::D3};
  for (int k = 0; k < 3; ++k) {
    double got = -1;
    for (const auto& r : results)
      if (r.doc_id == order[k]) got = r.score;
    c.near(got, want[k], tol, std::string(to_string(m)) + " D" + std::to_string(k + 1));
  }
}

// --- golden criteria -------------------------------------------------------

void idf_values(Check& c) {
  const auto ix = golden::make_index();
  for (const char* t : {"t1", "t5", "t7", "t8"}) {
    c.expect(ix.df(t) == 2, std::string("df ") + t);
    c.near(ix.idf(t), 0.176, golden::kTol, std::string("idf ") + t);
  }
  for (const char* t : {"t2", "t3", "t4", "t6"}) {
    c.expect(ix.df(t) == 1, std::string("df ") + t);
    c.near(ix.idf(t), 0.477, golden::kTol, std::string("idf ") + t);
  }
}

void document_vectors(Check& c) {
  const auto ix = golden::make_index();
  const std::map<std::string, double> want[3] = {
      {{"t2", 0.477}, {"t4", 0.477}, {"t5", 0.176}, {"t7", 0.176}},
      {{"t1", 0.176}, {"t3", 0.477}, {"t6", 0.954}, {"t8", 0.176}},
      {{"t1", 0.176}, {"t5", 0.176}, {"t7", 0.176}, {"t8", 0.176}},
  };
  const DocumentId docs[] = {golden::D1, golden::D2, golden::D3};
  for (int d = 0; d < 3; ++d) {
    const auto v = ix.doc_vector(docs[d]);
    c.expect(v.size() == want[d].size(), "nonzero cell count D" + std::to_string(d + 1));
    for (const auto& [term, w] : want[d]) c.near(v.get(term), w, golden::kTol, "D" + std::to_string(d + 1) + "/" + term);
  }
}

void query_weights(Check& c) {
  const auto ix = golden::make_index();
  const auto q = build_query_vector(ix, golden::kQuery);
  c.expect(q.cosine_normalized.size() == 3, "three weighted query terms");
  c.near(q.cosine_normalized.get("t5"), 0.088, golden::kTol, "q/t5");
  c.near(q.cosine_normalized.get("t6"), 0.477, golden::kTol, "q/t6");
  c.near(q.cosine_normalized.get("t8"), 0.088, golden::kTol, "q/t8");
}

void inner_product_scores(Check& c) {
  golden_scores(c, Measure::inner_product, CosineMode::consistent, {0.031, 0.486, 0.062}, golden::kTol);
}

void cosine_scores(Check& c) {
  golden_scores(c, Measure::cosine, CosineMode::paper_compat, {0.087, 0.90, 0.357}, 0.01);
}

void jaccard_dice_scores(Check& c) {
  golden_scores(c, Measure::jaccard, CosineMode::consistent, {0.04, 0.485, 0.177}, golden::kTol);
  golden_scores(c, Measure::dice, CosineMode::consistent, {0.077, 0.653, 0.3}, golden::kTol);
}

void precision_recall(Check& c) {
  const auto ix = golden::make_index();
  QueryRun run;
  run.run_id = RunId{1};
  run.request = request(golden::kQuery, Measure::dice);
  run.results = execute(ix, run.request);
  JudgmentBook book;
  book.add_run(run);
  const auto m = book.judge(RunId{1}, run.results.front().doc_id, true);
  c.expect(m.retrieved_count == 3 && m.relevant_retrieved_count == 1, "counts 1 of 3");
  c.near(m.precision, 0.333, 0.0005, "precision");
  c.near(book.recall(RunId{1}, 2), 0.5, 1e-12, "recall with 2 relevant in total");
}

// --- properties -------------------------------------------------------------

WeightedVector random_vector(std::mt19937_64& rng, int vocab) {
  std::uniform_int_distribution<int> n(0, 12), term(0, vocab - 1);
  std::uniform_real_distribution<double> w(0.001, 3.0);
  WeightedVector v;
  for (int k = n(rng); k > 0; --k) v.set("w" + std::to_string(term(rng)), w(rng));
  return v;
}

void property_a(Check& c) {
  std::mt19937_64 rng(1001);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_vector(rng, 40), b = random_vector(rng, 40);
    if (squared_norm(a) + squared_norm(b) == 0.0) continue;
    const double d = dice(a, b);
    c.rel(jaccard(a, b), d / (2.0 - d), 1e-9, "pair " + std::to_string(i));
  }
}

void property_b(Check& c) {
  std::mt19937_64 rng(1002);
  for (int round = 0; round < 100; ++round) {
    const auto ix = build(oracle::random_corpus(rng, 50, 150));
    const auto q = oracle::random_query(rng, 150);
    c.expect(ids(execute(ix, request(q, Measure::jaccard))) == ids(execute(ix, request(q, Measure::dice))),
             "corpus " + std::to_string(round));
  }
}

void property_c(Check& c) {
  std::mt19937_64 rng(1003);
  for (int round = 0; round < 100; ++round) {
    const auto corpus = oracle::random_corpus(rng, 50, 200);
    const auto ix = build(corpus);
    const oracle::DenseModel dense(corpus.texts);
    const auto q = oracle::random_query(rng, 200);
    for (auto m : kAllMeasures)
      for (auto mode : {CosineMode::consistent, CosineMode::paper_compat}) {
        const auto results = execute(ix, request(q, m, mode));
        std::size_t positive = 0;
        for (std::size_t d = 0; d < corpus.texts.size(); ++d) positive += dense.score(d, q, m, mode) > 0.0;
        c.expect(results.size() == positive, "candidate set, corpus " + std::to_string(round));
        for (const auto& r : results)
          c.rel(r.score, dense.score(r.doc_id.value - 1, q, m, mode), 1e-9, "corpus " + std::to_string(round));
      }
  }
}

void property_d(Check& c) {
  std::mt19937_64 rng(1004);
  for (int round = 0; round < 200; ++round) {
    const auto ix = build(oracle::random_corpus(rng, 30, 40));
    const auto n = ix.stats().n_docs;
    for (const auto& [term, p] : ix.all_postings()) {
      const double idf = ix.idf(term);
      c.expect(idf >= 0.0, "idf >= 0 for " + term);
      c.expect((idf == 0.0) == (p.df() == n), "idf = 0 iff df = N for " + term);
    }
  }
}

void property_e(Check& c) {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> scale(0.001, 1000.0);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_vector(rng, 30), b = random_vector(rng, 30);
    QueryVector q{b, b, 1};
    const double k = scale(rng);
    WeightedVector scaled;
    for (const auto& [t, w] : a) scaled.set(t, w * k);
    const double base = cosine(a, q, CosineMode::consistent);
    c.expect(std::abs(cosine(scaled, q, CosineMode::consistent) - base) <= 1e-9 * std::max(base, 1e-300),
             "pair " + std::to_string(i));
  }
}

void property_f(Check& c) {
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> threshold(0.0, 0.5);
  std::bernoulli_distribution coin(0.5);
  for (int round = 0; round < 100; ++round) {
    const auto ix = build(oracle::random_corpus(rng, 50, 120));
    const auto q = oracle::random_query(rng, 120);
    for (auto m : kAllMeasures) {
      auto low = request(q, m);
      low.threshold = threshold(rng);
      for (const auto& label : ix.classifications())
        if (coin(rng)) low.classifications.insert(label);
      auto high = low;
      high.threshold += threshold(rng);
      const auto lo = execute(ix, low), hi = execute(ix, high);
      std::size_t k = 0;
      for (const auto& r : hi) {
        while (k < lo.size() && lo[k].doc_id != r.doc_id) ++k;
        c.expect(k < lo.size(), "higher threshold yields a subsequence");
      }
      for (const auto& r : lo) {
        c.expect(r.score > low.threshold, "score above threshold");
        c.expect(low.classifications.empty() || low.classifications.contains(r.classification),
                 "result inside classification filter");
      }
    }
  }
}

void property_g(Check& c) {
  std::mt19937_64 rng(1007);
  TempDir dir;
  for (int round = 0; round < 50; ++round) {
    const auto corpus = oracle::random_corpus(rng, 20, 60);
    auto ix = build(corpus);
    const auto path = dir / ("ix" + std::to_string(round) + ".vsm");
    ix.save(path);
    c.expect(Index::load(path) == ix, "save/load identity " + std::to_string(round));

    const auto before = ix;
    const auto added = ix.add_document("extra", "c0", oracle::random_query(rng, 60));
    ix.remove_document(added.id);
    c.expect(ix.stats() == before.stats(), "add/remove restores stats");
    bool same = true;
    for (const auto& [term, p] : before.all_postings()) {
      const auto* now = ix.postings(term);
      same = same && now && now->postings == p.postings;
    }
    c.expect(same && ix.all_postings().size() == before.all_postings().size(), "add/remove restores postings");
  }
}

// --- service ----------------------------------------------------------------

void service_contract(Check& c) {
  LiveService live;
  auto cl = live.client();
  const auto q = httplib::detail::encode_query_param(golden::kQuery);

  // Empty corpus.
  auto res = cl.Get("/api/search?q=" + q);
  c.expect(res && res->status == 409, "search on empty corpus → 409");
  res = cl.Get("/api/collection");
  c.expect(res && res->status == 200 && json::parse(res->body)["documents"].empty(), "empty collection");

  // Upload.
  res = cl.Post("/api/documents",
                json{{"name", "D1"}, {"classification", golden::kClass}, {"text", golden::kDocs[0].text}}.dump(),
                "application/json");
  c.expect(res && res->status == 201 && json::parse(res->body)["term_count"] == 4, "upload D1 → 201, 4 terms");
  for (std::size_t k = 1; k < golden::kDocs.size(); ++k) live.upload(golden::kDocs[k].name, golden::kClass, golden::kDocs[k].text);
  res = cl.Post("/api/documents", "{not json", "application/json");
  c.expect(res && res->status == 400, "malformed upload → 400");

  // Search.
  res = cl.Get("/api/search?q=" + q + "&measure=dice");
  c.expect(res && res->status == 200, "dice search → 200");
  const auto run = json::parse(res->body);
  std::vector<std::string> got;
  for (const auto& r : run["results"]) got.push_back(r["name"]);
  c.expect(got == kRanking, "dice ranking D2, D3, D1");
  const double dice_want[] = {0.653, 0.3, 0.077};
  for (std::size_t k = 0; k < std::min<std::size_t>(3, run["results"].size()); ++k)
    c.near(run["results"][k]["score"].get<double>(), dice_want[k], golden::kTol, "dice score rank " + std::to_string(k + 1));
  res = cl.Get("/api/search?q=" + q + "&measure=bm25");
  c.expect(res && res->status == 400, "unknown measure → 400");
  res = cl.Get("/api/search?q=nomatch");
  c.expect(res && res->status == 200 && json::parse(res->body)["results"].empty(), "no match → empty results");

  // Judgments.
  const auto path = "/api/runs/" + std::to_string(run["run_id"].get<std::uint64_t>()) + "/judgments";
  const auto top = run["results"][0]["doc_id"].get<std::uint64_t>();
  res = cl.Post(path, json{{"doc_id", top}, {"relevant", true}}.dump(), "application/json");
  c.expect(res && res->status == 200, "judge → 200");
  if (res && res->status == 200) c.near(json::parse(res->body)["precision"].get<double>(), 0.333, 0.0005, "precision after judging");
  res = cl.Post(path, json{{"doc_id", top}, {"relevant", true}}.dump(), "application/json");
  c.expect(res && res->status == 200 && std::abs(json::parse(res->body)["precision"].get<double>() - 1.0 / 3) < 1e-12,
           "re-judging is idempotent");
  res = cl.Post(path, json{{"doc_id", 4}, {"relevant", true}}.dump(), "application/json");
  c.expect(res && res->status == 422, "doc not in run → 422");
  res = cl.Post("/api/runs/9999/judgments", json{{"doc_id", top}, {"relevant", true}}.dump(), "application/json");
  c.expect(res && res->status == 404, "unknown run → 404");

  // Collection. The blank document goes in last: it changes N and so idf.
  res = cl.Post("/api/documents", json{{"name", "blank"}, {"classification", "other"}, {"text", ""}}.dump(),
                "application/json");
  c.expect(res && res->status == 201 && json::parse(res->body)["term_count"] == 0, "empty upload → 201, 0 terms");
  res = cl.Get("/api/collection?class=general");
  c.expect(res && res->status == 200 && json::parse(res->body)["documents"].size() == 3, "class filter → 3 docs");
  res = cl.Get("/api/collection");
  c.expect(res && json::parse(res->body)["documents"].size() == 4, "collection lists every document");

  // Fuzz.
  std::mt19937_64 rng(1008);
  const std::vector<std::string> junk = {"", "{", "}", "[", "\"", ":", ",", "null", "1e999", "-1", "\xff",
                                         "\"doc_id\"", "\"relevant\"", "\"text\"", "true", "%00", "bm25"};
  std::uniform_int_distribution<std::size_t> pick(0, junk.size() - 1);
  int five_hundreds = 0, total = 0;
  for (int i = 0; i < 300; ++i) {
    std::string body;
    for (int k = 0; k < 5; ++k) body += junk[pick(rng)];
    const std::string param = httplib::detail::encode_query_param(junk[pick(rng)]);
    httplib::Result r;
    switch (i % 4) {
      case 0: r = cl.Post("/api/documents", body, "application/json"); break;
      case 1: r = cl.Post(path, body, "application/json"); break;
      case 2: r = cl.Get("/api/search?q=" + param + "&measure=" + param + "&threshold=" + param); break;
      case 3: r = cl.Get("/api/collection?offset=" + param + "&limit=" + param + "&class=" + param); break;
    }
    ++total;
    if (!r || r->status >= 500) ++five_hundreds;
  }
  c.expect(five_hundreds == 0, std::to_string(five_hundreds) + " of " + std::to_string(total) + " fuzzed requests got no 4xx/2xx");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"idf values (df=2 → 0.176, df=1 → 0.477)", idf_values},
      {"document vectors, every nonzero cell (t6/D2 = 0.954)", document_vectors},
      {"cosine-mode query weights {0.088, 0.477, 0.088}", query_weights},
      {"inner product D1 0.031, D2 0.486, D3 0.062; D2 > D3 > D1", inner_product_scores},
      {"cosine paper_compat D1 0.087, D2 0.90, D3 0.357 (±0.01)", cosine_scores},
      {"jaccard 0.04/0.485/0.177 and dice 0.077/0.653/0.3", jaccard_dice_scores},
      {"precision 0.333 and recall 0.5 for 1 of 3 retrieved, 2 relevant", precision_recall},
      {"property (a): jaccard = dice/(2-dice), 1000 random pairs", property_a},
      {"property (b): jaccard and dice rankings identical, 100 corpora", property_b},
      {"property (c): inverted index equals dense brute force", property_c},
      {"property (d): idf >= 0 and idf = 0 iff df = N", property_d},
      {"property (e): consistent cosine invariant to document scaling", property_e},
      {"property (f): threshold monotonicity and filter soundness", property_f},
      {"property (g): save/load and add/remove round trips", property_g},
      {"service contract and malformed-input fuzzing", service_contract},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok() ? "PASS" : "FAIL") << "  " << name << "  [" << c.total() - c.failed() << "/"
              << c.total() << "]\n";
    for (const auto& f : c.failures()) std::cout << "        " << f << '\n';
    failed += !c.ok();
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/" << criteria.size() << '\n';
  return failed ? 1 : 0;
}
