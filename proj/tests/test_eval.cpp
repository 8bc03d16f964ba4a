#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "support/golden.hpp"
#include "vsm/error.hpp"
#include "vsm/eval.hpp"

using namespace vsm;

namespace {

QueryRun make_run(std::uint64_t id, std::size_t n_results) {
  QueryRun run;
  run.run_id = RunId{id};
  for (std::size_t k = 0; k < n_results; ++k) {
    run.results.push_back({k + 1, DocumentId{k + 1}, "doc" + std::to_string(k + 1), "c", 1.0});
  }
  return run;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected vsm::Error");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("judge updates precision") {
  JudgmentBook book;
  book.add_run(make_run(1, 3));
  CHECK(book.precision(RunId{1}) == 0.0);

  const auto m = book.judge(RunId{1}, DocumentId{1}, true);
  CHECK(m.precision == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(m.precision - 0.333) < 0.0005);
  CHECK(m.judged_count == 1);
  CHECK(m.retrieved_count == 3);
  CHECK(m.relevant_retrieved_count == 1);
  CHECK_FALSE(m.recall.has_value());

  book.judge(RunId{1}, DocumentId{2}, true);
  CHECK(book.judge(RunId{1}, DocumentId{3}, true).precision == 1.0);
}

TEST_CASE("flipping a verdict moves precision by exactly 1/retrieved") {
  JudgmentBook book;
  book.add_run(make_run(1, 4));
  book.judge(RunId{1}, DocumentId{1}, true);
  book.judge(RunId{1}, DocumentId{2}, true);
  CHECK(book.precision(RunId{1}) == 0.5);  // 2/4
  const auto m = book.judge(RunId{1}, DocumentId{2}, false);
  CHECK(m.precision == 0.25);  // 1/4
  CHECK(m.judged_count == 2);
  // Repeating the same verdict is idempotent.
  CHECK(book.judge(RunId{1}, DocumentId{2}, false) == m);
}

TEST_CASE("twelve results with three checked") {
  JudgmentBook book;
  book.add_run(make_run(9, 12));
  for (std::uint64_t d = 1; d <= 3; ++d) book.judge(RunId{9}, DocumentId{d}, true);
  CHECK(book.precision(RunId{9}) == 0.25);
}

TEST_CASE("judge errors") {
  JudgmentBook book;
  book.add_run(make_run(1, 3));
  CHECK(code_of([&] { book.judge(RunId{2}, DocumentId{1}, true); }) == ErrorCode::unknown_run);
  CHECK(code_of([&] { book.judge(RunId{1}, DocumentId{99}, true); }) == ErrorCode::doc_not_in_run);
  CHECK(code_of([&] { book.add_run(make_run(1, 1)); }) == ErrorCode::integrity);
  CHECK(code_of([&] { book.metrics(RunId{5}); }) == ErrorCode::unknown_run);
}

TEST_CASE("empty run has precision 0") {
  JudgmentBook book;
  book.add_run(make_run(1, 0));
  CHECK(book.precision(RunId{1}) == 0.0);
}

TEST_CASE("recall") {
  JudgmentBook book;
  book.add_run(make_run(1, 3));
  book.judge(RunId{1}, DocumentId{2}, true);
  CHECK(book.recall(RunId{1}, 2) == 0.5);
  CHECK(book.recall(RunId{1}, 1) == 1.0);
  CHECK(code_of([&] { book.recall(RunId{1}, 0); }) == ErrorCode::zero_total_relevant);
  book.judge(RunId{1}, DocumentId{3}, true);
  CHECK(code_of([&] { book.recall(RunId{1}, 1); }) == ErrorCode::inconsistent_counts);
}

TEST_CASE("qrels and query file parsing") {
  std::istringstream qrels("# comment\nq1\tD2\t1\n\nq1\tD3\t1\r\nq1\tD1\t0\n");
  const auto parsed = parse_qrels(qrels);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0].query_id == "q1");
  CHECK(parsed[0].doc_name == "D2");
  CHECK(parsed[0].relevant);
  CHECK(parsed[1].doc_name == "D3");
  CHECK_FALSE(parsed[2].relevant);

  std::istringstream bad("q1\tD2\tyes\n");
  CHECK(code_of([&] { parse_qrels(bad); }) == ErrorCode::format);
  std::istringstream short_line("q1 D2 1\n");
  CHECK(code_of([&] { parse_qrels(short_line); }) == ErrorCode::format);

  std::istringstream queries("q1\tt6 t5 t6 t8\n#x\nq2\tsilver\ttruck\n");
  const auto qs = parse_queries(queries);
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].text == "t6 t5 t6 t8");
  CHECK(qs[1].text == "silver\ttruck");
  std::istringstream no_tab("q1 text\n");
  CHECK(code_of([&] { parse_queries(no_tab); }) == ErrorCode::format);
}

TEST_CASE("batch_eval") {
  const auto ix = golden::make_index();
  SearchRequest req;
  req.query_text = golden::kQuery;
  req.measure = Measure::dice;
  QueryRun run;
  run.request = req;
  run.results = execute(ix, req);

  SUBCASE("worked example: one relevant retrieved of three, two relevant in total") {
    // D2 relevant and retrieved; a fourth document, never retrieved, is the
    // other relevant one.
    auto ix4 = ix;
    ix4.add_document("D4", "general", "unrelated words");
    std::vector<Qrel> qrels{{"q1", "D2", true}, {"q1", "D4", true}, {"q1", "D1", false}};
    const auto out = batch_eval(qrels, {{"q1", run}}, ix4);
    REQUIRE(out.per_query.size() == 1);
    CHECK(std::abs(out.per_query[0].metrics.precision - 0.333) < 0.0005);
    CHECK(out.per_query[0].metrics.recall == 0.5);
    CHECK(out.per_query[0].metrics.judged_count == 2);
    CHECK(std::abs(out.mean_precision - 0.333) < 0.0005);
    CHECK(out.mean_recall == 0.5);
    CHECK(out.per_query[0].ranking == std::vector<std::string>{"D2", "D3", "D1"});
  }
  SUBCASE("mean of two runs") {
    // 5 results per run; 1 and 2 relevant -> 0.2 and 0.4.
    SearchRequest r;
    r.query_text = "x";
    r.measure = Measure::inner_product;
    Index five;
    for (int i = 0; i < 5; ++i) five.add_document("d" + std::to_string(i), "c", "x");
    five.add_document("other", "c", "y");
    QueryRun a{RunId{1}, r, execute(five, r), ""};
    QueryRun b{RunId{2}, r, execute(five, r), ""};
    REQUIRE(a.results.size() == 5);
    std::vector<Qrel> qrels{{"qa", "d0", true}, {"qb", "d0", true}, {"qb", "d1", true}};
    const auto out = batch_eval(qrels, {{"qa", a}, {"qb", b}}, five);
    REQUIRE(out.per_query.size() == 2);
    CHECK(out.per_query[0].metrics.precision == doctest::Approx(0.2));
    CHECK(out.per_query[1].metrics.precision == doctest::Approx(0.4));
    CHECK(out.mean_precision ==
          (out.per_query[0].metrics.precision + out.per_query[1].metrics.precision) / 2.0);
    CHECK(out.mean_precision == doctest::Approx(0.3));
  }
  SUBCASE("unknown document name skips the query") {
    std::vector<Qrel> qrels{{"q1", "D2", true}, {"q1", "missing", true}};
    const auto out = batch_eval(qrels, {{"q1", run}}, ix);
    CHECK(out.per_query.empty());
    REQUIRE(out.warnings.size() == 1);
    CHECK(out.warnings[0].find("missing") != std::string::npos);
  }
  SUBCASE("empty qrels") {
    CHECK(code_of([&] { batch_eval({}, {{"q1", run}}, ix); }) == ErrorCode::empty_qrels);
  }
}

TEST_CASE("property: precision bounds, order independence and monotone updates") {
  std::mt19937_64 rng(401);
  std::uniform_int_distribution<std::size_t> size(1, 20);
  std::bernoulli_distribution coin(0.5);
  for (int round = 0; round < 300; ++round) {
    const auto n = size(rng);
    std::vector<std::pair<std::uint64_t, bool>> verdicts;
    for (std::uint64_t d = 1; d <= n; ++d) {
      if (coin(rng)) verdicts.push_back({d, coin(rng)});
    }

    JudgmentBook forward;
    forward.add_run(make_run(1, n));
    for (const auto& [d, rel] : verdicts) {
      const double before = forward.precision(RunId{1});
      const double after = forward.judge(RunId{1}, DocumentId{d}, rel).precision;
      if (rel) CHECK(after >= before);
      if (!rel) CHECK(after <= before);
      CHECK(after >= 0.0);
      CHECK(after <= 1.0);
    }

    auto shuffled = verdicts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    JudgmentBook other;
    other.add_run(make_run(1, n));
    for (const auto& [d, rel] : shuffled) other.judge(RunId{1}, DocumentId{d}, rel);
    CHECK(other.metrics(RunId{1}) == forward.metrics(RunId{1}));

    const auto rr = forward.metrics(RunId{1}).relevant_retrieved_count;
    if (rr > 0) {
      const double r = forward.recall(RunId{1}, rr + round % 3);
      CHECK(r > 0.0);
      CHECK(r <= 1.0);
    }
  }
}
