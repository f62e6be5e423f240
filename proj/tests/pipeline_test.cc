#include <gtest/gtest.h>

#include <chrono>

#include "kgqa/pipeline.h"
#include "support.h"

namespace kgqa {
namespace {

const std::string kDbr = "http://dbpedia.org/resource/";
const char* kRunningExample =
    "Name the sea into which Danish Straits flows and has Kaliningrad as one of the city on the shore";

PipelineConfig fixture_config() {
  PipelineConfig cfg;
  cfg.fixture = {testing::fixture_path("dbpedia_slice.nt")};
  return cfg;
}

const Pipeline& fixture_pipeline() {
  static Pipeline p(fixture_config(), testing::fixture_store());
  return p;
}

TEST(Pipeline, RunningExample) {
  PipelineResult r = fixture_pipeline().answer(kRunningExample);
  EXPECT_EQ(r.answer_keys(), (std::set<std::string>{kDbr + "Baltic_Sea"}));
  EXPECT_EQ(r.prediction.data_type, DataType::kString);
  EXPECT_EQ(r.prediction.semantic_type, "sea");
  ASSERT_EQ(r.patterns.size(), 2u);
  EXPECT_EQ(r.pgp.nodes.size(), 3u);
  EXPECT_EQ(classify_shape(r.pgp), Shape::kStar);
  ASSERT_FALSE(r.plans.empty());
  const std::string& top = r.plans[0].sparql;
  EXPECT_NE(top.find("?unknown1 <http://dbpedia.org/property/outflow> <http://dbpedia.org/resource/Danish_straits>"),
            std::string::npos);
  EXPECT_NE(top.find("?unknown1 <http://dbpedia.org/ontology/nearestCity> <http://dbpedia.org/resource/Kaliningrad>"),
            std::string::npos);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_FALSE(r.answers.boolean_answer);

  auto j = to_json(r);
  EXPECT_EQ(j["answers"][0]["term"]["value"], kDbr + "Baltic_Sea");
  EXPECT_EQ(j["pgp"]["shape"], "star");
  EXPECT_EQ(j["plans"][0]["rank"], 1);
}

TEST(Pipeline, TimingsDecomposeTheTotal) {
  PipelineResult r = fixture_pipeline().answer(kRunningExample);
  const auto& t = r.timings;
  EXPECT_GE(t.qu_ms, 0.0);
  EXPECT_GE(t.linking_ms, 0.0);
  EXPECT_GE(t.execution_ms, 0.0);
  EXPECT_NEAR(t.qu_ms + t.linking_ms + t.execution_ms, t.total_ms, 1e-6);
}

TEST(Pipeline, BooleanAndDateQuestions) {
  PipelineResult b = fixture_pipeline().answer("Is Dracula written by Bram Stoker?");
  ASSERT_TRUE(b.answers.boolean_answer);
  EXPECT_TRUE(*b.answers.boolean_answer);
  EXPECT_EQ(b.answer_keys(), (std::set<std::string>{"true"}));
  EXPECT_EQ(b.plans[0].form, PlanForm::kAsk);

  PipelineResult d = fixture_pipeline().answer("When was Bram Stoker born?");
  EXPECT_EQ(d.answer_keys(), (std::set<std::string>{"1847-11-08"}));
  EXPECT_FALSE(d.answers.dropped.empty());
  for (const auto& x : d.answers.dropped) EXPECT_EQ(x.reason, "dtype_mismatch");
}

TEST(Pipeline, UnlinkableQuestionFailsInLinking) {
  try {
    fixture_pipeline().answer("Who founded Atlantis?");
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.phase(), Phase::kLinking);
    EXPECT_EQ(e.code(), ErrorCode::kNoAnchorVertices);
  }
}

TEST(Pipeline, EmptyQuestionFailsInUnderstanding) {
  try {
    fixture_pipeline().answer("   ");
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.phase(), Phase::kQuestionUnderstanding);
  }
}

TEST(Pipeline, UnreachableEndpointIsALinkingTransportError) {
  PipelineConfig cfg;
  cfg.endpoint.url = "http://127.0.0.1:1/sparql";
  cfg.endpoint.max_retries = 0;
  cfg.endpoint.request_timeout = std::chrono::milliseconds(500);
  Pipeline p(cfg, testing::fixture_store());
  try {
    p.answer(kRunningExample);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.phase(), Phase::kLinking);
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
}

TEST(Pipeline, ParametersReachTheLinker) {
  PipelineConfig cfg = fixture_config();
  cfg.linker.max_fetched_vertices = 3;
  cfg.linker.predicates_per_vertex_limit = 2;
  Pipeline p(cfg, testing::fixture_store());
  p.answer("Who wrote Dracula?");
  for (const auto& rec : p.probe_log().records()) {
    if (rec.kind == "vertex") EXPECT_NE(rec.query.find("LIMIT 3"), std::string::npos);
    if (rec.kind == "outgoing" || rec.kind == "incoming") {
      EXPECT_NE(rec.query.find("LIMIT 2"), std::string::npos);
    }
  }
  EXPECT_GT(p.probe_log().count("vertex"), 0u);
}

TEST(Pipeline, RepeatedAnswersAreIdentical) {
  auto first = fixture_pipeline().answer("Who wrote Dracula?");
  for (int i = 0; i < 5; ++i) {
    auto again = fixture_pipeline().answer("Who wrote Dracula?");
    EXPECT_EQ(again.answer_keys(), first.answer_keys());
    ASSERT_EQ(again.plans.size(), first.plans.size());
    for (std::size_t j = 0; j < first.plans.size(); ++j) {
      EXPECT_EQ(again.plans[j].sparql, first.plans[j].sparql);
    }
  }
}

TEST(Benchmark, FixtureMacroMatchesHandComputation) {
  BenchmarkReport r =
      fixture_pipeline().run_benchmark_file(testing::data_path("benchmarks/fixture_benchmark.json"));
  ASSERT_EQ(r.per_question.size(), 5u);
  // Running example: exact. Dracula's author: the union of plans adds three
  // untyped values next to Bram_Stoker, so P = 1/4, R = 1. Boolean and date:
  // exact. Atlantis: nothing links, scores zero.
  const double p[] = {1, 0.25, 1, 1, 0};
  const double rc[] = {1, 1, 1, 1, 0};
  const double f1[] = {1, 0.4, 1, 1, 0};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(r.per_question[i].prf.precision, p[i], 1e-12) << i;
    EXPECT_NEAR(r.per_question[i].prf.recall, rc[i], 1e-12) << i;
    EXPECT_NEAR(r.per_question[i].prf.f1, f1[i], 1e-12) << i;
  }
  EXPECT_NEAR(r.macro.precision, 3.25 / 5, 1e-12);
  EXPECT_NEAR(r.macro.recall, 0.8, 1e-12);
  EXPECT_NEAR(r.macro.f1, 3.4 / 5, 1e-12);
  EXPECT_TRUE(r.per_question[4].error);
  EXPECT_FALSE(r.per_question[4].timings);
  EXPECT_EQ(r.per_question[2].predicted, (std::set<std::string>{"true"}));
  EXPECT_EQ(r.per_question[3].expected_data_type, DataType::kDate);
  EXPECT_EQ(r.per_question[3].predicted_data_type, DataType::kDate);
  EXPECT_GT(r.mean_timings.total_ms, 0.0);
  auto j = to_json(r);
  EXPECT_NEAR(j["macro"]["f1"].get<double>(), 0.68, 1e-12);
}

std::size_t malformed_line(std::string_view text) {
  try {
    parse_benchmark(text);
  } catch (const LineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedBenchmark);
    return e.line();
  }
  ADD_FAILURE() << "accepted: " << text;
  return 0;
}

TEST(Benchmark, MalformedInputs) {
  EXPECT_EQ(malformed_line(""), 1u);
  EXPECT_EQ(malformed_line("[]"), 1u);
  EXPECT_EQ(malformed_line("{\"question\": \"x\"}"), 1u);
  EXPECT_EQ(malformed_line("[\n  {\"question\": \"a\", \"answers\": []},\n  {\"question\": \"b\"}\n]"), 3u);
  EXPECT_EQ(malformed_line("[\n  {\"question\": \"a\", \"answers\": []},\n\n  {\"question\": \"\", \"answers\": []}\n]"),
            4u);
  EXPECT_EQ(malformed_line("[\n  {\"question\": \"a\", \"answers\": [{}]}\n]"), 2u);
  EXPECT_EQ(malformed_line("[\n  {\"question\": \"a\", \"answers\": [], \"data_type\": \"colour\"}\n]"), 2u);
  EXPECT_EQ(malformed_line("[\n  {\"question\": \"a\",\n   \"answers\": [}\n]"), 3u);
  EXPECT_EQ(malformed_line("[\n  \"just a string\"\n]"), 2u);
  EXPECT_THROW(fixture_pipeline().run_benchmark_text(""), LineError);
}

TEST(Benchmark, GoldValueForms) {
  auto items = parse_benchmark(R"([{"question": "q", "answers": ["a", true, 3]}])");
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].gold, (std::set<std::string>{"a", "true", "3"}));
  EXPECT_EQ(items[0].line, 1u);
  EXPECT_FALSE(items[0].data_type);
}

TEST(Benchmark, UnanswerableQuestionScoresZero) {
  auto items = parse_benchmark(R"([
    {"question": "Who founded Atlantis?", "answers": ["x"]},
    {"question": "Name the sea into which Danish Straits flows and has Kaliningrad as one of the city on the shore",
     "answers": ["http://dbpedia.org/resource/Baltic_Sea"]}
  ])");
  BenchmarkReport r = fixture_pipeline().run_benchmark(items);
  EXPECT_EQ(r.per_question[0].prf.f1, 0.0);
  EXPECT_EQ(r.per_question[0].prf.precision, 0.0);
  EXPECT_EQ(r.per_question[0].prf.recall, 0.0);
  EXPECT_NEAR(r.macro.f1, 0.5, 1e-12);
}

}  // namespace
}  // namespace kgqa
