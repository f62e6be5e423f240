#include "kgqa/pipeline.h"

#include <chrono>
#include <fstream>
#include <sstream>

#include "kgqa/json_io.h"
#include "kgqa/question_understanding.h"
#include "kgqa/text_util.h"

namespace kgqa {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double millis_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kQuestionUnderstanding: return "question_understanding";
    case Phase::kLinking: return "linking";
    case Phase::kExecution: return "execution";
  }
  return "execution";
}

std::set<std::string> PipelineResult::answer_keys() const {
  std::set<std::string> keys;
  if (answers.boolean_answer) {
    keys.insert(*answers.boolean_answer ? "true" : "false");
    return keys;
  }
  for (const auto& a : answers.answers) keys.insert(answer_key(a.term));
  return keys;
}

Pipeline::Pipeline(PipelineConfig cfg, std::shared_ptr<const EmbeddingStore> store,
                   std::shared_ptr<SparqlTransport> transport)
    : cfg_(std::move(cfg)), store_(std::move(store)) {
  cfg_.validate();
  if (!transport && cfg_.uses_fixture()) {
    fixture_ = FixtureEndpoint::load(cfg_.fixture);
    transport = std::make_shared<FixtureTransport>(fixture_);
    if (cfg_.endpoint.url.empty()) {
      std::string url = "fixture:";
      for (std::size_t i = 0; i < cfg_.fixture.size(); ++i) {
        url += (i ? "," : "") + cfg_.fixture[i].string();
      }
      cfg_.endpoint.url = url;
    }
  }
  if (!store_) {
    store_ = cfg_.embedding_path
                 ? std::make_shared<const EmbeddingStore>(EmbeddingStore::load(*cfg_.embedding_path))
                 : std::make_shared<const EmbeddingStore>();
  }
  client_ = std::make_unique<SparqlClient>(cfg_.endpoint, std::move(transport));
  if (cfg_.sentence_embedder_url) {
    scorer_ = std::make_unique<CoarseAffinity>(std::make_shared<RemoteSentenceEmbedder>(
        *cfg_.sentence_embedder_url, cfg_.qu.timeout));
  } else {
    scorer_ = std::make_unique<WordAffinity>(store_);
  }
}

PipelineResult Pipeline::answer(std::string_view question) const {
  PipelineResult r;
  r.question = std::string(question);
  auto t0 = Clock::now();
  try {
    r.patterns = extract_triple_patterns(question, cfg_.qu);
    r.prediction = predict_answer_type(question, cfg_.qu);
    r.pgp = build_pgp(r.patterns, r.prediction.data_type == DataType::kBoolean);
    r.pgp.prediction = r.prediction;
  } catch (const Error& e) {
    throw PipelineError(Phase::kQuestionUnderstanding, e);
  }
  auto t1 = Clock::now();

  try {
    JitLinker linker(*client_, *scorer_, cfg_.linker, &probes_);
    Annotation a = linker.annotate(r.pgp);
    r.agp = std::move(a.agp);
    r.diagnostics = std::move(a.diagnostics);
    bool anchored = false;
    for (const auto& n : r.agp.nodes) anchored = anchored || !n.relevant_vertices.empty();
    if (!anchored) {
      throw Error(ErrorCode::kNoAnchorVertices,
                  "no question phrase could be linked to the knowledge graph");
    }
  } catch (const Error& e) {
    throw PipelineError(Phase::kLinking, e);
  }
  auto t2 = Clock::now();

  try {
    r.plans = plan(r.agp, r.prediction, cfg_.max_queries);
    ExecutionResult exec = execute_plans(r.plans, *client_, cfg_.parallelism);
    r.failures = std::move(exec.failures);
    r.answers = filter_answers(exec.answers, r.prediction, *scorer_, cfg_.tau);
    r.answers.boolean_answer = exec.boolean_answer;
  } catch (const Error& e) {
    throw PipelineError(Phase::kExecution, e);
  }
  auto t3 = Clock::now();

  r.timings.qu_ms = millis_between(t0, t1);
  r.timings.linking_ms = millis_between(t1, t2);
  r.timings.execution_ms = millis_between(t2, t3);
  r.timings.total_ms = millis_between(t0, t3);
  return r;
}

// ---------------------------------------------------------------------------
// Benchmarks.

namespace {

std::size_t line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset; ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw LineError(ErrorCode::kMalformedBenchmark, line, what);
}

// Start offsets of the elements of a top-level JSON array known to be valid.
std::vector<std::size_t> element_offsets(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t i = text.find('[');
  int depth = 0;
  bool in_string = false, expect_element = true;
  for (++i; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (text::is_space(c)) continue;
    if (depth == 0 && expect_element && c != ']') {
      out.push_back(i);
      expect_element = false;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (depth == 0) break;
      --depth;
    } else if (c == ',' && depth == 0) {
      expect_element = true;
    }
  }
  return out;
}

}  // namespace

std::vector<BenchmarkItem> parse_benchmark(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(line_of(text, e.byte == 0 ? 0 : e.byte - 1), "invalid JSON: " + std::string(e.what()));
  }
  if (!doc.is_array()) malformed(1, "benchmark must be a JSON array");
  if (doc.empty()) malformed(1, "benchmark contains no questions");
  std::vector<std::size_t> offsets = element_offsets(text);

  std::vector<BenchmarkItem> items;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    std::size_t line = i < offsets.size() ? line_of(text, offsets[i]) : 1;
    const json& q = doc[i];
    if (!q.is_object()) malformed(line, "question entry is not an object");
    if (!q.contains("question") || !q["question"].is_string() ||
        text::trim(q["question"].get_ref<const std::string&>()).empty()) {
      malformed(line, "entry lacks a non-empty \"question\"");
    }
    if (!q.contains("answers") || !q["answers"].is_array()) {
      malformed(line, "entry lacks an \"answers\" array");
    }
    BenchmarkItem item;
    item.question = q["question"].get<std::string>();
    item.line = line;
    for (const auto& a : q["answers"]) {
      if (a.is_string()) {
        item.gold.insert(a.get<std::string>());
      } else if (a.is_boolean()) {
        item.gold.insert(a.get<bool>() ? "true" : "false");
      } else if (a.is_number()) {
        item.gold.insert(a.dump());
      } else {
        malformed(line, "answers must be strings");
      }
    }
    if (q.contains("data_type") && !q["data_type"].is_null()) {
      try {
        item.data_type = parse_data_type(q["data_type"].get<std::string>());
      } catch (const std::exception& e) {
        malformed(line, std::string("bad data_type: ") + e.what());
      }
    }
    items.push_back(std::move(item));
  }
  return items;
}

BenchmarkReport Pipeline::run_benchmark(std::span<const BenchmarkItem> items) const {
  BenchmarkReport report;
  std::vector<Prf> scores;
  std::size_t timed = 0;
  for (const auto& item : items) {
    QuestionReport q;
    q.question = item.question;
    q.gold = item.gold;
    q.expected_data_type = item.data_type;
    try {
      PipelineResult r = answer(item.question);
      q.predicted = r.answer_keys();
      q.predicted_data_type = r.prediction.data_type;
      q.timings = r.timings;
      report.mean_timings.qu_ms += r.timings.qu_ms;
      report.mean_timings.linking_ms += r.timings.linking_ms;
      report.mean_timings.execution_ms += r.timings.execution_ms;
      report.mean_timings.total_ms += r.timings.total_ms;
      ++timed;
    } catch (const PipelineError& e) {
      q.error = std::string(to_string(e.phase())) + ": " + std::string(to_string(e.code())) +
                ": " + e.what();
    }
    q.prf = evaluate(q.predicted, q.gold);
    scores.push_back(q.prf);
    report.per_question.push_back(std::move(q));
  }
  report.macro = macro_average(scores);
  if (timed > 0) {
    double n = static_cast<double>(timed);
    report.mean_timings.qu_ms /= n;
    report.mean_timings.linking_ms /= n;
    report.mean_timings.execution_ms /= n;
    report.mean_timings.total_ms /= n;
  }
  return report;
}

BenchmarkReport Pipeline::run_benchmark_text(std::string_view text) const {
  auto items = parse_benchmark(text);
  return run_benchmark(items);
}

BenchmarkReport Pipeline::run_benchmark_file(const std::filesystem::path& path) const {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read benchmark " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_benchmark_text(ss.str());
}

// ---------------------------------------------------------------------------

json to_json(const PhaseTimings& t) {
  return {{"qu_ms", t.qu_ms},
          {"linking_ms", t.linking_ms},
          {"execution_ms", t.execution_ms},
          {"total_ms", t.total_ms}};
}

json to_json(const PipelineResult& r) {
  using json_io::to_json;
  json patterns = json::array();
  for (const auto& p : r.patterns) patterns.push_back(to_json(p));
  json plans = json::array();
  for (const auto& p : r.plans) plans.push_back(to_json(p));
  json answers = json::array();
  for (const auto& a : r.answers.answers) answers.push_back(to_json(a));
  json dropped = json::array();
  for (const auto& d : r.answers.dropped) dropped.push_back(to_json(d));
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back({{"rank", f.rank}, {"error", f.error}});
  json j = {{"question", r.question},
            {"patterns", std::move(patterns)},
            {"prediction", to_json(r.prediction)},
            {"pgp", to_json(r.pgp)},
            {"agp", to_json(r.agp)},
            {"plans", std::move(plans)},
            {"answers", std::move(answers)},
            {"dropped", std::move(dropped)},
            {"failures", std::move(failures)},
            {"diagnostics", r.diagnostics},
            {"timings", kgqa::to_json(r.timings)}};
  j["boolean_answer"] = r.answers.boolean_answer ? json(*r.answers.boolean_answer)
                                                 : json(nullptr);
  return j;
}

json to_json(const BenchmarkReport& r) {
  json per = json::array();
  for (const auto& q : r.per_question) {
    json j = {{"question", q.question},
              {"predicted", q.predicted},
              {"gold", q.gold},
              {"p", q.prf.precision},
              {"r", q.prf.recall},
              {"f1", q.prf.f1}};
    j["expected_data_type"] = q.expected_data_type
                                  ? json(std::string(to_string(*q.expected_data_type)))
                                  : json(nullptr);
    j["predicted_data_type"] = q.predicted_data_type
                                   ? json(std::string(to_string(*q.predicted_data_type)))
                                   : json(nullptr);
    j["timings"] = q.timings ? kgqa::to_json(*q.timings) : json(nullptr);
    j["error"] = q.error ? json(*q.error) : json(nullptr);
    per.push_back(std::move(j));
  }
  return {{"per_question", std::move(per)},
          {"macro", json_io::to_json(r.macro)},
          {"mean_timings", kgqa::to_json(r.mean_timings)}};
}

}  // namespace kgqa
