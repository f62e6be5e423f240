#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/config.h"
#include "kgqa/embeddings.h"
#include "kgqa/error.h"
#include "kgqa/execution.h"
#include "kgqa/fixture_endpoint.h"
#include "kgqa/graph_model.h"
#include "kgqa/linker.h"
#include "kgqa/planner.h"

namespace kgqa {

enum class Phase { kQuestionUnderstanding, kLinking, kExecution };

std::string_view to_string(Phase phase);

// Failure of one pipeline phase. code() is the underlying error's code.
class PipelineError : public Error {
 public:
  PipelineError(Phase phase, const Error& cause)
      : Error(cause.code(), cause.what()), phase_(phase) {}

  Phase phase() const { return phase_; }

 private:
  Phase phase_;
};

struct PhaseTimings {
  double qu_ms = 0.0;         // pattern extraction, type prediction, PGP
  double linking_ms = 0.0;    // entity and relation linking
  double execution_ms = 0.0;  // planning, execution and filtering
  double total_ms = 0.0;
};

struct PipelineResult {
  std::string question;
  std::vector<PhraseTriplePattern> patterns;
  AnswerTypePrediction prediction;
  PGP pgp;
  AGP agp;
  std::vector<QueryPlan> plans;
  AnswerSet answers;
  std::vector<PlanFailure> failures;
  std::vector<std::string> diagnostics;
  PhaseTimings timings;

  // Answer keys (see answer_key), or {"true"}/{"false"} for boolean questions.
  std::set<std::string> answer_keys() const;
};

struct BenchmarkItem {
  std::string question;
  std::set<std::string> gold;
  std::optional<DataType> data_type;
  std::size_t line = 0;
};

// JSON array of {"question", "answers", "data_type"?}. Throws
// LineError(kMalformedBenchmark) pointing at the offending line.
std::vector<BenchmarkItem> parse_benchmark(std::string_view text);

struct QuestionReport {
  std::string question;
  std::set<std::string> predicted;
  std::set<std::string> gold;
  Prf prf;
  std::optional<DataType> expected_data_type;
  std::optional<DataType> predicted_data_type;
  std::optional<PhaseTimings> timings;
  std::optional<std::string> error;
};

struct BenchmarkReport {
  std::vector<QuestionReport> per_question;
  Prf macro;
  PhaseTimings mean_timings;
};

nlohmann::json to_json(const PhaseTimings& t);
nlohmann::json to_json(const PipelineResult& r);
nlohmann::json to_json(const BenchmarkReport& r);

// The question answering pipeline over one endpoint. Thread-safe: answer() may
// be called concurrently, all per-question state is local to the call.
class Pipeline {
 public:
  // Without a store the configured embedding file is loaded (or, when none is
  // configured, every token falls back to character embeddings). Without a
  // transport requests go over HTTP, or to the fixture endpoint when the
  // config names fixture files.
  explicit Pipeline(PipelineConfig cfg, std::shared_ptr<const EmbeddingStore> store = nullptr,
                    std::shared_ptr<SparqlTransport> transport = nullptr);

  // Throws PipelineError.
  PipelineResult answer(std::string_view question) const;

  BenchmarkReport run_benchmark(std::span<const BenchmarkItem> items) const;
  BenchmarkReport run_benchmark_text(std::string_view text) const;
  BenchmarkReport run_benchmark_file(const std::filesystem::path& path) const;

  const PipelineConfig& config() const { return cfg_; }
  const SparqlClient& client() const { return *client_; }
  const AffinityScorer& scorer() const { return *scorer_; }
  std::shared_ptr<const EmbeddingStore> store() const { return store_; }
  // Null unless the pipeline serves fixture files itself.
  std::shared_ptr<FixtureEndpoint> fixture_endpoint() const { return fixture_; }
  ProbeLog& probe_log() const { return probes_; }

 private:
  PipelineConfig cfg_;
  std::shared_ptr<const EmbeddingStore> store_;
  std::shared_ptr<FixtureEndpoint> fixture_;
  std::unique_ptr<SparqlClient> client_;
  std::unique_ptr<AffinityScorer> scorer_;
  mutable ProbeLog probes_;
};

}  // namespace kgqa
