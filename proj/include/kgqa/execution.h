#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kgqa/embeddings.h"
#include "kgqa/graph_model.h"
#include "kgqa/planner.h"
#include "kgqa/rdf.h"
#include "kgqa/sparql_client.h"

namespace kgqa {

struct RawAnswer {
  RDFTerm term;
  // Every ?c binding seen for the term, in first-seen order.
  std::vector<std::string> class_types;
  std::size_t source_rank = 0;
};

struct PlanFailure {
  std::size_t rank = 0;
  std::string error;
};

struct ExecutionResult {
  // Union over SELECT plans, one entry per distinct term.
  std::vector<RawAnswer> answers;
  // Result of the best-ranked ASK plan that succeeded.
  std::optional<bool> boolean_answer;
  std::vector<PlanFailure> failures;
};

inline constexpr std::size_t kDefaultParallelism = 4;

// Runs every plan with at most `parallelism` in flight. Individual failures are
// reported; Error(kAllPlansFailed) is raised only when none succeeded.
ExecutionResult execute_plans(std::span<const QueryPlan> plans, const SparqlClient& client,
                              std::size_t parallelism = kDefaultParallelism);

struct DroppedAnswer {
  RawAnswer answer;
  std::string reason;  // dtype_mismatch | semantic_type_mismatch
};

struct AnswerSet {
  std::vector<RawAnswer> answers;
  std::vector<DroppedAnswer> dropped;
  std::optional<bool> boolean_answer;
};

inline constexpr double kDefaultTau = 0.5;

// XSD datatype families used by the data-type filter.
bool in_date_family(std::string_view datatype);
bool in_numeric_family(std::string_view datatype);

// Post-filter by predicted answer type. Date, numeric and boolean predictions
// keep only literals of the matching datatype family. String predictions with
// a semantic type keep untyped answers and answers with at least one class
// whose local-name words reach affinity tau with the semantic type.
AnswerSet filter_answers(std::span<const RawAnswer> raw,
                         const AnswerTypePrediction& prediction,
                         const AffinityScorer& scorer, double tau = kDefaultTau);
AnswerSet filter_answers(std::span<const RawAnswer> raw,
                         const AnswerTypePrediction& prediction,
                         const EmbeddingStore& store, double tau = kDefaultTau);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Set-based precision/recall/F1. When gold is empty the question scores 1
// only if the prediction is empty as well.
Prf evaluate(const std::set<std::string>& predicted, const std::set<std::string>& gold);
Prf macro_average(std::span<const Prf> per_question);

// String used to compare an answer with benchmark gold answers: the IRI, the
// literal's lexical form, or "true"/"false".
std::string answer_key(const RDFTerm& term);

}  // namespace kgqa
