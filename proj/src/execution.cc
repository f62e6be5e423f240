#include "kgqa/execution.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

namespace {

struct PlanOutcome {
  bool ok = false;
  std::string error;
  BindingsTable table;
  bool ask_value = false;
};

}  // namespace

ExecutionResult execute_plans(std::span<const QueryPlan> plans, const SparqlClient& client,
                              std::size_t parallelism) {
  if (plans.empty()) throw Error(ErrorCode::kInvalidArgument, "no plans to execute");
  parallelism = std::clamp<std::size_t>(parallelism, 1, plans.size());

  std::vector<PlanOutcome> outcomes(plans.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plans.size(); i = next++) {
      PlanOutcome& out = outcomes[i];
      try {
        if (plans[i].form == PlanForm::kAsk) {
          out.ask_value = client.execute_ask(plans[i].sparql);
        } else {
          out.table = client.execute_select(plans[i].sparql);
        }
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < parallelism; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  // Plans are processed in rank order so the reduction is deterministic.
  std::vector<std::size_t> by_rank(plans.size());
  for (std::size_t i = 0; i < by_rank.size(); ++i) by_rank[i] = i;
  std::stable_sort(by_rank.begin(), by_rank.end(),
                   [&](std::size_t a, std::size_t b) { return plans[a].rank < plans[b].rank; });

  ExecutionResult result;
  std::map<std::string, std::size_t> index;
  std::size_t successes = 0;
  for (std::size_t i : by_rank) {
    const QueryPlan& plan = plans[i];
    const PlanOutcome& out = outcomes[i];
    if (!out.ok) {
      result.failures.push_back({plan.rank, out.error});
      continue;
    }
    ++successes;
    if (plan.form == PlanForm::kAsk) {
      if (!result.boolean_answer) result.boolean_answer = out.ask_value;
      continue;
    }
    const auto& vars = out.table.variables;
    if (vars.empty()) continue;
    const std::string& answer_var = vars[0];
    const std::string* class_var = vars.size() > 1 ? &vars[1] : nullptr;
    for (std::size_t r = 0; r < out.table.rows.size(); ++r) {
      const RDFTerm* term = out.table.get(r, answer_var);
      if (!term) continue;
      std::string key = term->to_ntriples();
      auto [it, inserted] = index.try_emplace(key, result.answers.size());
      if (inserted) result.answers.push_back(RawAnswer{*term, {}, plan.rank});
      RawAnswer& a = result.answers[it->second];
      if (class_var) {
        const RDFTerm* c = out.table.get(r, *class_var);
        if (c && c->is_iri() &&
            std::find(a.class_types.begin(), a.class_types.end(), c->value) ==
                a.class_types.end()) {
          a.class_types.push_back(c->value);
        }
      }
    }
  }
  if (successes == 0) {
    throw Error(ErrorCode::kAllPlansFailed,
                "all " + std::to_string(plans.size()) +
                    " plans failed; first error: " + result.failures.front().error);
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::string_view xsd_local(std::string_view datatype) {
  if (!datatype.starts_with(vocab::kXsd)) return {};
  return datatype.substr(vocab::kXsd.size());
}

bool datatype_matches(const RDFTerm& t, DataType type) {
  if (!t.is_literal() || !t.datatype) return false;
  switch (type) {
    case DataType::kDate: return in_date_family(*t.datatype);
    case DataType::kNumeric: return in_numeric_family(*t.datatype);
    case DataType::kBoolean: return *t.datatype == vocab::kXsdBoolean;
    case DataType::kString: return true;
  }
  return false;
}

}  // namespace

bool in_date_family(std::string_view datatype) {
  std::string_view local = xsd_local(datatype);
  return local == "date" || local == "dateTime" || local == "gYear" || local == "gYearMonth";
}

bool in_numeric_family(std::string_view datatype) {
  std::string_view local = xsd_local(datatype);
  static constexpr std::string_view kNumeric[] = {
      "integer", "decimal", "double", "float", "long", "int", "short", "byte",
      "nonNegativeInteger", "positiveInteger", "nonPositiveInteger", "negativeInteger",
      "unsignedLong", "unsignedInt", "unsignedShort", "unsignedByte"};
  return std::find(std::begin(kNumeric), std::end(kNumeric), local) != std::end(kNumeric);
}

AnswerSet filter_answers(std::span<const RawAnswer> raw,
                         const AnswerTypePrediction& prediction,
                         const AffinityScorer& scorer, double tau) {
  AnswerSet out;
  for (const auto& a : raw) {
    if (prediction.data_type != DataType::kString) {
      if (datatype_matches(a.term, prediction.data_type)) {
        out.answers.push_back(a);
      } else {
        out.dropped.push_back({a, "dtype_mismatch"});
      }
      continue;
    }
    if (!prediction.semantic_type || a.class_types.empty()) {
      out.answers.push_back(a);
      continue;
    }
    bool matched = std::any_of(a.class_types.begin(), a.class_types.end(),
                               [&](const std::string& c) {
                                 std::string words = text::split_identifier(text::local_name(c));
                                 try {
                                   return scorer.score(*prediction.semantic_type, words) >= tau;
                                 } catch (const Error&) {
                                   return false;
                                 }
                               });
    if (matched) {
      out.answers.push_back(a);
    } else {
      out.dropped.push_back({a, "semantic_type_mismatch"});
    }
  }
  return out;
}

AnswerSet filter_answers(std::span<const RawAnswer> raw,
                         const AnswerTypePrediction& prediction,
                         const EmbeddingStore& store, double tau) {
  // Non-owning view; the scorer does not outlive this call.
  WordAffinity scorer(std::shared_ptr<const EmbeddingStore>(&store, [](const EmbeddingStore*) {}));
  return filter_answers(raw, prediction, scorer, tau);
}

// ---------------------------------------------------------------------------

Prf evaluate(const std::set<std::string>& predicted, const std::set<std::string>& gold) {
  if (gold.empty()) {
    return predicted.empty() ? Prf{1.0, 1.0, 1.0} : Prf{0.0, 0.0, 0.0};
  }
  std::size_t hits = 0;
  for (const auto& p : predicted) hits += gold.contains(p) ? 1 : 0;
  Prf r;
  r.precision = predicted.empty() ? 0.0 : static_cast<double>(hits) / predicted.size();
  r.recall = static_cast<double>(hits) / gold.size();
  double sum = r.precision + r.recall;
  r.f1 = sum == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / sum;
  return r;
}

Prf macro_average(std::span<const Prf> per_question) {
  Prf m;
  if (per_question.empty()) return m;
  for (const auto& q : per_question) {
    m.precision += q.precision;
    m.recall += q.recall;
    m.f1 += q.f1;
  }
  double n = static_cast<double>(per_question.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

std::string answer_key(const RDFTerm& term) { return term.value; }

}  // namespace kgqa
