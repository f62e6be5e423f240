#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

enum class TermCategory { kEntity, kVariable };

// One side of a phrase triple: either a phrase copied from the question or an
// unknown identified by its variable id.
struct PhraseTerm {
  std::string label;
  TermCategory category = TermCategory::kEntity;
  std::optional<int> var_id;

  static PhraseTerm entity(std::string label);
  static PhraseTerm variable(int id, std::string label = {});

  bool is_variable() const { return category == TermCategory::kVariable; }

  friend bool operator==(const PhraseTerm&, const PhraseTerm&) = default;
};

struct PhraseTriplePattern {
  PhraseTerm subject;
  std::string relation_label;
  PhraseTerm object;

  friend bool operator==(const PhraseTriplePattern&,
                         const PhraseTriplePattern&) = default;
};

// Throws Error(kInvalidArgument) when a term or the relation violates the
// pattern invariants.
void validate(const PhraseTriplePattern& pattern);

enum class DataType { kDate, kNumeric, kBoolean, kString };

std::string_view to_string(DataType type);
DataType parse_data_type(std::string_view name);

struct AnswerTypePrediction {
  DataType data_type = DataType::kString;
  // Only present when data_type is kString.
  std::optional<std::string> semantic_type;

  friend bool operator==(const AnswerTypePrediction&,
                         const AnswerTypePrediction&) = default;
};

struct RelevantVertex {
  std::string iri;
  std::string description;
  double score = 0.0;

  friend bool operator==(const RelevantVertex&, const RelevantVertex&) = default;
};

struct RelevantPredicate {
  std::string iri;
  std::string description;
  double score = 0.0;
  std::string anchor_vertex;
  // True when the anchor vertex was the object of the discovering triple.
  bool object_flag = false;

  friend bool operator==(const RelevantPredicate&,
                         const RelevantPredicate&) = default;
};

enum class NodeKind { kEntity, kUnknown };

struct PGPNode {
  std::string id;
  std::string label;
  NodeKind kind = NodeKind::kEntity;
  bool is_main = false;
  std::optional<int> var_id;
  std::vector<RelevantVertex> relevant_vertices;

  bool is_unknown() const { return kind == NodeKind::kUnknown; }
};

struct PGPEdge {
  std::string id;
  std::string label;
  std::string endpoint_a;
  std::string endpoint_b;
  std::vector<RelevantPredicate> relevant_predicates;
};

enum class Shape { kStar, kPath, kOther };

std::string_view to_string(Shape shape);

// Phrase graph pattern. Once annotated by the linker the same type carries the
// relevant vertices/predicates and is referred to as an AGP.
struct PGP {
  std::vector<PGPNode> nodes;
  std::vector<PGPEdge> edges;
  std::optional<AnswerTypePrediction> prediction;
  bool boolean_question = false;

  const PGPNode& node(std::string_view id) const;
  PGPNode& node(std::string_view id);
  const PGPNode* main_unknown() const;
  std::size_t unknown_count() const;
  std::size_t entity_count() const;

  // Edges back to phrase triples; endpoint_a is the subject.
  std::vector<PhraseTriplePattern> to_patterns() const;
};

using AGP = PGP;

// Builds the undirected phrase graph. Entities merge on exact label, unknowns
// on var_id; the lowest var_id becomes the main unknown.
PGP build_pgp(std::span<const PhraseTriplePattern> patterns,
              bool boolean_question = false);

Shape classify_shape(const PGP& pgp);

}  // namespace kgqa
