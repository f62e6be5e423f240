#include "kgqa/graph_model.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

PhraseTerm PhraseTerm::entity(std::string label) {
  return PhraseTerm{std::move(label), TermCategory::kEntity, std::nullopt};
}

PhraseTerm PhraseTerm::variable(int id, std::string label) {
  return PhraseTerm{std::move(label), TermCategory::kVariable, id};
}

namespace {

void validate_term(const PhraseTerm& term, std::string_view side) {
  if (term.is_variable()) {
    if (!term.var_id || *term.var_id < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(side) + " variable needs a var_id >= 1");
    }
  } else {
    if (term.var_id) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(side) + " entity must not carry a var_id");
    }
    if (text::trim(term.label).empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(side) + " entity label is empty");
    }
  }
}

}  // namespace

void validate(const PhraseTriplePattern& pattern) {
  validate_term(pattern.subject, "subject");
  validate_term(pattern.object, "object");
  if (text::trim(pattern.relation_label).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "relation label is empty");
  }
  if (pattern.subject.is_variable() && pattern.object.is_variable() &&
      pattern.subject.var_id == pattern.object.var_id) {
    throw Error(ErrorCode::kInvalidArgument,
                "both sides of a triple use var_id " +
                    std::to_string(*pattern.subject.var_id));
  }
  if (!pattern.subject.is_variable() && !pattern.object.is_variable() &&
      pattern.subject.label == pattern.object.label) {
    throw Error(ErrorCode::kInvalidArgument,
                "triple connects entity '" + pattern.subject.label +
                    "' to itself");
  }
}

std::string_view to_string(DataType type) {
  switch (type) {
    case DataType::kDate: return "date";
    case DataType::kNumeric: return "numeric";
    case DataType::kBoolean: return "boolean";
    case DataType::kString: return "string";
  }
  return "string";
}

DataType parse_data_type(std::string_view name) {
  std::string lower = text::to_lower(text::trim(name));
  if (lower == "date") return DataType::kDate;
  if (lower == "numeric" || lower == "number" || lower == "numerical") {
    return DataType::kNumeric;
  }
  if (lower == "boolean") return DataType::kBoolean;
  if (lower == "string") return DataType::kString;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown data type '" + std::string(name) + "'");
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::kStar: return "star";
    case Shape::kPath: return "path";
    case Shape::kOther: return "other";
  }
  return "other";
}

const PGPNode& PGP::node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return n;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "no node with id '" + std::string(id) + "'");
}

PGPNode& PGP::node(std::string_view id) {
  return const_cast<PGPNode&>(std::as_const(*this).node(id));
}

const PGPNode* PGP::main_unknown() const {
  for (const auto& n : nodes) {
    if (n.is_main) return &n;
  }
  return nullptr;
}

std::size_t PGP::unknown_count() const {
  return std::count_if(nodes.begin(), nodes.end(),
                       [](const PGPNode& n) { return n.is_unknown(); });
}

std::size_t PGP::entity_count() const { return nodes.size() - unknown_count(); }

std::vector<PhraseTriplePattern> PGP::to_patterns() const {
  auto term_of = [this](const std::string& id) {
    const PGPNode& n = node(id);
    if (n.is_unknown()) return PhraseTerm::variable(*n.var_id);
    return PhraseTerm::entity(n.label);
  };
  std::vector<PhraseTriplePattern> out;
  out.reserve(edges.size());
  for (const auto& e : edges) {
    out.push_back({term_of(e.endpoint_a), e.label, term_of(e.endpoint_b)});
  }
  return out;
}

PGP build_pgp(std::span<const PhraseTriplePattern> patterns,
              bool boolean_question) {
  if (patterns.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no triple patterns to build from");
  }
  PGP pgp;
  pgp.boolean_question = boolean_question;

  std::map<std::string, std::size_t> entity_index;
  std::map<int, std::size_t> variable_index;

  auto intern = [&](const PhraseTerm& term) -> std::size_t {
    if (term.is_variable()) {
      auto [it, inserted] =
          variable_index.try_emplace(*term.var_id, pgp.nodes.size());
      if (inserted) {
        PGPNode n;
        n.id = "n" + std::to_string(pgp.nodes.size());
        n.kind = NodeKind::kUnknown;
        n.var_id = term.var_id;
        n.label = term.label.empty() ? "unknown" + std::to_string(*term.var_id)
                                     : term.label;
        pgp.nodes.push_back(std::move(n));
      }
      return it->second;
    }
    auto [it, inserted] = entity_index.try_emplace(term.label, pgp.nodes.size());
    if (inserted) {
      PGPNode n;
      n.id = "n" + std::to_string(pgp.nodes.size());
      n.kind = NodeKind::kEntity;
      n.label = term.label;
      pgp.nodes.push_back(std::move(n));
    }
    return it->second;
  };

  std::vector<std::pair<std::size_t, std::size_t>> adjacency;
  for (const auto& pattern : patterns) {
    validate(pattern);
    std::size_t a = intern(pattern.subject);
    std::size_t b = intern(pattern.object);
    PGPEdge e;
    e.id = "e" + std::to_string(pgp.edges.size());
    e.label = pattern.relation_label;
    e.endpoint_a = pgp.nodes[a].id;
    e.endpoint_b = pgp.nodes[b].id;
    pgp.edges.push_back(std::move(e));
    adjacency.emplace_back(a, b);
  }

  // Union-find over the node indices for the connectivity check.
  std::vector<std::size_t> parent(pgp.nodes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : adjacency) parent[find(a)] = find(b);
  std::size_t root = find(0);
  for (std::size_t i = 1; i < pgp.nodes.size(); ++i) {
    if (find(i) != root) {
      throw Error(ErrorCode::kDisconnectedGraph,
                  "node '" + pgp.nodes[i].label +
                      "' is not connected to the rest of the pattern graph");
    }
  }

  if (variable_index.empty()) {
    if (!boolean_question) {
      throw Error(ErrorCode::kNoUnknown,
                  "pattern graph has no unknown and the question is not "
                  "boolean");
    }
  } else {
    pgp.nodes[variable_index.begin()->second].is_main = true;
  }
  return pgp;
}

Shape classify_shape(const PGP& pgp) {
  if (pgp.edges.empty()) return Shape::kOther;
  // Star: one node touches every edge.
  for (const auto& n : pgp.nodes) {
    bool all = std::all_of(pgp.edges.begin(), pgp.edges.end(),
                           [&](const PGPEdge& e) {
                             return e.endpoint_a == n.id || e.endpoint_b == n.id;
                           });
    if (all) return Shape::kStar;
  }
  // Path: a connected chain, two endpoints of degree one, the rest degree two.
  if (pgp.edges.size() + 1 != pgp.nodes.size()) return Shape::kOther;
  std::map<std::string, int> degree;
  for (const auto& e : pgp.edges) {
    ++degree[e.endpoint_a];
    ++degree[e.endpoint_b];
  }
  int ends = 0;
  for (const auto& [id, d] : degree) {
    if (d == 1) {
      ++ends;
    } else if (d != 2) {
      return Shape::kOther;
    }
  }
  return ends == 2 && pgp.edges.size() >= 2 ? Shape::kPath : Shape::kOther;
}

}  // namespace kgqa
