#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kgqa/graph_model.h"

namespace kgqa {

// Subject or object of a BGP triple: a variable name (without '?') or an IRI.
struct BGPTerm {
  bool variable = false;
  std::string value;

  std::string to_sparql() const;
  friend bool operator==(const BGPTerm&, const BGPTerm&) = default;
};

struct BGPTriple {
  BGPTerm subject;
  std::string predicate;
  BGPTerm object;
  std::string edge_id;

  std::string to_sparql() const;
  friend bool operator==(const BGPTriple&, const BGPTriple&) = default;
};

// One value assignment over an AGP, triples in edge order.
struct BGP {
  std::vector<BGPTriple> triples;
  double score = 0.0;

  // Triples joined by " . "; also the tie-break key when ranking.
  std::string serialized() const;
  friend bool operator==(const BGP&, const BGP&) = default;
};

enum class PlanForm { kSelect, kAsk };

struct QueryPlan {
  BGP bgp;
  std::string sparql;
  std::size_t rank = 0;  // 1-based
  PlanForm form = PlanForm::kSelect;
};

inline constexpr std::size_t kDefaultMaxQueries = 40;

// SPARQL variable for an unknown node: "unknown1" for the main unknown,
// "unknown<var_id>" for intermediates.
std::string variable_name(const PGPNode& node);

// Every combination of one relevant vertex per entity node and one relevant
// predicate per edge, in lexicographic order of candidate indices. Throws
// Error(kNoViableBGP) naming the first element without candidates.
std::vector<BGP> enumerate_bgps(const AGP& agp);

// Number of BGPs enumerate_bgps would produce, saturating at SIZE_MAX.
std::size_t count_bgps(const AGP& agp);

// Mean over triples of (s_subject + s_predicate + s_object); variables score 0.
double score_bgp(const BGP& bgp, const AGP& agp);

// The k best BGPs, by score descending then serialized() ascending; scores
// are compared on a 1e-9 grid. The full variant materialises every
// combination; the lazy one walks the candidate lattice best-first and yields
// the same list.
std::vector<BGP> top_bgps(const AGP& agp, std::size_t k);
std::vector<BGP> top_bgps_full(const AGP& agp, std::size_t k);
std::vector<BGP> top_bgps_lazy(const AGP& agp, std::size_t k);

std::string to_sparql(const BGP& bgp, const AGP& agp, PlanForm form);

// Top-K plans. ASK when the graph has no unknown or a boolean answer is
// predicted; SELECT of the main unknown plus its optional rdf:type otherwise.
std::vector<QueryPlan> plan(const AGP& agp, const AnswerTypePrediction& prediction,
                            std::size_t k = kDefaultMaxQueries);

}  // namespace kgqa
