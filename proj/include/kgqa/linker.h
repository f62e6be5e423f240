#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgqa/embeddings.h"
#include "kgqa/graph_model.h"
#include "kgqa/sparql_client.h"

namespace kgqa {

struct LinkerParams {
  std::size_t max_fetched_vertices = 400;       // maxVR
  std::size_t vertices_per_node = 1;            // k_v
  std::size_t predicates_per_edge = 20;         // k_p
  std::size_t predicates_per_vertex_limit = 100;

  // Throws Error(kConfigError).
  void validate() const;
};

struct ProbeRecord {
  std::string kind;  // vertex | outgoing | incoming | description
  std::string target;
  std::string query;
  std::size_t rows = 0;
  double millis = 0.0;
  bool ok = true;
  std::string error;
};

// Thread-safe record of every SPARQL probe the linker issues.
class ProbeLog {
 public:
  void add(ProbeRecord record);
  std::vector<ProbeRecord> records() const;
  std::size_t count(std::string_view kind) const;
  std::string to_json_lines() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::vector<ProbeRecord> records_;
};

struct LinkTimings {
  double entity_ms = 0.0;
  double relation_ms = 0.0;
};

struct Annotation {
  AGP agp;
  std::vector<std::string> diagnostics;
  LinkTimings timings;
};

struct VertexCandidate {
  std::string iri;
  std::string description;
};

// True iff the IRI's local name has a run of at least three letters and is not
// a short prefix followed by digits (P227, Q42, 2279569217).
bool is_human_readable(std::string_view iri);

// Words of a node label used in the full-text probe. Function words are left
// out unless nothing else remains.
std::vector<std::string> probe_keywords(std::string_view label);

std::string vertex_probe_query(Dialect dialect, std::span<const std::string> keywords,
                               std::size_t max_vertices);
std::string outgoing_predicate_query(std::string_view vertex, std::size_t limit);
std::string incoming_predicate_query(std::string_view vertex, std::size_t limit);
std::string predicate_description_query(std::string_view predicate);

// Picks the description of a resource among its (predicate, literal) pairs:
// English or untagged string literals only, label-style predicates first, then
// the shortest text. Empty when no literal qualifies.
std::optional<std::string> choose_description(
    const std::vector<std::pair<std::string, RDFTerm>>& literals);

// Just-in-time entity and relation linking through live endpoint probes.
class JitLinker {
 public:
  JitLinker(const SparqlClient& client, const AffinityScorer& scorer,
            LinkerParams params = {}, ProbeLog* log = nullptr);

  std::vector<VertexCandidate> potential_relevant_vertices(std::string_view label) const;
  std::vector<RelevantVertex> link_entity(const PGPNode& node) const;
  // Requires the edge's endpoint nodes in `pgp` to be entity-linked already.
  // Throws Error(kNoAnchorVertices) when neither endpoint has vertices.
  std::vector<RelevantPredicate> link_relation(const PGPEdge& edge, const PGP& pgp) const;
  std::string resolve_predicate_description(const std::string& iri) const;

  // Links every node, then every edge. Unanchored edges and endpoint failures
  // become diagnostics; an endpoint error is rethrown only when no edge could
  // be linked at all.
  Annotation annotate(const PGP& pgp) const;

  const LinkerParams& params() const { return params_; }

 private:
  BindingsTable probe(const std::string& kind, const std::string& target,
                      const std::string& query) const;

  const SparqlClient& client_;
  const AffinityScorer& scorer_;
  LinkerParams params_;
  ProbeLog* log_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::string, std::string> descriptions_;
};

}  // namespace kgqa
