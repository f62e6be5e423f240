#include "kgqa/linker.h"

#include <algorithm>
#include <chrono>
#include <future>
#include <regex>
#include <set>

#include "json.hpp"
#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const std::set<std::string, std::less<>> kNoiseWords = {
    "of", "the", "a", "an", "and", "or", "in", "on", "at", "to", "for", "by", "with", "de"};

bool english_or_untagged(const RDFTerm& t) {
  if (!t.lang || t.lang->empty()) return true;
  std::string lang = text::to_lower(*t.lang);
  return lang == "en" || lang.starts_with("en-");
}

bool label_style(std::string_view predicate) {
  std::string local = text::to_lower(text::local_name(predicate));
  return local.find("label") != std::string::npos || local.find("name") != std::string::npos;
}

// Affinity, or nullopt when a side has no usable tokens.
std::optional<double> try_score(const AffinityScorer& scorer, std::string_view x,
                                std::string_view y) {
  try {
    return scorer.score(x, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyAfterNormalization) return std::nullopt;
    throw;
  }
}

}  // namespace

void LinkerParams::validate() const {
  if (max_fetched_vertices == 0 || vertices_per_node == 0 || predicates_per_edge == 0 ||
      predicates_per_vertex_limit == 0) {
    throw Error(ErrorCode::kConfigError, "linker parameters must be positive");
  }
  if (vertices_per_node > max_fetched_vertices) {
    throw Error(ErrorCode::kConfigError,
                "vertices per node (k_v) cannot exceed max fetched vertices (maxVR)");
  }
}

// ---------------------------------------------------------------------------

void ProbeLog::add(ProbeRecord record) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(record));
}

std::vector<ProbeRecord> ProbeLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t ProbeLog::count(std::string_view kind) const {
  std::lock_guard lock(mu_);
  return std::count_if(records_.begin(), records_.end(),
                       [&](const ProbeRecord& r) { return r.kind == kind; });
}

std::string ProbeLog::to_json_lines() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& r : records_) {
    nlohmann::json j = {{"kind", r.kind}, {"target", r.target}, {"query", r.query},
                        {"rows", r.rows}, {"ms", r.millis},     {"ok", r.ok}};
    if (!r.ok) j["error"] = r.error;
    out += j.dump() + "\n";
  }
  return out;
}

void ProbeLog::clear() {
  std::lock_guard lock(mu_);
  records_.clear();
}

// ---------------------------------------------------------------------------

bool is_human_readable(std::string_view iri) {
  std::string_view local = text::local_name(iri);
  static const std::regex kCode("^[A-Za-z]{0,2}[0-9]+$");
  if (std::regex_match(local.begin(), local.end(), kCode)) return false;
  std::size_t run = 0;
  for (char c : local) {
    run = text::is_ascii_alpha(c) ? run + 1 : 0;
    if (run >= 3) return true;
  }
  return false;
}

std::vector<std::string> probe_keywords(std::string_view label) {
  std::vector<std::string> all, content;
  for (const auto& raw : text::split_whitespace(label)) {
    std::size_t b = 0, e = raw.size();
    auto edge_punct = [](char c) {
      return !(text::is_ascii_alpha(c) || text::is_ascii_digit(c) ||
               static_cast<unsigned char>(c) >= 0x80);
    };
    while (b < e && edge_punct(raw[b])) ++b;
    while (e > b && edge_punct(raw[e - 1])) --e;
    if (b == e) continue;
    std::string word = raw.substr(b, e - b);
    if (std::find(all.begin(), all.end(), word) != all.end()) continue;
    all.push_back(word);
    if (!kNoiseWords.contains(text::to_lower(word))) content.push_back(word);
  }
  return content.empty() ? all : content;
}

std::string vertex_probe_query(Dialect dialect, std::span<const std::string> keywords,
                               std::size_t max_vertices) {
  return "SELECT DISTINCT ?v ?p ?d_v WHERE { ?v ?p ?d_v . " +
         render_contains(dialect, "d_v", keywords) + " } LIMIT " +
         std::to_string(max_vertices);
}

std::string outgoing_predicate_query(std::string_view vertex, std::size_t limit) {
  return "SELECT DISTINCT ?p WHERE { <" + std::string(vertex) + "> ?p ?obj } LIMIT " +
         std::to_string(limit);
}

std::string incoming_predicate_query(std::string_view vertex, std::size_t limit) {
  return "SELECT DISTINCT ?p WHERE { ?sub ?p <" + std::string(vertex) + "> } LIMIT " +
         std::to_string(limit);
}

std::string predicate_description_query(std::string_view predicate) {
  return "SELECT DISTINCT ?lp ?d WHERE { <" + std::string(predicate) +
         "> ?lp ?d . FILTER(isLiteral(?d)) } LIMIT 100";
}

std::optional<std::string> choose_description(
    const std::vector<std::pair<std::string, RDFTerm>>& literals) {
  const RDFTerm* best = nullptr;
  bool best_label = false;
  for (const auto& [predicate, term] : literals) {
    if (!term.is_string_literal() || !english_or_untagged(term)) continue;
    if (text::trim(term.value).empty()) continue;
    bool is_label = label_style(predicate);
    bool better = false;
    if (!best) {
      better = true;
    } else if (is_label != best_label) {
      better = is_label;
    } else if (term.value.size() != best->value.size()) {
      better = term.value.size() < best->value.size();
    } else {
      better = term.value < best->value;
    }
    if (better) {
      best = &term;
      best_label = is_label;
    }
  }
  if (!best) return std::nullopt;
  return best->value;
}

// ---------------------------------------------------------------------------

JitLinker::JitLinker(const SparqlClient& client, const AffinityScorer& scorer,
                     LinkerParams params, ProbeLog* log)
    : client_(client), scorer_(scorer), params_(params), log_(log) {
  params_.validate();
}

BindingsTable JitLinker::probe(const std::string& kind, const std::string& target,
                               const std::string& query) const {
  auto start = Clock::now();
  ProbeRecord rec{kind, target, query, 0, 0.0, true, {}};
  try {
    BindingsTable t = client_.execute_select(query);
    rec.rows = t.rows.size();
    rec.millis = millis_since(start);
    if (log_) log_->add(std::move(rec));
    return t;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.millis = millis_since(start);
    if (log_) log_->add(std::move(rec));
    throw;
  }
}

std::vector<VertexCandidate> JitLinker::potential_relevant_vertices(
    std::string_view label) const {
  std::vector<std::string> keywords = probe_keywords(label);
  if (keywords.empty()) return {};
  Dialect dialect = client_.text_search_dialect();
  BindingsTable table;
  try {
    table = probe("vertex", std::string(label),
                  vertex_probe_query(dialect, keywords, params_.max_fetched_vertices));
  } catch (const EndpointError&) {
    if (dialect != Dialect::kVirtuoso) throw;
    client_.downgrade_text_search();
    table = probe("vertex", std::string(label),
                  vertex_probe_query(Dialect::kGenericRegex, keywords,
                                     params_.max_fetched_vertices));
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<std::string, RDFTerm>>> literals;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const RDFTerm* v = table.get(i, "v");
    const RDFTerm* d = table.get(i, "d_v");
    const RDFTerm* p = table.get(i, "p");
    if (!v || !d || !v->is_iri() || !d->is_string_literal()) continue;
    auto [it, inserted] = literals.try_emplace(v->value);
    if (inserted) order.push_back(v->value);
    it->second.emplace_back(p && p->is_iri() ? p->value : std::string(), *d);
  }
  std::vector<VertexCandidate> out;
  for (const auto& iri : order) {
    if (auto d = choose_description(literals[iri])) out.push_back({iri, *d});
    if (out.size() >= params_.max_fetched_vertices) break;
  }
  return out;
}

std::vector<RelevantVertex> JitLinker::link_entity(const PGPNode& node) const {
  if (node.is_unknown()) return {};
  std::vector<RelevantVertex> scored;
  for (auto& c : potential_relevant_vertices(node.label)) {
    auto s = try_score(scorer_, node.label, c.description);
    if (!s) continue;
    scored.push_back({std::move(c.iri), std::move(c.description), *s});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.iri < b.iri;
  });
  if (scored.size() > params_.vertices_per_node) scored.resize(params_.vertices_per_node);
  return scored;
}

std::string JitLinker::resolve_predicate_description(const std::string& iri) const {
  {
    std::lock_guard lock(cache_mu_);
    auto it = descriptions_.find(iri);
    if (it != descriptions_.end()) return it->second;
  }
  std::string description;
  std::string local(text::local_name(iri));
  if (is_human_readable(iri)) {
    description = text::split_identifier(local);
  } else {
    try {
      BindingsTable t = probe("description", iri, predicate_description_query(iri));
      std::vector<std::pair<std::string, RDFTerm>> literals;
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const RDFTerm* lp = t.get(i, "lp");
        const RDFTerm* d = t.get(i, "d");
        if (lp && d) literals.emplace_back(lp->value, *d);
      }
      if (auto d = choose_description(literals)) description = *d;
    } catch (const Error&) {
      // Fall through to the raw local name.
    }
  }
  if (description.empty()) description = local.empty() ? iri : local;
  std::lock_guard lock(cache_mu_);
  descriptions_.emplace(iri, description);
  return description;
}

std::vector<RelevantPredicate> JitLinker::link_relation(const PGPEdge& edge,
                                                        const PGP& pgp) const {
  std::vector<std::string> anchors;
  for (const auto* id : {&edge.endpoint_a, &edge.endpoint_b}) {
    for (const auto& v : pgp.node(*id).relevant_vertices) {
      if (std::find(anchors.begin(), anchors.end(), v.iri) == anchors.end()) {
        anchors.push_back(v.iri);
      }
    }
  }
  if (anchors.empty()) {
    throw Error(ErrorCode::kNoAnchorVertices,
                "edge " + edge.id + " ('" + edge.label + "') has no linked endpoint");
  }

  struct Found {
    std::string predicate;
    std::string anchor;
    bool object_flag;
  };
  std::vector<std::future<BindingsTable>> futures;
  for (const auto& v : anchors) {
    futures.push_back(std::async(std::launch::async, [this, v] {
      return probe("outgoing", v,
                   outgoing_predicate_query(v, params_.predicates_per_vertex_limit));
    }));
    futures.push_back(std::async(std::launch::async, [this, v] {
      return probe("incoming", v,
                   incoming_predicate_query(v, params_.predicates_per_vertex_limit));
    }));
  }
  std::vector<Found> found;
  std::exception_ptr failure;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    try {
      BindingsTable t = futures[i].get();
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const RDFTerm* p = t.get(r, "p");
        if (p && p->is_iri()) found.push_back({p->value, anchors[i / 2], i % 2 == 1});
      }
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::map<std::string, RelevantPredicate> best;
  for (const auto& f : found) {
    std::string description = resolve_predicate_description(f.predicate);
    auto s = try_score(scorer_, edge.label, description);
    if (!s) continue;
    RelevantPredicate cand{f.predicate, description, *s, f.anchor, f.object_flag};
    auto it = best.find(f.predicate);
    if (it == best.end()) {
      best.emplace(f.predicate, std::move(cand));
      continue;
    }
    const RelevantPredicate& cur = it->second;
    bool better = cand.score > cur.score ||
                  (cand.score == cur.score &&
                   (cand.anchor_vertex < cur.anchor_vertex ||
                    (cand.anchor_vertex == cur.anchor_vertex && !cand.object_flag &&
                     cur.object_flag)));
    if (better) it->second = std::move(cand);
  }
  std::vector<RelevantPredicate> out;
  for (auto& [iri, p] : best) out.push_back(std::move(p));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.iri < b.iri;
  });
  if (out.size() > params_.predicates_per_edge) out.resize(params_.predicates_per_edge);
  return out;
}

Annotation JitLinker::annotate(const PGP& pgp) const {
  Annotation result;
  result.agp = pgp;
  AGP& agp = result.agp;

  auto start = Clock::now();
  std::vector<std::future<std::vector<RelevantVertex>>> vertex_jobs;
  for (const auto& n : agp.nodes) {
    vertex_jobs.push_back(std::async(std::launch::async, [this, &n] { return link_entity(n); }));
  }
  std::vector<std::exception_ptr> endpoint_failures;
  for (std::size_t i = 0; i < agp.nodes.size(); ++i) {
    PGPNode& n = agp.nodes[i];
    try {
      n.relevant_vertices = vertex_jobs[i].get();
      if (!n.is_unknown() && n.relevant_vertices.empty()) {
        result.diagnostics.push_back("node " + n.id + " ('" + n.label +
                                     "'): no relevant vertices found");
      }
    } catch (const Error& e) {
      endpoint_failures.push_back(std::current_exception());
      result.diagnostics.push_back("node " + n.id + " ('" + n.label + "'): " +
                                   std::string(to_string(e.code())) + ": " + e.what());
    }
  }
  result.timings.entity_ms = millis_since(start);

  start = Clock::now();
  std::size_t linked_edges = 0;
  for (auto& edge : agp.edges) {
    try {
      edge.relevant_predicates = link_relation(edge, agp);
      if (!edge.relevant_predicates.empty()) ++linked_edges;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoAnchorVertices) {
        endpoint_failures.push_back(std::current_exception());
      }
      result.diagnostics.push_back("edge " + edge.id + " ('" + edge.label + "'): " +
                                   std::string(to_string(e.code())) + ": " + e.what());
    }
  }
  result.timings.relation_ms = millis_since(start);

  if (linked_edges == 0 && !endpoint_failures.empty()) {
    std::rethrow_exception(endpoint_failures.front());
  }
  return result;
}

}  // namespace kgqa
