#include "kgqa/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "kgqa/error.h"
#include "kgqa/rdf.h"

namespace kgqa {

std::string BGPTerm::to_sparql() const {
  return variable ? "?" + value : "<" + value + ">";
}

std::string BGPTriple::to_sparql() const {
  return subject.to_sparql() + " <" + predicate + "> " + object.to_sparql();
}

std::string BGP::serialized() const {
  std::string out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (i > 0) out += " . ";
    out += triples[i].to_sparql();
  }
  return out;
}

std::string variable_name(const PGPNode& node) {
  if (node.is_main) return "unknown1";
  return "unknown" + std::to_string(node.var_id.value_or(0));
}

namespace {

// Candidate choice per node (ignored for unknowns) and per edge.
struct Choice {
  std::vector<std::size_t> node;
  std::vector<std::size_t> edge;
};

std::size_t node_index(const AGP& agp, const std::string& id) {
  for (std::size_t i = 0; i < agp.nodes.size(); ++i) {
    if (agp.nodes[i].id == id) return i;
  }
  throw Error(ErrorCode::kInvalidArgument, "edge references unknown node " + id);
}

bool holds_vertex(const PGPNode& n, const std::string& iri) {
  return std::any_of(n.relevant_vertices.begin(), n.relevant_vertices.end(),
                     [&](const RelevantVertex& v) { return v.iri == iri; });
}

void check_viable(const AGP& agp) {
  if (agp.edges.empty()) throw Error(ErrorCode::kNoViableBGP, "graph pattern has no edges");
  for (const auto& e : agp.edges) {
    if (e.relevant_predicates.empty()) {
      throw Error(ErrorCode::kNoViableBGP,
                  "edge " + e.id + " ('" + e.label + "') has no relevant predicates");
    }
  }
  for (const auto& n : agp.nodes) {
    if (!n.is_unknown() && n.relevant_vertices.empty()) {
      throw Error(ErrorCode::kNoViableBGP,
                  "node " + n.id + " ('" + n.label + "') has no relevant vertices");
    }
  }
}

BGP build(const AGP& agp, const Choice& c) {
  BGP bgp;
  auto term = [&](std::size_t ni) {
    const PGPNode& n = agp.nodes[ni];
    if (n.is_unknown()) return BGPTerm{true, variable_name(n)};
    return BGPTerm{false, n.relevant_vertices[c.node[ni]].iri};
  };
  for (std::size_t ei = 0; ei < agp.edges.size(); ++ei) {
    const PGPEdge& e = agp.edges[ei];
    const RelevantPredicate& p = e.relevant_predicates[c.edge[ei]];
    std::size_t a = node_index(agp, e.endpoint_a);
    std::size_t b = node_index(agp, e.endpoint_b);
    std::size_t anchor = a, other = b;
    if (!holds_vertex(agp.nodes[a], p.anchor_vertex) &&
        holds_vertex(agp.nodes[b], p.anchor_vertex)) {
      std::swap(anchor, other);
    }
    BGPTriple t;
    t.predicate = p.iri;
    t.edge_id = e.id;
    if (p.object_flag) {
      t.subject = term(other);
      t.object = term(anchor);
    } else {
      t.subject = term(anchor);
      t.object = term(other);
    }
    bgp.triples.push_back(std::move(t));
  }
  bgp.score = score_bgp(bgp, agp);
  return bgp;
}

// Scores equal up to rounding noise tie, so summation order never decides.
long long score_key(double score) { return std::llround(score * 1e9); }

bool ranks_before(const BGP& x, const BGP& y) {
  long long kx = score_key(x.score), ky = score_key(y.score);
  if (kx != ky) return kx > ky;
  return x.serialized() < y.serialized();
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

}  // namespace

std::size_t count_bgps(const AGP& agp) {
  if (agp.edges.empty()) return 0;
  std::size_t n = 1;
  for (const auto& node : agp.nodes) {
    if (!node.is_unknown()) n = saturating_mul(n, node.relevant_vertices.size());
  }
  for (const auto& e : agp.edges) n = saturating_mul(n, e.relevant_predicates.size());
  return n;
}

double score_bgp(const BGP& bgp, const AGP& agp) {
  if (bgp.triples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : bgp.triples) {
    auto edge = std::find_if(agp.edges.begin(), agp.edges.end(),
                             [&](const PGPEdge& e) { return e.id == t.edge_id; });
    if (edge == agp.edges.end()) {
      throw Error(ErrorCode::kInvalidArgument, "BGP references unknown edge " + t.edge_id);
    }
    auto vertex_score = [&](const BGPTerm& term) {
      if (term.variable) return 0.0;
      for (const auto* id : {&edge->endpoint_a, &edge->endpoint_b}) {
        for (const auto& v : agp.node(*id).relevant_vertices) {
          if (v.iri == term.value) return v.score;
        }
      }
      throw Error(ErrorCode::kInvalidArgument,
                  "vertex " + term.value + " is not relevant to edge " + edge->id);
    };
    double sp = 0.0;
    bool found = false;
    for (const auto& p : edge->relevant_predicates) {
      if (p.iri == t.predicate) {
        sp = p.score;
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kInvalidArgument,
                  "predicate " + t.predicate + " is not relevant to edge " + edge->id);
    }
    total += vertex_score(t.subject) + sp + vertex_score(t.object);
  }
  return total / static_cast<double>(bgp.triples.size());
}

std::vector<BGP> enumerate_bgps(const AGP& agp) {
  check_viable(agp);
  // Odometer over entity nodes then edges; the last dimension varies fastest.
  std::vector<std::size_t*> digits;
  std::vector<std::size_t> limits;
  Choice c{std::vector<std::size_t>(agp.nodes.size(), 0),
           std::vector<std::size_t>(agp.edges.size(), 0)};
  for (std::size_t i = 0; i < agp.nodes.size(); ++i) {
    if (agp.nodes[i].is_unknown()) continue;
    digits.push_back(&c.node[i]);
    limits.push_back(agp.nodes[i].relevant_vertices.size());
  }
  for (std::size_t i = 0; i < agp.edges.size(); ++i) {
    digits.push_back(&c.edge[i]);
    limits.push_back(agp.edges[i].relevant_predicates.size());
  }
  std::vector<BGP> out;
  while (true) {
    out.push_back(build(agp, c));
    std::size_t d = digits.size();
    while (d > 0) {
      --d;
      if (++*digits[d] < limits[d]) break;
      *digits[d] = 0;
      if (d == 0) return out;
    }
    if (digits.empty()) return out;
  }
}

std::vector<BGP> top_bgps_full(const AGP& agp, std::size_t k) {
  std::vector<BGP> all = enumerate_bgps(agp);
  std::sort(all.begin(), all.end(), ranks_before);
  if (all.size() > k) all.resize(k);
  return all;
}

std::vector<BGP> top_bgps_lazy(const AGP& agp, std::size_t k) {
  check_viable(agp);
  if (k == 0) return {};

  // Eq. 2 is separable: a vertex adds degree * s_v, a predicate adds s_p.
  struct Dim {
    bool is_edge;
    std::size_t index;
    std::vector<std::size_t> order;  // candidate indices, best first
    std::vector<double> gain;        // gain[j] for order[j]
  };
  std::vector<Dim> dims;
  for (std::size_t i = 0; i < agp.nodes.size(); ++i) {
    const PGPNode& n = agp.nodes[i];
    if (n.is_unknown()) continue;
    double degree = 0;
    for (const auto& e : agp.edges) {
      if (e.endpoint_a == n.id || e.endpoint_b == n.id) degree += 1;
    }
    Dim d{false, i, {}, {}};
    std::vector<double> raw;
    for (const auto& v : n.relevant_vertices) raw.push_back(degree * v.score);
    d.order.resize(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) d.order[j] = j;
    std::stable_sort(d.order.begin(), d.order.end(),
                     [&](std::size_t x, std::size_t y) { return raw[x] > raw[y]; });
    for (auto j : d.order) d.gain.push_back(raw[j]);
    dims.push_back(std::move(d));
  }
  for (std::size_t i = 0; i < agp.edges.size(); ++i) {
    Dim d{true, i, {}, {}};
    std::vector<double> raw;
    for (const auto& p : agp.edges[i].relevant_predicates) raw.push_back(p.score);
    d.order.resize(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) d.order[j] = j;
    std::stable_sort(d.order.begin(), d.order.end(),
                     [&](std::size_t x, std::size_t y) { return raw[x] > raw[y]; });
    for (auto j : d.order) d.gain.push_back(raw[j]);
    dims.push_back(std::move(d));
  }

  using Point = std::vector<std::size_t>;
  auto priority = [&](const Point& p) {
    double s = 0.0;
    for (std::size_t d = 0; d < dims.size(); ++d) s += dims[d].gain[p[d]];
    return s / static_cast<double>(agp.edges.size());
  };
  using Entry = std::pair<double, Point>;
  auto cmp = [](const Entry& a, const Entry& b) { return a.first < b.first; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);
  std::set<Point> visited;
  Point origin(dims.size(), 0);
  frontier.emplace(priority(origin), origin);
  visited.insert(origin);

  constexpr double kSlack = 1e-9;
  std::vector<Point> collected;
  double kth = 0.0;
  while (!frontier.empty()) {
    if (collected.size() >= k && frontier.top().first < kth - kSlack) break;
    auto [score, point] = frontier.top();
    frontier.pop();
    collected.push_back(point);
    if (collected.size() == k) kth = score;
    for (std::size_t d = 0; d < dims.size(); ++d) {
      if (point[d] + 1 >= dims[d].order.size()) continue;
      Point next = point;
      ++next[d];
      if (visited.insert(next).second) frontier.emplace(priority(next), std::move(next));
    }
  }

  std::vector<BGP> out;
  for (const auto& p : collected) {
    Choice c{std::vector<std::size_t>(agp.nodes.size(), 0),
             std::vector<std::size_t>(agp.edges.size(), 0)};
    for (std::size_t d = 0; d < dims.size(); ++d) {
      (dims[d].is_edge ? c.edge : c.node)[dims[d].index] = dims[d].order[p[d]];
    }
    out.push_back(build(agp, c));
  }
  std::sort(out.begin(), out.end(), ranks_before);
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<BGP> top_bgps(const AGP& agp, std::size_t k) {
  if (count_bgps(agp) > saturating_mul(10, k)) return top_bgps_lazy(agp, k);
  return top_bgps_full(agp, k);
}

std::string to_sparql(const BGP& bgp, const AGP& agp, PlanForm form) {
  std::string where = bgp.serialized();
  const PGPNode* main = agp.main_unknown();
  if (form == PlanForm::kAsk || !main) return "ASK WHERE { " + where + " }";

  std::set<std::string> used;
  for (const auto& t : bgp.triples) {
    if (t.subject.variable) used.insert(t.subject.value);
    if (t.object.variable) used.insert(t.object.value);
  }
  std::string type_var = "c";
  for (int i = 1; used.contains(type_var); ++i) type_var = "c" + std::to_string(i);
  std::string unknown = variable_name(*main);
  return "SELECT DISTINCT ?" + unknown + " ?" + type_var + " WHERE { " + where +
         " . OPTIONAL { ?" + unknown + " <" + std::string(vocab::kRdfType) + "> ?" +
         type_var + " } }";
}

std::vector<QueryPlan> plan(const AGP& agp, const AnswerTypePrediction& prediction,
                            std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "K must be positive");
  PlanForm form = (agp.unknown_count() == 0 || prediction.data_type == DataType::kBoolean)
                      ? PlanForm::kAsk
                      : PlanForm::kSelect;
  std::vector<QueryPlan> plans;
  std::size_t rank = 0;
  for (auto& bgp : top_bgps(agp, k)) {
    QueryPlan p;
    p.sparql = to_sparql(bgp, agp, form);
    p.bgp = std::move(bgp);
    p.rank = ++rank;
    p.form = form;
    plans.push_back(std::move(p));
  }
  return plans;
}

}  // namespace kgqa
