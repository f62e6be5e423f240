#include "kgqa/json_io.h"

#include "kgqa/error.h"

namespace kgqa::json_io {

namespace {

template <typename F>
auto guarded(std::string_view what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "invalid " + std::string(what) + ": " + e.what());
  }
}

std::string_view kind_name(NodeKind k) { return k == NodeKind::kEntity ? "entity" : "unknown"; }

}  // namespace

Json to_json(const PhraseTerm& term) {
  Json j = {{"label", term.label},
            {"category", term.is_variable() ? "variable" : "entity"}};
  j["var_id"] = term.var_id ? Json(*term.var_id) : Json(nullptr);
  return j;
}

Json to_json(const PhraseTriplePattern& p) {
  return {{"subject", to_json(p.subject)},
          {"relation_label", p.relation_label},
          {"object", to_json(p.object)}};
}

Json to_json(const AnswerTypePrediction& p) {
  Json j = {{"data_type", std::string(to_string(p.data_type))}};
  j["semantic_type"] = p.semantic_type ? Json(*p.semantic_type) : Json(nullptr);
  return j;
}

Json to_json(const RelevantVertex& v) {
  return {{"iri", v.iri}, {"description", v.description}, {"score", v.score}};
}

Json to_json(const RelevantPredicate& p) {
  return {{"iri", p.iri},
          {"description", p.description},
          {"score", p.score},
          {"anchor_vertex", p.anchor_vertex},
          {"object_flag", p.object_flag}};
}

Json to_json(const PGP& pgp) {
  Json nodes = Json::array();
  for (const auto& n : pgp.nodes) {
    Json vs = Json::array();
    for (const auto& v : n.relevant_vertices) vs.push_back(to_json(v));
    Json jn = {{"id", n.id},
               {"label", n.label},
               {"kind", std::string(kind_name(n.kind))},
               {"is_main", n.is_main},
               {"relevant_vertices", std::move(vs)}};
    jn["var_id"] = n.var_id ? Json(*n.var_id) : Json(nullptr);
    nodes.push_back(std::move(jn));
  }
  Json edges = Json::array();
  for (const auto& e : pgp.edges) {
    Json ps = Json::array();
    for (const auto& p : e.relevant_predicates) ps.push_back(to_json(p));
    edges.push_back({{"id", e.id},
                     {"label", e.label},
                     {"endpoint_a", e.endpoint_a},
                     {"endpoint_b", e.endpoint_b},
                     {"relevant_predicates", std::move(ps)}});
  }
  Json j = {{"nodes", std::move(nodes)},
            {"edges", std::move(edges)},
            {"boolean_question", pgp.boolean_question}};
  j["prediction"] = pgp.prediction ? to_json(*pgp.prediction) : Json(nullptr);
  if (!pgp.edges.empty()) j["shape"] = std::string(to_string(classify_shape(pgp)));
  return j;
}

Json to_json(const BGPTerm& t) { return t.variable ? "?" + t.value : t.value; }

Json to_json(const BGP& bgp) {
  Json triples = Json::array();
  for (const auto& t : bgp.triples) {
    triples.push_back({{"subject", to_json(t.subject)},
                       {"predicate", t.predicate},
                       {"object", to_json(t.object)},
                       {"edge_id", t.edge_id}});
  }
  return {{"triples", std::move(triples)}, {"score", bgp.score}};
}

Json to_json(const QueryPlan& plan) {
  return {{"rank", plan.rank},
          {"form", plan.form == PlanForm::kAsk ? "ask" : "select"},
          {"score", plan.bgp.score},
          {"sparql", plan.sparql},
          {"bgp", to_json(plan.bgp)}};
}

Json to_json(const RDFTerm& t) {
  std::string kind = t.is_iri() ? "iri" : (t.is_literal() ? "literal" : "bnode");
  Json j = {{"kind", kind}, {"value", t.value}};
  if (t.datatype) j["datatype"] = *t.datatype;
  if (t.lang) j["lang"] = *t.lang;
  return j;
}

Json to_json(const BindingsTable& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::object();
    for (const auto& [k, v] : row) r[k] = to_json(v);
    rows.push_back(std::move(r));
  }
  return {{"variables", table.variables}, {"rows", std::move(rows)}};
}

Json to_json(const RawAnswer& a) {
  return {{"term", to_json(a.term)},
          {"class_types", a.class_types},
          {"source_rank", a.source_rank}};
}

Json to_json(const DroppedAnswer& d) {
  return {{"answer", to_json(d.answer)}, {"reason", d.reason}};
}

Json to_json(const Prf& prf) {
  return {{"p", prf.precision}, {"r", prf.recall}, {"f1", prf.f1}};
}

// ---------------------------------------------------------------------------

PhraseTerm term_from_json(const Json& j) {
  return guarded("phrase term", [&] {
    std::string category = j.value("category", "entity");
    std::string label = j.value("label", "");
    if (category == "variable") {
      return PhraseTerm::variable(j.at("var_id").get<int>(), label);
    }
    if (category != "entity") {
      throw Error(ErrorCode::kInvalidArgument, "unknown term category '" + category + "'");
    }
    return PhraseTerm::entity(label);
  });
}

PhraseTriplePattern pattern_from_json(const Json& j) {
  return guarded("phrase triple pattern", [&] {
    PhraseTriplePattern p;
    p.subject = term_from_json(j.at("subject"));
    p.relation_label = j.contains("relation_label") ? j.at("relation_label").get<std::string>()
                                                    : j.at("relation").get<std::string>();
    p.object = term_from_json(j.at("object"));
    validate(p);
    return p;
  });
}

AnswerTypePrediction prediction_from_json(const Json& j) {
  return guarded("answer type prediction", [&] {
    AnswerTypePrediction p;
    p.data_type = parse_data_type(j.at("data_type").get<std::string>());
    if (j.contains("semantic_type") && !j["semantic_type"].is_null()) {
      if (p.data_type != DataType::kString) {
        throw Error(ErrorCode::kInvalidArgument,
                    "semantic_type is only allowed with data_type string");
      }
      p.semantic_type = j["semantic_type"].get<std::string>();
    }
    return p;
  });
}

PGP pgp_from_json(const Json& j) {
  return guarded("graph pattern", [&] {
    PGP pgp;
    for (const auto& jn : j.at("nodes")) {
      PGPNode n;
      n.id = jn.at("id").get<std::string>();
      n.label = jn.value("label", "");
      std::string kind = jn.at("kind").get<std::string>();
      if (kind != "entity" && kind != "unknown") {
        throw Error(ErrorCode::kInvalidArgument, "unknown node kind '" + kind + "'");
      }
      n.kind = kind == "entity" ? NodeKind::kEntity : NodeKind::kUnknown;
      n.is_main = jn.value("is_main", false);
      if (jn.contains("var_id") && !jn["var_id"].is_null()) n.var_id = jn["var_id"].get<int>();
      if (jn.contains("relevant_vertices")) {
        for (const auto& v : jn["relevant_vertices"]) {
          n.relevant_vertices.push_back({v.at("iri").get<std::string>(),
                                         v.value("description", ""),
                                         v.at("score").get<double>()});
        }
      }
      pgp.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
      PGPEdge e;
      e.id = je.at("id").get<std::string>();
      e.label = je.value("label", "");
      e.endpoint_a = je.at("endpoint_a").get<std::string>();
      e.endpoint_b = je.at("endpoint_b").get<std::string>();
      if (je.contains("relevant_predicates")) {
        for (const auto& p : je["relevant_predicates"]) {
          e.relevant_predicates.push_back({p.at("iri").get<std::string>(),
                                           p.value("description", ""),
                                           p.at("score").get<double>(),
                                           p.at("anchor_vertex").get<std::string>(),
                                           p.value("object_flag", false)});
        }
      }
      pgp.node(e.endpoint_a);
      pgp.node(e.endpoint_b);
      if (e.endpoint_a == e.endpoint_b) {
        throw Error(ErrorCode::kInvalidArgument, "edge " + e.id + " is a self loop");
      }
      pgp.edges.push_back(std::move(e));
    }
    pgp.boolean_question = j.value("boolean_question", false);
    if (j.contains("prediction") && !j["prediction"].is_null()) {
      pgp.prediction = prediction_from_json(j["prediction"]);
    }
    return pgp;
  });
}

BGP bgp_from_json(const Json& j) {
  return guarded("basic graph pattern", [&] {
    auto term = [](const Json& t) {
      std::string s = t.get<std::string>();
      if (!s.empty() && s[0] == '?') return BGPTerm{true, s.substr(1)};
      return BGPTerm{false, s};
    };
    BGP bgp;
    for (const auto& t : j.at("triples")) {
      bgp.triples.push_back({term(t.at("subject")), t.at("predicate").get<std::string>(),
                             term(t.at("object")), t.value("edge_id", "")});
    }
    bgp.score = j.value("score", 0.0);
    return bgp;
  });
}

RDFTerm rdf_term_from_json(const Json& j) {
  return guarded("RDF term", [&] {
    std::string kind = j.at("kind").get<std::string>();
    std::string value = j.at("value").get<std::string>();
    if (kind == "iri") return RDFTerm::iri(value);
    if (kind == "bnode") return RDFTerm::blank(value);
    if (kind != "literal") {
      throw Error(ErrorCode::kInvalidArgument, "unknown RDF term kind '" + kind + "'");
    }
    std::optional<std::string> dt, lang;
    if (j.contains("datatype")) dt = j["datatype"].get<std::string>();
    if (j.contains("lang")) lang = j["lang"].get<std::string>();
    return RDFTerm::literal(value, dt, lang);
  });
}

}  // namespace kgqa::json_io
