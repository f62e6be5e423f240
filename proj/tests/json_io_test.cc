#include <gtest/gtest.h>

#include "kgqa/error.h"
#include "kgqa/json_io.h"
#include "support.h"

namespace kgqa {
namespace {

using json_io::Json;

TEST(JsonIo, PatternRoundTrip) {
  PhraseTriplePattern p{PhraseTerm::variable(1), "city on shore", PhraseTerm::entity("Kaliningrad")};
  Json j = json_io::to_json(p);
  EXPECT_EQ(j["subject"]["category"], "variable");
  EXPECT_EQ(j["subject"]["var_id"], 1);
  EXPECT_EQ(j["object"]["var_id"], nullptr);
  EXPECT_EQ(json_io::pattern_from_json(j), p);
  // "relation" is accepted as an alias.
  Json alias = {{"subject", {{"category", "variable"}, {"var_id", 1}}},
                {"relation", "flow"},
                {"object", {{"label", "Danish Straits"}}}};
  EXPECT_EQ(json_io::pattern_from_json(alias).relation_label, "flow");
}

TEST(JsonIo, PatternErrors) {
  EXPECT_THROW(json_io::pattern_from_json(Json::object()), Error);
  EXPECT_THROW(json_io::term_from_json({{"category", "thing"}}), Error);
  EXPECT_THROW(json_io::term_from_json({{"category", "variable"}}), Error);
  Json self = {{"subject", {{"label", "A"}}}, {"relation", "r"}, {"object", {{"label", "A"}}}};
  EXPECT_THROW(json_io::pattern_from_json(self), Error);
}

TEST(JsonIo, PredictionRoundTrip) {
  for (AnswerTypePrediction p : {AnswerTypePrediction{DataType::kString, "sea"},
                                 AnswerTypePrediction{DataType::kDate, std::nullopt},
                                 AnswerTypePrediction{DataType::kBoolean, std::nullopt}}) {
    EXPECT_EQ(json_io::prediction_from_json(json_io::to_json(p)), p);
  }
  EXPECT_THROW(json_io::prediction_from_json({{"data_type", "date"}, {"semantic_type", "x"}}), Error);
  EXPECT_THROW(json_io::prediction_from_json({{"data_type", "colour"}}), Error);
}

TEST(JsonIo, PgpRoundTripProperty) {
  testing::Rng rng(23);
  for (int round = 0; round < 100; ++round) {
    std::vector<PhraseTriplePattern> ps;
    int n = rng.between(1, 4);
    for (int i = 0; i < n; ++i) {
      PhraseTerm other = rng.coin(0.3) ? PhraseTerm::variable(2) : PhraseTerm::entity(rng.word(3, 7));
      ps.push_back({PhraseTerm::variable(1), rng.word(2, 6), other});
    }
    PGP pgp = build_pgp(ps, rng.coin(0.2));
    for (auto& node : pgp.nodes) {
      if (!node.is_unknown()) node.relevant_vertices.push_back({"http://x/" + node.label, node.label, rng.uniform(0, 1)});
    }
    for (auto& e : pgp.edges) {
      e.relevant_predicates.push_back({"http://x/p/" + e.label, e.label, rng.uniform(-1, 1), "http://x/a", rng.coin()});
    }
    if (rng.coin()) pgp.prediction = AnswerTypePrediction{DataType::kString, rng.word(3, 6)};
    Json j = json_io::to_json(pgp);
    PGP back = json_io::pgp_from_json(j);
    EXPECT_EQ(json_io::to_json(back), j);
    EXPECT_EQ(back.to_patterns(), pgp.to_patterns());
  }
}

TEST(JsonIo, PgpErrors) {
  Json bad_edge = {{"nodes", {{{"id", "n0"}, {"kind", "entity"}}}},
                   {"edges", {{{"id", "e0"}, {"endpoint_a", "n0"}, {"endpoint_b", "n9"}}}}};
  EXPECT_THROW(json_io::pgp_from_json(bad_edge), Error);
  Json loop = {{"nodes", {{{"id", "n0"}, {"kind", "entity"}}}},
               {"edges", {{{"id", "e0"}, {"endpoint_a", "n0"}, {"endpoint_b", "n0"}}}}};
  EXPECT_THROW(json_io::pgp_from_json(loop), Error);
  Json kind = {{"nodes", {{{"id", "n0"}, {"kind", "blob"}}}}, {"edges", Json::array()}};
  EXPECT_THROW(json_io::pgp_from_json(kind), Error);
}

TEST(JsonIo, BgpRoundTrip) {
  BGP bgp;
  bgp.triples.push_back({{true, "unknown1"}, "http://x/p", {false, "http://x/o"}, "e0"});
  bgp.triples.push_back({{false, "http://x/s"}, "http://x/q", {true, "unknown2"}, "e1"});
  bgp.score = 1.25;
  Json j = json_io::to_json(bgp);
  EXPECT_EQ(j["triples"][0]["subject"], "?unknown1");
  EXPECT_EQ(json_io::bgp_from_json(j), bgp);
}

TEST(JsonIo, RdfTermRoundTrip) {
  for (const RDFTerm& t : {RDFTerm::iri("http://x/a"), RDFTerm::blank("b0"),
                           RDFTerm::literal("Ostsee", std::nullopt, "de"),
                           RDFTerm::literal("418", "http://www.w3.org/2001/XMLSchema#positiveInteger"),
                           RDFTerm::literal("plain")}) {
    Json j = json_io::to_json(t);
    EXPECT_EQ(json_io::to_json(json_io::rdf_term_from_json(j)), j);
  }
  EXPECT_THROW(json_io::rdf_term_from_json({{"kind", "quoted"}, {"value", "x"}}), Error);
}

TEST(JsonIo, PrfAndAnswers) {
  EXPECT_EQ(json_io::to_json(Prf{0.5, 1.0, 2.0 / 3}),
            (Json{{"p", 0.5}, {"r", 1.0}, {"f1", 2.0 / 3}}));
  RawAnswer a{RDFTerm::iri("http://x/a"), {"http://x/C"}, 3};
  Json j = json_io::to_json(DroppedAnswer{a, "semantic_type_mismatch"});
  EXPECT_EQ(j["answer"]["source_rank"], 3);
  EXPECT_EQ(j["answer"]["class_types"][0], "http://x/C");
  EXPECT_EQ(j["reason"], "semantic_type_mismatch");
}

}  // namespace
}  // namespace kgqa
