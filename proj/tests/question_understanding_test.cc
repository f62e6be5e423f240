#include <gtest/gtest.h>

#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "kgqa/error.h"
#include "kgqa/question_understanding.h"
#include "kgqa/text_util.h"
#include "oracles.h"
#include "support.h"

namespace kgqa {
namespace {

using P = PhraseTriplePattern;
using testing::kRunningExample;
using testing::kTypeTable;

PhraseTerm var(int id) { return PhraseTerm::variable(id); }
PhraseTerm ent(std::string label) { return PhraseTerm::entity(std::move(label)); }


TEST(PatternCodec, EncodeSingleTriple) {
  std::vector<P> ps = {{var(1), "flow", ent("Danish Straits")}};
  EXPECT_EQ(encode_patterns(ps), "[e1] var:1 [r] flow [e2] Danish Straits");
}

TEST(PatternCodec, ParseRunningExample) {
  auto ps = parse_model_output(
      "[e1] var:1 [r] flow [e2] Danish Straits | [e1] var:1 [r] city on shore [e2] Kaliningrad");
  std::vector<P> expected = {{var(1), "flow", ent("Danish Straits")},
                             {var(1), "city on shore", ent("Kaliningrad")}};
  EXPECT_EQ(ps, expected);
}

std::size_t malformed_offset(std::string_view text) {
  try {
    parse_model_output(text);
  } catch (const MalformedModelOutput& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedModelOutput);
    return e.offset();
  }
  ADD_FAILURE() << "accepted: " << text;
  return 0;
}

TEST(PatternCodec, MalformedInputsReportOffsets) {
  malformed_offset("[e1] [r] [e2]");
  EXPECT_EQ(malformed_offset(""), 0u);
  EXPECT_EQ(malformed_offset("e1 var:1 [r] x [e2] y"), 0u);
  // Relation marker missing: the parser stops at the next '['.
  EXPECT_EQ(malformed_offset("[e1] var:1 [e2] y"), 11u);
  // Empty relation label sits right after " [r] ".
  EXPECT_EQ(malformed_offset("[e1] a [r]  [e2] b"), 11u);
  EXPECT_EQ(malformed_offset("[e1] var:x [r] r [e2] b"), 5u);
  EXPECT_EQ(malformed_offset("[e1] var:1 [r] r [e2] var:1"), 22u);
  EXPECT_EQ(malformed_offset("[e1] a [r] r [e2] b |"), 19u);
  EXPECT_EQ(malformed_offset("[e1] a [r] r [e2] b | [e1] c"), 28u);
}

TEST(PatternCodec, EncodeRejectsUnencodableLabels) {
  std::vector<P> bracket = {{var(1), "r[1]", ent("A")}};
  EXPECT_THROW(encode_patterns(bracket), Error);
  std::vector<P> looks_like_var = {{var(1), "r", ent("var:3")}};
  EXPECT_THROW(encode_patterns(looks_like_var), Error);
  std::vector<P> var_prefix = {{var(1), "r", ent("var: b")}};
  EXPECT_THROW(encode_patterns(var_prefix), Error);
}


TEST(PatternCodecProperty, RoundTrip200) {
  testing::Rng rng(21);
  for (int round = 0; round < 200; ++round) {
    std::vector<P> ps = testing::random_pattern_list(rng);
    std::string text = encode_patterns(ps);
    ASSERT_EQ(parse_model_output(text), ps) << text;
  }
}


TEST(DataTypeRules, FortyQuestionTable) {
  static_assert(std::size(kTypeTable) == 40);
  for (const auto& row : kTypeTable) {
    EXPECT_EQ(predict_data_type(row.question), row.expected) << row.question;
  }
}

TEST(DataTypeRules, LeadingAuxiliaryAlwaysBoolean) {
  testing::Rng rng(22);
  const std::vector<std::string> aux = {"is", "are", "was", "were", "did", "does", "do",
                                        "Is", "DOES"};
  for (int i = 0; i < 100; ++i) {
    std::string q = rng.pick(aux);
    int n = rng.between(0, 6);
    for (int j = 0; j < n; ++j) q += " " + rng.word();
    if (rng.coin()) q += " when how many";
    EXPECT_EQ(predict_data_type(q), DataType::kBoolean) << q;
  }
}

TEST(SemanticType, FirstNounAfterQuestionWord) {
  EXPECT_EQ(predict_semantic_type("In which city is the headquarters of Air China?"), "city");
  EXPECT_EQ(predict_semantic_type(kRunningExample), "sea");
  EXPECT_EQ(predict_semantic_type("Who wrote Dracula?"), "person");
  EXPECT_EQ(predict_semantic_type("Give me all books written by Bram Stoker."), "books");
  EXPECT_EQ(predict_semantic_type("Berlin Germany"), std::nullopt);
}

TEST(AnswerType, SemanticTypeOnlyForStrings) {
  QUProviderConfig offline;
  auto p = predict_answer_type("Is Berlin in Germany?", offline);
  EXPECT_EQ(p.data_type, DataType::kBoolean);
  EXPECT_FALSE(p.semantic_type.has_value());
  p = predict_answer_type(kRunningExample, offline);
  EXPECT_EQ(p.data_type, DataType::kString);
  EXPECT_EQ(p.semantic_type, "sea");
}

TEST(OfflineExtractor, RunningExample) {
  QUProviderConfig offline;
  auto ps = extract_triple_patterns(kRunningExample, offline);
  std::vector<P> expected = {{var(1), "flow", ent("Danish Straits")},
                             {var(1), "city on shore", ent("Kaliningrad")}};
  EXPECT_EQ(ps, expected);
}

TEST(OfflineExtractor, SimpleFrames) {
  QUProviderConfig offline;
  std::vector<P> wrote = {{var(1), "wrote", ent("Dracula")}};
  EXPECT_EQ(extract_triple_patterns("Who wrote Dracula?", offline), wrote);
  std::vector<P> boolean = {{ent("Dracula"), "written by", ent("Bram Stoker")}};
  EXPECT_EQ(extract_triple_patterns("Is Dracula written by Bram Stoker?", offline), boolean);
  std::vector<P> quoted = {{var(1), "directed", ent("the last of us")}};
  EXPECT_EQ(extract_triple_patterns("Who directed \"the last of us\"?", offline), quoted);
}

TEST(OfflineExtractor, EmptyQuestionRejected) {
  QUProviderConfig offline;
  EXPECT_THROW(extract_triple_patterns("   ", offline), Error);
}

// Every label is a contiguous phrase of the question once whitespace is
// normalised and articles are dropped; relation verbs may be lemmatised
// (flows -> flow), so a relation also matches when its words are prefixes of
// consecutive question words.
bool phrase_of(const std::vector<std::string>& q, const std::vector<std::string>& label,
               bool allow_stem) {
  for (std::size_t i = 0; i + label.size() <= q.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < label.size() && ok; ++j) {
      ok = q[i + j] == label[j] || (allow_stem && q[i + j].starts_with(label[j]));
    }
    if (ok) return true;
  }
  return false;
}

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  for (auto& w : text::split_whitespace(text::to_lower(s))) {
    while (!w.empty() && std::string_view("?.,!\"").find(w.back()) != std::string_view::npos) {
      w.pop_back();
    }
    while (!w.empty() && w.front() == '"') w.erase(w.begin());
    if (w == "the" || w == "a" || w == "an" || w.empty()) continue;
    out.push_back(w);
  }
  return out;
}

TEST(OfflineExtractorProperty, LabelsArePhrasesOfTheQuestion) {
  testing::Rng rng(23);
  const std::vector<std::string> openers = {"Who", "What", "Which city", "Name the river that",
                                            "Give me the book that", "Where"};
  const std::vector<std::string> verbs = {"wrote", "flows into", "is the capital of",
                                          "borders", "was born in", "directed", "owns"};
  const std::vector<std::string> entities = {"Dracula", "Danish Straits", "Air China",
                                             "Kaliningrad", "Bank of America", "Baltic Sea"};
  for (int round = 0; round < 150; ++round) {
    std::string q = rng.pick(openers) + " " + rng.pick(verbs) + "  the " + rng.pick(entities);
    if (rng.coin()) q += " and " + rng.pick(verbs) + " " + rng.pick(entities);
    q += "?";
    std::vector<P> ps;
    try {
      ps = extract_offline(q);
    } catch (const Error&) {
      continue;
    }
    auto qw = content_words(q);
    for (const auto& p : ps) {
      EXPECT_TRUE(phrase_of(qw, content_words(p.relation_label), true)) << q;
      for (const auto* t : {&p.subject, &p.object}) {
        if (!t->is_variable()) EXPECT_TRUE(phrase_of(qw, content_words(t->label), false)) << q;
      }
    }
  }
}

// Remote provider against an in-process stub.
class RemoteProvider : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/extract", [this](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body);
      last_question_ = body["question"];
      res.set_content(reply_, "application/json");
    });
    server_.Post("/datatype", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"data_type": "date"})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    cfg_.kind = QUProviderKind::kRemoteModel;
    cfg_.endpoint_url = "http://127.0.0.1:" + std::to_string(port_) + "/";
    cfg_.timeout = std::chrono::milliseconds(2000);
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  QUProviderConfig cfg_;
  std::string reply_;
  std::string last_question_;
};

TEST_F(RemoteProvider, ExtractsPatterns) {
  reply_ = R"({"patterns": [{"subject": {"label": "", "category": "variable", "var_id": 1},
                "relation": "flow", "object": {"label": "Danish Straits", "category": "entity"}}]})";
  auto ps = extract_triple_patterns("Which sea flows into the Danish Straits?", cfg_);
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].relation_label, "flow");
  EXPECT_EQ(ps[0].object.label, "Danish Straits");
  EXPECT_EQ(last_question_, "Which sea flows into the Danish Straits?");
  EXPECT_EQ(predict_answer_type("anything", cfg_).data_type, DataType::kDate);
}

TEST_F(RemoteProvider, EmptyAndMalformedReplies) {
  reply_ = R"({"patterns": []})";
  try {
    extract_triple_patterns("q", cfg_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoPatternsExtracted);
  }
  reply_ = R"({"patterns": [{"subject": {"category": "variable"}, "relation": "r", "object": {"label": "A"}}]})";
  EXPECT_THROW(extract_triple_patterns("q", cfg_), MalformedModelOutput);
  reply_ = R"({"patterns": [{"relation": "r"}]})";
  EXPECT_THROW(extract_triple_patterns("q", cfg_), MalformedModelOutput);
}

TEST(RemoteProviderDown, ProviderUnavailable) {
  QUProviderConfig cfg;
  cfg.kind = QUProviderKind::kRemoteModel;
  cfg.endpoint_url = "http://127.0.0.1:1";
  cfg.timeout = std::chrono::milliseconds(500);
  try {
    extract_triple_patterns("Who wrote Dracula?", cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProviderUnavailable);
  }
}

TEST(ProviderConfig, Validation) {
  QUProviderConfig cfg;
  cfg.kind = QUProviderKind::kRemoteModel;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.kind = QUProviderKind::kOfflineExtractor;
  cfg.endpoint_url = "http://x";
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace kgqa
