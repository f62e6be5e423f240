#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <future>
#include <set>
#include <thread>

#include "httplib.h"
#include "kgqa/error.h"
#include "kgqa/fixture_endpoint.h"
#include "kgqa/sparql_client.h"
#include "support.h"

namespace kgqa {
namespace {

using namespace std::chrono_literals;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(ResultsParser, TermKinds) {
  auto t = parse_select_results(R"({
    "head": {"vars": ["a", "b", "c", "d", "e"]},
    "results": {"bindings": [
      {"a": {"type": "uri", "value": "http://x"},
       "b": {"type": "literal", "value": "hi", "xml:lang": "en"},
       "c": {"type": "literal", "value": "1", "datatype": "http://www.w3.org/2001/XMLSchema#integer"},
       "d": {"type": "typed-literal", "value": "2", "datatype": "http://www.w3.org/2001/XMLSchema#int"},
       "e": {"type": "bnode", "value": "b0"}},
      {"a": {"type": "uri", "value": "http://y"}}
    ]}})");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(*t.get(0, "a"), RDFTerm::iri("http://x"));
  EXPECT_EQ(t.get(0, "b")->lang, "en");
  EXPECT_EQ(t.get(0, "c")->datatype, "http://www.w3.org/2001/XMLSchema#integer");
  EXPECT_EQ(t.get(0, "d")->datatype, "http://www.w3.org/2001/XMLSchema#int");
  EXPECT_TRUE(t.get(0, "e")->is_blank());
  EXPECT_EQ(t.get(1, "b"), nullptr);
}

TEST(ResultsParser, EmptyResultKeepsVariables) {
  auto t = parse_select_results(R"({"head": {"vars": ["s"]}, "results": {"bindings": []}})");
  EXPECT_EQ(t.variables, (std::vector<std::string>{"s"}));
  EXPECT_TRUE(t.rows.empty());
}

TEST(ResultsParser, MalformedDocuments) {
  for (const char* body : {
           "not json",
           R"({"head": {"vars": ["s"]}})",
           R"({"head": {"vars": ["s"]}, "results": {"bindings": [{"t": {"type": "uri", "value": "x"}}]}})",
           R"({"head": {"vars": ["s"]}, "results": {"bindings": [{"s": {"type": "weird", "value": "x"}}]}})",
           R"({"head": {"vars": ["s"]}, "results": {"bindings": [{"s": {"value": "x"}}]}})",
       }) {
    EXPECT_EQ(code_of([&] { parse_select_results(body); }), ErrorCode::kMalformedResults) << body;
  }
  EXPECT_EQ(code_of([] { parse_ask_result(R"({"head": {}})"); }), ErrorCode::kMalformedResults);
  EXPECT_TRUE(parse_ask_result(R"({"head": {}, "boolean": true})"));
}

RDFTerm random_term(testing::Rng& rng) {
  switch (rng.between(0, 4)) {
    case 0: return RDFTerm::iri("http://example.org/" + rng.word());
    case 1: return RDFTerm::literal(rng.word() + " \"q\" \\ \n" + rng.word());
    case 2: return RDFTerm::literal(rng.word(), std::nullopt, "en");
    case 3: return RDFTerm::literal(std::to_string(rng.between(0, 999)),
                                    "http://www.w3.org/2001/XMLSchema#integer");
    default: return RDFTerm::blank("b" + std::to_string(rng.between(0, 9)));
  }
}

TEST(ResultsParserProperty, WriterRoundTrip) {
  testing::Rng rng(41);
  for (int round = 0; round < 100; ++round) {
    BindingsTable t;
    int nv = rng.between(1, 4);
    for (int i = 0; i < nv; ++i) t.variables.push_back("v" + std::to_string(i));
    int nr = rng.between(0, 6);
    for (int r = 0; r < nr; ++r) {
      std::map<std::string, RDFTerm> row;
      for (const auto& v : t.variables) {
        if (rng.coin(0.8)) row[v] = random_term(rng);
      }
      t.rows.push_back(row);
    }
    auto back = parse_select_results(write_select_results(t));
    ASSERT_EQ(back.variables, t.variables);
    ASSERT_EQ(back.rows, t.rows);
  }
  EXPECT_FALSE(parse_ask_result(write_ask_result(false)));
}

TEST(RenderContains, Dialects) {
  std::vector<std::string> danish = {"Danish", "Straits"};
  EXPECT_EQ(render_contains(Dialect::kVirtuoso, "d_v", danish),
            "?d_v <bif:contains> '(\"Danish\" OR \"Straits\")'");
  std::vector<std::string> one = {"Kaliningrad"};
  EXPECT_EQ(render_contains(Dialect::kGenericRegex, "d_v", one),
            "FILTER(regex(str(?d_v), \"Kaliningrad\", \"i\"))");
  std::string stardog = render_contains(Dialect::kStardog, "d_v", danish);
  EXPECT_NE(stardog.find("textMatch"), std::string::npos);
  EXPECT_NE(stardog.find("?d_v"), std::string::npos);
  std::vector<std::string> special = {"a.b", "c|d"};
  EXPECT_EQ(render_contains(Dialect::kGenericRegex, "x", special),
            "FILTER(regex(str(?x), \"a\\\\.b|c\\\\|d\", \"i\"))");
}

TEST(RenderContains, Errors) {
  std::vector<std::string> none;
  EXPECT_EQ(code_of([&] { render_contains(Dialect::kVirtuoso, "d", none); }),
            ErrorCode::kInvalidArgument);
  std::vector<std::string> only_quotes = {"\"\""};
  EXPECT_EQ(code_of([&] { render_contains(Dialect::kVirtuoso, "d", only_quotes); }),
            ErrorCode::kInvalidArgument);
  std::vector<std::string> ok = {"x"};
  EXPECT_THROW(render_contains(Dialect::kVirtuoso, "bad var", ok), Error);
  EXPECT_EQ(code_of([] { parse_dialect("blazegraph"); }), ErrorCode::kUnsupportedDialect);
}

TEST(RenderContainsProperty, InjectivePerDialect) {
  testing::Rng rng(42);
  for (Dialect d : {Dialect::kVirtuoso, Dialect::kStardog, Dialect::kGenericRegex}) {
    std::map<std::string, std::vector<std::string>> seen;
    for (int i = 0; i < 300; ++i) {
      std::vector<std::string> kws;
      int n = rng.between(1, 3);
      for (int k = 0; k < n; ++k) kws.push_back(rng.word(1, 3) + (rng.coin(0.2) ? "'" : ""));
      std::string r = render_contains(d, "d", kws);
      auto [it, inserted] = seen.emplace(r, kws);
      if (!inserted) EXPECT_EQ(it->second, kws) << r;
    }
  }
}

// Keywords with quotes and apostrophes survive rendering and still select the
// literal through the fixture engine, in every dialect.
TEST(RenderContains, QuotedKeywordEchoThroughFixture) {
  TripleStore store;
  store.add({RDFTerm::iri("http://e/1"), RDFTerm::iri("http://p"),
             RDFTerm::literal("O'Brien's \"Pub\" (Dublin)")});
  store.add({RDFTerm::iri("http://e/2"), RDFTerm::iri("http://p"), RDFTerm::literal("Other")});
  auto ep = std::make_shared<FixtureEndpoint>(std::move(store));
  for (Dialect d : {Dialect::kVirtuoso, Dialect::kStardog, Dialect::kGenericRegex}) {
    for (std::vector<std::string> kws : {std::vector<std::string>{"O'Brien's"},
                                         std::vector<std::string>{"\"Pub\""},
                                         std::vector<std::string>{"(Dublin)", "nothing"}}) {
      testing::FixtureClient fc(ep, d);
      auto t = fc.client->execute_select("SELECT ?v WHERE { ?v ?p ?d . " +
                                         render_contains(d, "d", kws) + " }");
      ASSERT_EQ(t.rows.size(), 1u) << to_string(d) << " " << kws[0];
      EXPECT_EQ(t.get(0, "v")->value, "http://e/1");
    }
  }
}

TEST(SparqlClient, SelectAndAskOverFixture) {
  testing::FixtureClient fc(testing::load_fixture("dbpedia_slice.nt"));
  auto t = fc.client->execute_select(
      "SELECT ?c WHERE { <http://dbpedia.org/resource/Baltic_Sea> "
      "<http://dbpedia.org/ontology/nearestCity> ?c }");
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_TRUE(fc.client->execute_ask(
      "ASK { ?p <http://www.w3.org/2000/01/rdf-schema#label> ?o }"));
  testing::FixtureClient bare(testing::load_fixture("label_free.nt"));
  EXPECT_FALSE(bare.client->execute_ask(
      "ASK { ?p <http://www.w3.org/2000/01/rdf-schema#label> ?o }"));
  auto empty = fc.client->execute_select("SELECT ?x WHERE { ?x <http://nope> ?y }");
  EXPECT_EQ(empty.variables, (std::vector<std::string>{"x"}));
  EXPECT_TRUE(empty.rows.empty());
}

// Scriptable transport for retry and concurrency behaviour.
class ScriptedTransport : public SparqlTransport {
 public:
  std::function<HttpReply(int)> script;
  std::atomic<int> calls{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> max_in_flight{0};
  std::vector<std::chrono::steady_clock::time_point> times;
  std::mutex mu;

  HttpReply send(const EndpointConfig&, std::string_view) override {
    int n = calls++;
    {
      std::lock_guard lock(mu);
      times.push_back(std::chrono::steady_clock::now());
    }
    int now = ++in_flight;
    int prev = max_in_flight.load();
    while (now > prev && !max_in_flight.compare_exchange_weak(prev, now)) {
    }
    struct Done {
      std::atomic<int>& f;
      ~Done() { --f; }
    } done{in_flight};
    return script(n);
  }
};

EndpointConfig scripted_config() {
  EndpointConfig cfg;
  cfg.url = "http://scripted.invalid/sparql";
  cfg.retry_backoff = 20ms;
  return cfg;
}

TEST(SparqlClient, TransportFailureRetriedWithBackoff) {
  auto tr = std::make_shared<ScriptedTransport>();
  tr->script = [](int) -> HttpReply { throw Error(ErrorCode::kTransport, "timed out"); };
  EndpointConfig cfg = scripted_config();
  cfg.max_retries = 2;
  SparqlClient client(cfg, tr);
  EXPECT_EQ(code_of([&] { client.execute_select("SELECT * {}"); }), ErrorCode::kTransport);
  EXPECT_EQ(tr->calls.load(), 3);  // max_retries + 1
  ASSERT_EQ(tr->times.size(), 3u);
  auto gap1 = tr->times[1] - tr->times[0], gap2 = tr->times[2] - tr->times[1];
  EXPECT_GE(gap1, 20ms);
  EXPECT_GE(gap2, 40ms);
}

TEST(SparqlClient, RecoversAfterTransientFailure) {
  auto tr = std::make_shared<ScriptedTransport>();
  tr->script = [](int n) -> HttpReply {
    if (n == 0) throw Error(ErrorCode::kTransport, "reset");
    return {200, write_ask_result(true)};
  };
  SparqlClient client(scripted_config(), tr);
  EXPECT_TRUE(client.execute_ask("ASK {}"));
  EXPECT_EQ(tr->calls.load(), 2);
}

TEST(SparqlClient, HttpErrorsAreNotRetried) {
  auto tr = std::make_shared<ScriptedTransport>();
  tr->script = [](int) -> HttpReply { return {400, "Virtuoso 37000 Error SP030: " + std::string(500, 'x')}; };
  SparqlClient client(scripted_config(), tr);
  try {
    client.execute_select("SELECT * {}");
    FAIL();
  } catch (const EndpointError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_EQ(e.body_excerpt().size(), 300u);
    EXPECT_TRUE(e.body_excerpt().starts_with("Virtuoso 37000"));
  }
  EXPECT_EQ(tr->calls.load(), 1);
}

TEST(SparqlClient, MalformedReply) {
  auto tr = std::make_shared<ScriptedTransport>();
  tr->script = [](int) -> HttpReply { return {200, "<html>oops</html>"}; };
  SparqlClient client(scripted_config(), tr);
  EXPECT_EQ(code_of([&] { client.execute_ask("ASK {}"); }), ErrorCode::kMalformedResults);
}

TEST(SparqlClient, ConnectionLimitBoundsConcurrency) {
  auto tr = std::make_shared<ScriptedTransport>();
  tr->script = [](int) -> HttpReply {
    std::this_thread::sleep_for(15ms);
    return {200, write_ask_result(true)};
  };
  EndpointConfig cfg = scripted_config();
  cfg.connection_limit = 3;
  SparqlClient client(cfg, tr);
  std::vector<std::future<bool>> fs;
  for (int i = 0; i < 12; ++i) {
    fs.push_back(std::async(std::launch::async, [&] { return client.execute_ask("ASK {}"); }));
  }
  for (auto& f : fs) EXPECT_TRUE(f.get());
  EXPECT_LE(tr->max_in_flight.load(), 3);
  EXPECT_GE(tr->max_in_flight.load(), 2);
}

TEST(EndpointConfig, Validation) {
  EndpointConfig cfg;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigError);
  cfg.url = "ftp://example.org/sparql";
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigError);
  cfg.url = "http://example.org/sparql";
  cfg.validate();
  cfg.max_retries = 6;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigError);
  cfg.max_retries = 5;
  cfg.validate();
}

// The real HTTP transport against the fixture served over a socket.
TEST(HttpTransport, ProtocolRoundTrip) {
  auto ep = testing::load_fixture("dbpedia_slice.nt");
  FixtureServer server(ep);
  server.start();
  EndpointConfig cfg;
  cfg.url = server.url();
  cfg.default_graph = "http://dbpedia.org";
  auto t = execute_select(cfg, "SELECT ?t WHERE { <http://dbpedia.org/resource/Baltic_Sea> a ?t }");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.get(0, "t")->value, "http://dbpedia.org/ontology/Sea");
  EXPECT_TRUE(execute_ask(cfg, "ASK { ?s ?p ?o }"));
  try {
    execute_select(cfg, "SELECT ?s WHERE { ?s ?p }");
    FAIL();
  } catch (const EndpointError& e) {
    EXPECT_EQ(e.status(), 400);
  }
  server.stop();
}

TEST(HttpTransport, TimeoutIsTransportErrorAfterRetries) {
  httplib::Server slow;
  std::atomic<int> hits{0};
  slow.Post("/sparql", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    EXPECT_EQ(req.get_header_value("Accept"), "application/sparql-results+json");
    EXPECT_TRUE(req.has_param("query"));
    std::this_thread::sleep_for(400ms);
    res.set_content(write_ask_result(true), "application/sparql-results+json");
  });
  int port = slow.bind_to_any_port("127.0.0.1");
  std::thread th([&] { slow.listen_after_bind(); });
  slow.wait_until_ready();
  EndpointConfig cfg;
  cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/sparql";
  cfg.request_timeout = 100ms;
  cfg.max_retries = 1;
  cfg.retry_backoff = 10ms;
  EXPECT_EQ(code_of([&] { execute_ask(cfg, "ASK {}"); }), ErrorCode::kTransport);
  std::this_thread::sleep_for(500ms);
  EXPECT_EQ(hits.load(), 2);
  slow.stop();
  th.join();
}

TEST(HttpTransport, UnreachableEndpoint) {
  EndpointConfig cfg;
  cfg.url = "http://127.0.0.1:1/sparql";
  cfg.max_retries = 0;
  EXPECT_EQ(code_of([&] { execute_ask(cfg, "ASK {}"); }), ErrorCode::kTransport);
}

}  // namespace
}  // namespace kgqa
