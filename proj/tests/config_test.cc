#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "kgqa/config.h"
#include "kgqa/error.h"
#include "support.h"

namespace kgqa {
namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

TEST(Config, Defaults) {
  PipelineConfig cfg;
  EXPECT_EQ(cfg.linker.max_fetched_vertices, 400u);
  EXPECT_EQ(cfg.linker.vertices_per_node, 1u);
  EXPECT_EQ(cfg.linker.predicates_per_edge, 20u);
  EXPECT_EQ(cfg.linker.predicates_per_vertex_limit, 100u);
  EXPECT_EQ(cfg.max_queries, 40u);
  EXPECT_DOUBLE_EQ(cfg.tau, 0.5);
  EXPECT_EQ(cfg.parallelism, 4u);
  EXPECT_EQ(cfg.endpoint.connection_limit, 8);
  EXPECT_EQ(cfg.endpoint.max_retries, 2);
  EXPECT_EQ(cfg.qu.kind, QUProviderKind::kOfflineExtractor);
  // Nothing to query yet.
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Config, PrecedenceFileEnvSettingOverride) {
  PipelineConfig cfg;
  apply_config_text(cfg, "endpoint = http://file.example/sparql\nmax-vr = 100\nk_vertices = 2\ntau = 0.4\n");
  EXPECT_EQ(cfg.endpoint.url, "http://file.example/sparql");
  EXPECT_EQ(cfg.linker.max_fetched_vertices, 100u);

  apply_env(cfg, env_of({{"KGQA_MAX_VR", "200"}, {"KGQA_TAU", "0.3"}, {"UNRELATED", "1"}}));
  EXPECT_EQ(cfg.linker.max_fetched_vertices, 200u);
  EXPECT_DOUBLE_EQ(cfg.tau, 0.3);
  EXPECT_EQ(cfg.linker.vertices_per_node, 2u);

  apply_setting(cfg, "max-vr", "300");
  EXPECT_EQ(cfg.linker.max_fetched_vertices, 300u);

  apply_overrides(cfg, {{"max_vr", 50}, {"tau", 0.75}, {"dialect", "stardog"}});
  EXPECT_EQ(cfg.linker.max_fetched_vertices, 50u);
  EXPECT_DOUBLE_EQ(cfg.tau, 0.75);
  EXPECT_EQ(cfg.endpoint.dialect, Dialect::kStardog);
  EXPECT_EQ(cfg.linker.vertices_per_node, 2u);
  cfg.validate();
}

TEST(Config, EveryNameIsAcceptedEverywhere) {
  const std::map<std::string, std::string> samples = {
      {"endpoint", "http://x.example/sparql"}, {"dialect", "generic_regex"}, {"embeddings", ""},
      {"max-vr", "10"}, {"k-vertices", "2"}, {"k-predicates", "5"}, {"per-vertex-limit", "7"},
      {"max-queries", "9"}, {"tau", "0.1"}, {"qu-url", ""}, {"qu-timeout-ms", "500"},
      {"parallelism", "2"}, {"fixture", ""}, {"timeout-ms", "1000"}, {"max-retries", "3"},
      {"default-graph", "http://g"}, {"connection-limit", "4"}, {"coarse-url", ""}};
  ASSERT_EQ(samples.size(), setting_names().size());
  for (const auto& name : setting_names()) {
    ASSERT_TRUE(samples.contains(name)) << name;
    PipelineConfig a, b, c;
    apply_setting(a, name, samples.at(name));
    apply_config_text(b, name + " = " + samples.at(name));
    std::string var = "KGQA_";
    for (char ch : name) var.push_back(ch == '-' ? '_' : static_cast<char>(std::toupper(ch)));
    apply_env(c, env_of({{var, samples.at(name)}}));
    EXPECT_EQ(config_to_json(a), config_to_json(b)) << name;
    EXPECT_EQ(config_to_json(a), config_to_json(c)) << name;
  }
}

TEST(Config, TextErrorsCarryLineNumbers) {
  auto line_of = [](std::string_view text) -> std::size_t {
    PipelineConfig cfg;
    try {
      apply_config_text(cfg, text);
    } catch (const LineError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfigError);
      return e.line();
    }
    ADD_FAILURE() << "accepted: " << text;
    return 0;
  };
  EXPECT_EQ(line_of("max-vr = 10\n# comment\nbogus = 1\n"), 3u);
  EXPECT_EQ(line_of("\n\nmax-vr = zero"), 3u);
  EXPECT_EQ(line_of("tau 0.5"), 1u);
  EXPECT_EQ(line_of("max-vr = 1\n = 3"), 2u);
  EXPECT_EQ(line_of("k-vertices = 0"), 1u);
  EXPECT_EQ(line_of("dialect = oracle"), 1u);
  PipelineConfig ok;
  apply_config_text(ok, "  # only comments\n\nmax-vr = 12   # trailing\n");
  EXPECT_EQ(ok.linker.max_fetched_vertices, 12u);
}

TEST(Config, FileResolvesRelativePaths) {
  auto dir = std::filesystem::temp_directory_path() / "kgqa_config_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "k.conf";
  {
    std::ofstream out(path);
    out << "fixture = a.nt, sub/b.nt\nembeddings = /abs/vectors.txt\n";
  }
  PipelineConfig cfg;
  apply_config_file(cfg, path);
  ASSERT_EQ(cfg.fixture.size(), 2u);
  EXPECT_EQ(cfg.fixture[0], dir / "a.nt");
  EXPECT_EQ(cfg.fixture[1], dir / "sub/b.nt");
  EXPECT_EQ(*cfg.embedding_path, std::filesystem::path("/abs/vectors.txt"));
  {
    std::ofstream out(path);
    out << "max-vr = 1\nnonsense\n";
  }
  try {
    apply_config_file(cfg, path);
    FAIL();
  } catch (const LineError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("k.conf"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
  EXPECT_THROW(apply_config_file(cfg, dir / "missing.conf"), Error);
}

TEST(Config, EnvErrorsNameTheVariable) {
  PipelineConfig cfg;
  try {
    apply_env(cfg, env_of({{"KGQA_PARALLELISM", "many"}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    EXPECT_NE(std::string(e.what()).find("KGQA_PARALLELISM"), std::string::npos);
  }
}

TEST(Config, OverrideValueKinds) {
  PipelineConfig cfg;
  apply_overrides(cfg, {{"fixture", {"a.nt", "b.nt"}}, {"qu-url", "http://qu.example/"}});
  EXPECT_EQ(cfg.fixture.size(), 2u);
  EXPECT_EQ(cfg.qu.kind, QUProviderKind::kRemoteModel);
  apply_overrides(cfg, {{"qu_url", nullptr}});
  EXPECT_EQ(cfg.qu.kind, QUProviderKind::kOfflineExtractor);
  EXPECT_THROW(apply_overrides(cfg, {{"tau", true}}), Error);
  EXPECT_THROW(apply_overrides(cfg, {{"fixture", {1, 2}}}), Error);
  EXPECT_THROW(apply_overrides(cfg, nlohmann::json::array()), Error);
  EXPECT_THROW(apply_overrides(cfg, {{"nope", 1}}), Error);
}

TEST(Config, Validation) {
  PipelineConfig cfg;
  cfg.endpoint.url = "http://x.example/sparql";
  cfg.validate();
  auto invalid = [&](auto mutate) {
    PipelineConfig c = cfg;
    mutate(c);
    EXPECT_THROW(c.validate(), Error);
  };
  invalid([](PipelineConfig& c) { c.tau = 1.5; });
  invalid([](PipelineConfig& c) { c.endpoint.max_retries = 6; });
  invalid([](PipelineConfig& c) { c.endpoint.max_retries = -1; });
  invalid([](PipelineConfig& c) { c.endpoint.url = "not a url"; });
  invalid([](PipelineConfig& c) { c.linker.max_fetched_vertices = 0; });
  invalid([](PipelineConfig& c) {
    c.qu.kind = QUProviderKind::kRemoteModel;
    c.qu.endpoint_url.reset();
  });
  PipelineConfig fixture_only;
  fixture_only.fixture = {testing::fixture_path("dbpedia_slice.nt")};
  fixture_only.validate();
}

}  // namespace
}  // namespace kgqa
