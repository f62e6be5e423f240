#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "kgqa/embeddings.h"
#include "kgqa/fixture_endpoint.h"
#include "kgqa/sparql_client.h"

namespace kgqa::testing {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(KGQA_DATA_DIR) / rel;
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return data_path("fixtures/" + name);
}

inline std::shared_ptr<const EmbeddingStore> fixture_store() {
  static auto store = std::make_shared<const EmbeddingStore>(
      EmbeddingStore::load(fixture_path("embeddings.txt")));
  return store;
}

inline std::shared_ptr<FixtureEndpoint> load_fixture(const std::string& name,
                                                     FixtureOptions options = {}) {
  return FixtureEndpoint::load({fixture_path(name)}, options);
}

// Client wired straight into a fixture endpoint. Each client gets its own
// downgrade cache so tests do not leak state into each other.
struct FixtureClient {
  std::shared_ptr<FixtureEndpoint> endpoint;
  TextSearchDowngrades downgrades;
  std::unique_ptr<SparqlClient> client;

  explicit FixtureClient(std::shared_ptr<FixtureEndpoint> ep,
                         Dialect dialect = Dialect::kVirtuoso)
      : endpoint(std::move(ep)) {
    EndpointConfig cfg;
    cfg.url = "fixture:test";
    cfg.dialect = dialect;
    client = std::make_unique<SparqlClient>(
        cfg, std::make_shared<FixtureTransport>(endpoint), &downgrades);
  }
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
  }
  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

  std::string word(int min_len = 2, int max_len = 8) {
    std::string s;
    int n = between(min_len, max_len);
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + index(26)));
    return s;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kgqa::testing
